/*
 * Copyright (c) 2026, the rdma-lit authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "rdmalit/op_sim.hpp"
#include "rdmalit/parser.hpp"
#include "rdmalit/tso_decl.hpp"

using namespace rdmalit;

namespace {

void check_both(const std::string& src) {
  LitmusTest t = parse_litmus(src);
  Verdict decl = run_tso_decl_verdict(t);
  Verdict op = run_tso_op_verdict(t);
  for (const Verdict* v : {&decl, &op}) {
    INFO(v->model);
    CHECK(v->error.empty());
    CHECK_FALSE(v->resource_exceeded);
    for (const auto& r : v->results) {
      INFO(v->model << ": " << r.text << " expected "
                    << (r.expect_allowed ? "allowed" : "forbidden") << ", observed "
                    << (r.observed_allowed ? "allowed" : "forbidden"));
      CHECK(r.pass());
    }
  }
  CHECK(decl.outcomes == op.outcomes);
}

}  // namespace

TEST_CASE("fig 1a: poll covers the single put") {
  check_both(R"(
    nodes 2
    loc x@1 = 0
    loc z@2 = 0
    thread t1@1 { put(z, x); poll(2); x := 1; }
    assert forbidden z == 1
    assert allowed z == 0
  )");
}

TEST_CASE("fig 1b: one poll acknowledges only the first of two puts") {
  check_both(R"(
    nodes 2
    loc x@1 = 0
    loc z@2 = 0
    thread t1@1 { put(z, x); put(z, x); poll(2); x := 1; }
    assert allowed z == 1
    assert allowed z == 0
  )");
}

TEST_CASE("fig 1c: two polls cover both puts") {
  check_both(R"(
    nodes 2
    loc x@1 = 0
    loc z@2 = 0
    thread t1@1 { put(z, x); put(z, x); poll(2); poll(2); x := 1; }
    assert forbidden z == 1
    assert allowed z == 0
  )");
}

TEST_CASE("a poll with no matching remote operation never fires") {
  LitmusTest t = parse_litmus(R"(
    nodes 2
    loc x@1 = 0
    thread t1@1 { poll(2); x := 1; }
    assert forbidden x == 1
  )");
  Verdict decl = run_tso_decl_verdict(t);
  CHECK(decl.outcomes.empty());
  Verdict op = run_tso_op_verdict(t);
  CHECK(op.outcomes.empty());
  CHECK(op.stats.deadlocks > 0);
}

TEST_CASE("rcas-reordering (c): store buffering with remote faas and polls") {
  check_both(R"(
    nodes 2
    loc y@1 = 0
    loc x@2 = 0
    loc u@1 = 0
    loc w@2 = 0
    thread t1@1 { rfaa(u, x, 1); poll(2); a := y; }
    thread t2@2 { rfaa(w, y, 1); poll(1); b := x; }
    assert allowed (a == 0 && b == 0)
  )");
}

TEST_CASE("rcas atomicity under tso: puts interleave, rmws do not") {
  check_both(R"(
    nodes 3
    loc x@3 = 0
    loc r@1 = 0
    loc k@2 = 1
    thread t1@1 { rcas(r, x, 0, 2); }
    thread t2@2 { put(x, k); }
    assert allowed x == 2
    assert allowed x == 1
  )");
  check_both(R"(
    nodes 3
    loc x@3 = 0
    loc r@1 = 0
    loc s@2 = 0
    thread t1@1 { rcas(r, x, 0, 2); }
    thread t2@2 { rfaa(s, x, 1); }
    assert forbidden x == 2
    assert allowed x == 1
    assert allowed x == 3
  )");
}

TEST_CASE("tso cpu behaviour: store buffering yes, message passing no") {
  check_both(R"(
    nodes 1
    loc x@1 = 0
    loc y@1 = 0
    thread t1@1 { x := 1; a := y; }
    thread t2@1 { y := 1; b := x; }
    assert allowed (a == 0 && b == 0)
  )");
  check_both(R"(
    nodes 1
    loc x@1 = 0
    loc y@1 = 0
    thread t1@1 { x := 1; y := 1; }
    thread t2@1 { a := y; b := x; }
    assert forbidden (a == 1 && b == 0)
  )");
}

TEST_CASE("single cpu write: buffer then drain") {
  LitmusTest t = parse_litmus(R"(
    nodes 1
    loc x@1 = 0
    thread t1@1 { x := 1; }
    assert allowed x == 1
    assert forbidden x == 0
  )");
  Verdict op = run_tso_op_verdict(t);
  CHECK(op.all_pass());
  // exactly: initial, buffered, drained
  CHECK(op.stats.states == 3);
}

TEST_CASE("same-queue-pair remote writes are observed in order") {
  check_both(R"(
    nodes 2
    loc u@1 = 1
    loc v@1 = 2
    loc z@2 = 0
    loc w@2 = 0
    thread t1@1 { put(z, u); rfence(2); put(w, v); }
    thread t2@2 { a := w; b := z; }
    assert forbidden (a == 2 && b == 0)
    assert allowed (a == 2 && b == 1)
    assert allowed (a == 0 && b == 0)
    assert allowed (a == 0 && b == 1)
  )");
}

TEST_CASE("random straight-line programs: operational equals declarative") {
  std::mt19937 rng(12345);
  auto lit = [&](int max) { return static_cast<int>(rng() % max); };
  int checked = 0;
  for (int iter = 0; iter < 40; ++iter) {
    std::ostringstream src;
    src << "nodes 2\nloc x@1 = 0\nloc y@2 = 0\nloc u@1 = 0\nloc w@2 = 0\n";
    int events = 0;
    for (int ti = 0; ti < 2; ++ti) {
      int node = ti + 1;
      const char *local = ti == 0 ? "x" : "y", *remote = ti == 0 ? "y" : "x";
      const char* buf = ti == 0 ? "u" : "w";
      src << "thread t" << ti + 1 << "@" << node << " {\n";
      int n_instr = 1 + lit(3);
      int remote_ops = 0;
      for (int i = 0; i < n_instr && events < 8; ++i) {
        switch (lit(8)) {
          case 0:
            src << "  " << local << " := " << lit(2) << ";\n";
            events += 1;
            break;
          case 1:
            src << "  r" << ti << "_" << i << " := " << local << ";\n";
            events += 1;
            break;
          case 2:
            src << "  put(" << remote << ", " << local << ");\n";
            events += 2;
            ++remote_ops;
            break;
          case 3:
            src << "  get(" << buf << ", " << remote << ");\n";
            events += 2;
            ++remote_ops;
            break;
          case 4:
            src << "  rcas(" << buf << ", " << remote << ", " << lit(2) << ", " << lit(2)
                << ");\n";
            events += 3;
            ++remote_ops;
            break;
          case 5:
            src << "  rfaa(" << buf << ", " << remote << ", 1);\n";
            events += 3;
            ++remote_ops;
            break;
          case 6:
            if (remote_ops > 0) {
              src << "  poll(" << (ti == 0 ? 2 : 1) << ");\n";
              events += 1;
              --remote_ops;
            }
            break;
          case 7:
            src << "  mfence;\n";
            events += 1;
            break;
        }
      }
      src << "}\n";
    }
    LitmusTest t;
    try {
      t = parse_litmus(src.str(), "rand" + std::to_string(iter));
    } catch (const ParseError&) {
      continue;
    }
    Verdict decl = run_tso_decl_verdict(t);
    Verdict op = run_tso_op_verdict(t);
    REQUIRE(decl.error.empty());
    REQUIRE(op.error.empty());
    INFO("program:\n" << src.str());
    CHECK(decl.outcomes == op.outcomes);
    ++checked;
  }
  CHECK(checked >= 30);
}
