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

#include "rdmalit/parser.hpp"
#include "rdmalit/unfold.hpp"

using namespace rdmalit;

TEST_CASE("single write unfolds to exactly one execution") {
  LitmusTest t = prepare_test(parse_litmus(R"(
    nodes 1
    loc x@1 = 0
    thread t1@1 { x := 1; }
  )"));
  auto pes = unfold(t, 3);
  REQUIRE(pes.size() == 1);
  REQUIRE(pes[0].sym.events.size() == 1);
  CHECK(pes[0].sym.events[0].op == Op::CpuWrite);
}

TEST_CASE("loop of one read, bound 2, domain {0,1}: seven executions") {
  LitmusTest t = prepare_test(parse_litmus(R"(
    nodes 1
    loc x@1 = 1
    thread t1@1 { loop { a := x; } }
  )"));
  auto dom = value_domain(t, 2);
  REQUIRE(dom == std::vector<Val>{0, 1});
  auto pes = unfold(t, 2);
  // 1 + 2 + 4, by direct enumeration of iteration counts and outputs
  CHECK(pes.size() == 7);
  std::size_t with_two_reads = 0;
  for (const auto& pe : pes)
    if (pe.sym.events.size() == 2) ++with_two_reads;
  CHECK(with_two_reads == 4);
}

TEST_CASE("fig 1a: one plain execution per enumerated read output") {
  // the put's internal read is not part of the plain execution's outputs,
  // so the unfolding is unique
  LitmusTest t = prepare_test(parse_litmus(R"(
    nodes 2
    loc x@1 = 0
    loc z@2 = 0
    thread t1@1 {
      put(z, x, d);
      wait(d);
      x := 1;
    }
  )"));
  auto pes = unfold(t, 3);
  CHECK(pes.size() == 1);
  CHECK(pes[0].sym.events.size() == 3);
}

TEST_CASE("choices multiply and breaks stop spin loops") {
  LitmusTest t = prepare_test(parse_litmus(R"(
    nodes 1
    loc x@1 = 0
    thread t1@1 {
      choice { x := 1; } or { x := 2; }
      spin { a := x; if a == 1 { break; } }
    }
  )"));
  UnfoldStats st;
  std::size_t count = 0;
  std::size_t max_reads = 0;
  unfold_symbolic(
      t, 3,
      [&](const SymExec& sx) {
        ++count;
        std::size_t reads = 0;
        for (const UEvent& e : sx.events)
          if (e.op == Op::CpuRead) ++reads;
        max_reads = std::max(max_reads, reads);
      },
      &st);
  // per choice branch: exit after read 1, 2 or 3, plus the exhausted path
  CHECK(count == 2 * 4);
  CHECK(st.exhausted_paths == 2);
  CHECK(max_reads == 3);
}

TEST_CASE("per-thread program order is total and acyclic in every unfolding") {
  LitmusTest t = prepare_test(parse_litmus(R"(
    nodes 2
    loc x@1 = 0
    loc y@2 = 0
    thread t1@1 { x := 1; a := x; put(y, x, d); wait(d); }
    thread t2@2 { y := 1; choice { b := y; } or { mfence; } }
  )"));
  for (const auto& pe : unfold(t, 2)) {
    // events of one thread appear in increasing eid order, all pairs related
    for (std::size_t i = 0; i < pe.sym.events.size(); ++i)
      for (std::size_t j = i + 1; j < pe.sym.events.size(); ++j) {
        const UEvent &a = pe.sym.events[i], &b = pe.sym.events[j];
        if (a.thread == b.thread) {
          CHECK(pe.sym.po(static_cast<int>(i), static_cast<int>(j)));
          CHECK_FALSE(pe.sym.po(static_cast<int>(j), static_cast<int>(i)));
        }
      }
  }
}

TEST_CASE("unfolding is exhaustive and duplicate free") {
  LitmusTest t = prepare_test(parse_litmus(R"(
    nodes 1
    loc x@1 = 0
    loc y@1 = 2
    thread t1@1 { a := x; b := y; }
  )"));
  auto dom = value_domain(t, 3);
  REQUIRE(dom == std::vector<Val>{0, 2});
  auto pes = unfold(t, 3);
  REQUIRE(pes.size() == 4);  // 2 reads x 2 domain values
  std::set<std::pair<Val, Val>> seen;
  for (const auto& pe : pes) {
    REQUIRE(pe.sym.events.size() == 2);
    seen.emplace(pe.value_of(SymVal::of_slot(pe.sym.events[0].out_slot)),
                 pe.value_of(SymVal::of_slot(pe.sym.events[1].out_slot)));
  }
  CHECK(seen.size() == 4);
}

TEST_CASE("value domain closes under fetch-and-add increments") {
  LitmusTest t = prepare_test(parse_litmus(R"(
    nodes 2
    loc x@2 = 0
    loc p@1 = 0
    loc q@1 = 0
    thread t1@1 { rfaa(p, x, 1, d); wait(d); v := p; q := v + 1; }
    thread t2@1 { rfaa(p2, x, 1, e); wait(e); }
  )"));
  auto dom = value_domain(t, 3);
  CHECK(std::find(dom.begin(), dom.end(), 2) != dom.end());
  CHECK(std::find(dom.begin(), dom.end(), 3) != dom.end());
}
