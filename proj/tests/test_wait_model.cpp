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
#include "rdmalit/wait_model.hpp"

using namespace rdmalit;

namespace {

Verdict check(const std::string& src) { return run_wait_verdict(parse_litmus(src)); }

bool all_pass(const Verdict& v) {
  for (const auto& r : v.results) {
    INFO(r.text << " expected " << (r.expect_allowed ? "allowed" : "forbidden") << ", observed "
                << (r.observed_allowed ? "allowed" : "forbidden"));
    CHECK(r.pass());
  }
  CHECK_FALSE(v.resource_exceeded);
  CHECK(v.error.empty());
  return v.all_pass();
}

}  // namespace

TEST_CASE("cpu basics under the wait model behave like tso") {
  // store buffering is allowed
  CHECK(all_pass(check(R"(
    nodes 1
    loc x@1 = 0
    loc y@1 = 0
    thread t1@1 { x := 1; a := y; }
    thread t2@1 { y := 1; b := x; }
    assert allowed (a == 0 && b == 0)
  )")));
  // message passing is forbidden
  CHECK(all_pass(check(R"(
    nodes 1
    loc x@1 = 0
    loc y@1 = 0
    thread t1@1 { x := 1; y := 1; }
    thread t2@1 { a := y; b := x; }
    assert forbidden (a == 1 && b == 0)
    assert allowed (a == 1 && b == 1)
    assert allowed (a == 0 && b == 0)
  )")));
  // store buffering with fences is forbidden
  CHECK(all_pass(check(R"(
    nodes 1
    loc x@1 = 0
    loc y@1 = 0
    thread t1@1 { x := 1; mfence; a := y; }
    thread t2@1 { y := 1; mfence; b := x; }
    assert forbidden (a == 0 && b == 0)
  )")));
}

TEST_CASE("cpu cas is atomic (section 2.2 inset)") {
  CHECK(all_pass(check(R"(
    nodes 1
    loc x@1 = 0
    thread t1@1 { a := cas(x, 0, 2); }
    thread t2@1 { x := 1; }
    assert forbidden x == 2
    assert allowed x == 1
    assert allowed x == 2 || x == 1
  )")));
}

TEST_CASE("fig 2a: waiting on a put forbids reading the later store") {
  CHECK(all_pass(check(R"(
    nodes 2
    loc x@1 = 0
    loc z@2 = 0
    thread t1@1 { put(z, x, d); wait(d); x := 1; }
    assert forbidden z == 1
    assert allowed z == 0
  )")));
}

TEST_CASE("without the wait, the put may fetch the later store") {
  CHECK(all_pass(check(R"(
    nodes 2
    loc x@1 = 0
    loc z@2 = 0
    thread t1@1 { put(z, x, d); x := 1; }
    assert allowed z == 1
    assert allowed z == 0
  )")));
}

TEST_CASE("fig 2b: waiting on the later of two puts keeps both ordered") {
  CHECK(all_pass(check(R"(
    nodes 2
    loc x@1 = 0
    loc z@2 = 0
    thread t1@1 { put(z, x, e); put(z, x, d); wait(d); x := 1; }
    assert forbidden z == 1
    assert allowed z == 0
  )")));
}

TEST_CASE("fig 3 store buffering: waits do not await remote write completion") {
  CHECK(all_pass(check(R"(
    nodes 2
    loc y@1 = 0
    loc x@2 = 0
    thread t1@1 { put(x, 1, d); wait(d); a := y; }
    thread t2@2 { put(y, 1, e); wait(e); b := x; }
    assert allowed (a == 0 && b == 0)
  )")));
}

TEST_CASE("gfence does await remote write completion") {
  CHECK(all_pass(check(R"(
    nodes 2
    loc y@1 = 0
    loc x@2 = 0
    thread t1@1 { put(x, 1, d); gfence({2}); a := y; }
    thread t2@2 { put(y, 1, e); gfence({1}); b := x; }
    assert forbidden (a == 0 && b == 0)
  )")));
}

TEST_CASE("rcas atomicity (a): cpu stores interleave a remote cas") {
  CHECK(all_pass(check(R"(
    nodes 2
    loc x@2 = 0
    loc r@1 = 0
    thread t1@1 { rcas(r, x, 0, 2, d); }
    thread t2@2 { x := 1; }
    assert allowed x == 2
    assert allowed x == 1
  )")));
}

TEST_CASE("rcas atomicity (b): puts interleave a remote cas") {
  CHECK(all_pass(check(R"(
    nodes 3
    loc x@3 = 0
    loc r@1 = 0
    thread t1@1 { rcas(r, x, 0, 2, d); }
    thread t2@2 { put(x, 1, e); }
    assert allowed x == 2
    assert allowed x == 1
  )")));
}

TEST_CASE("rcas atomicity (c): remote rmws are mutually atomic") {
  CHECK(all_pass(check(R"(
    nodes 3
    loc x@3 = 0
    loc r@1 = 0
    loc s@2 = 0
    thread t1@1 { rcas(r, x, 0, 2, d); }
    thread t2@2 { rfaa(s, x, 1, e); }
    assert forbidden x == 2
    assert allowed x == 1
    assert allowed x == 3
  )")));
}

TEST_CASE("rcas reordering (a): load buffering with a get is allowed") {
  CHECK(all_pass(check(R"(
    nodes 2
    loc x@2 = 0
    loc y@2 = 0
    loc a@1 = 0
    thread t1@1 { get(a, x, d); put(y, 1, e); }
    thread t2@2 { b := y; x := 1; }
    assert allowed (a == 1 && b == 1)
  )")));
}

TEST_CASE("rcas reordering (b): the atomic read phase cannot be delayed") {
  CHECK(all_pass(check(R"(
    nodes 2
    loc x@2 = 0
    loc y@2 = 0
    loc a@1 = 0
    thread t1@1 { rcas(a, x, 8, 9, d); put(y, 1, e); }
    thread t2@2 { b := y; x := 1; }
    assert forbidden (a == 1 && b == 1)
  )")));
}

TEST_CASE("wait-rmw variants of the poll figures keep puts ordered") {
  // fig 1a with wait in place of poll (same verdict)
  CHECK(all_pass(check(R"(
    nodes 2
    loc x@1 = 0
    loc z@2 = 0
    thread t1@1 { put(z, x, d); wait(d); x := 1; }
    assert forbidden z == 1
  )")));
}

TEST_CASE("two concurrent writes: both final values reachable") {
  CHECK(all_pass(check(R"(
    nodes 1
    loc x@1 = 0
    thread t1@1 { x := 1; }
    thread t2@1 { x := 2; }
    assert allowed x == 1
    assert allowed x == 2
    assert forbidden x == 0
  )")));
}

TEST_CASE("empty test trivially passes") {
  Verdict v = check(R"(
    nodes 1
    loc x@1 = 0
    assert allowed x == 0
    assert forbidden x == 1
  )");
  CHECK(v.all_pass());
  CHECK(v.outcomes.size() == 1);
}

TEST_CASE("reads from unwritten locations return zero") {
  CHECK(all_pass(check(R"(
    nodes 1
    loc x@1 = 5
    thread t1@1 { a := x; }
    assert allowed a == 5
    assert forbidden a == 0
  )")));
}
