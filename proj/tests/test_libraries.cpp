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

TEST_CASE("brl: a local write is visible to a program-order-later local read") {
  CHECK(all_pass(check(R"(
    nodes 1
    svar x = 0
    thread t1@1 { brlwrite(x, 1); a := brlread(x); }
    assert forbidden a == 0
    assert allowed a == 1
  )")));
}

TEST_CASE("brl: reads with no prior write on their node return zero") {
  CHECK(all_pass(check(R"(
    nodes 2
    svar x = 0
    thread t1@1 { brlwrite(x, 1); }
    thread t2@2 { a := brlread(x); }
    assert allowed a == 0
    assert forbidden a == 1
  )")));
}

TEST_CASE("brl: broadcast makes the value visible remotely") {
  CHECK(all_pass(check(R"(
    nodes 2
    svar x = 0
    thread t1@1 { brlwrite(x, 1); bcast(x, d); }
    thread t2@2 { a := brlread(x); }
    assert allowed a == 0
    assert allowed a == 1
    assert allowed x@2 == 1 && a == 0
    assert forbidden x@2 == 0 && a == 1
  )")));
}

TEST_CASE("fig 3a: put then broadcast; remote observer (1,0) forbidden") {
  CHECK(all_pass(check(R"(
    nodes 2
    svar x = 0
    loc z@2 = 0
    thread t1@1 { put(z, 1, d); brlwrite(x, 1); bcast(x, e); }
    thread t2@2 { a := brlread(x); b := z; }
    assert forbidden (a == 1 && b == 0)
    assert allowed (a == 1 && b == 1)
    assert allowed (a == 0 && b == 0)
  )")));
}

TEST_CASE("fig 3b: three nodes, broadcast stamps reorder partially") {
  CHECK(all_pass(check(R"(
    nodes 3
    svar x = 0
    loc y@2 = 0
    loc z@2 = 0
    thread t1@1 { put(z, 1, d); brlwrite(x, 1); bcast(x, e); }
    thread t2@2 { a := y; b := z; }
    thread t3@3 { c := brlread(x); put(y, 1, f); }
    assert allowed (a == 1 && b == 0 && c == 1)
  )")));
}

TEST_CASE("fig 5a: weak lock over cpu accesses gives mutual exclusion") {
  CHECK(all_pass(check(R"(
    nodes 1
    lock l@1 wl
    loc x@1 = 0
    loc y@1 = 0
    thread t1@1 { acq_wl(l); x := 1; y := 1; rel_wl(l); }
    thread t2@1 { acq_wl(l); a := x; b := y; rel_wl(l); }
    assert forbidden (a == 1 && b == 0) || (a == 0 && b == 1)
    assert allowed (a == 1 && b == 1)
    assert allowed (a == 0 && b == 0)
  )")));
}

TEST_CASE("fig 5b: weak lock does not await enclosed puts") {
  CHECK(all_pass(check(R"(
    nodes 2
    lock l@1 wl
    loc x@2 = 0
    loc y@2 = 0
    thread t1@1 { acq_wl(l); put(x, 1, d); put(y, 1, e); rel_wl(l); }
    thread t2@2 { acq_wl(l); a := x; b := y; rel_wl(l); }
    assert allowed (a == 1 && b == 0) || (a == 0 && b == 1)
  )")));
}

TEST_CASE("fig 5c: a global fence alone gives no mutual exclusion") {
  CHECK(all_pass(check(R"(
    nodes 2
    loc x@2 = 0
    loc y@2 = 0
    thread t1@1 { put(x, 1, d); put(y, 1, e); gfence({2}); }
    thread t2@2 { a := x; b := y; }
    assert allowed (a == 1 && b == 0) || (a == 0 && b == 1)
  )")));
}

TEST_CASE("fig 5d: weak lock plus global fence forbids the weak outcome") {
  CHECK(all_pass(check(R"(
    nodes 2
    lock l@1 wl
    loc x@2 = 0
    loc y@2 = 0
    thread t1@1 { acq_wl(l); put(x, 1, d); put(y, 1, e); gfence({2}); rel_wl(l); }
    thread t2@2 { acq_wl(l); a := x; b := y; rel_wl(l); }
    assert forbidden (a == 1 && b == 0) || (a == 0 && b == 1)
  )")));
}

TEST_CASE("fig 5e: strong lock awaits puts and cpu writes") {
  CHECK(all_pass(check(R"(
    nodes 2
    lock l@1 sl
    loc x@1 = 0
    loc y@2 = 0
    thread t1@1 { acq_sl(l); put(y, 1, d); x := 1; rel_sl(l); }
    thread t2@2 { acq_sl(l); get(a, x, e); b := y; rel_sl(l); }
    assert forbidden (a == 1 && b == 0) || (a == 0 && b == 1)
    assert allowed (a == 0 && b == 0)
    assert allowed (a == 1 && b == 1)
  )")));
}

TEST_CASE("fig 5f: node lock protects locations on its node") {
  CHECK(all_pass(check(R"(
    nodes 3
    lock l@2 nl
    loc x@2 = 0
    loc y@2 = 0
    thread t1@1 { acq_nl(l); put(x, 1, d); put(y, 1, e); rel_nl(l); }
    thread t3@3 { acq_nl(l); get(a, x, f); get(b, y, g); rel_nl(l); }
    assert forbidden (a == 1 && b == 0) || (a == 0 && b == 1)
    assert allowed (a == 0 && b == 0)
    assert allowed (a == 1 && b == 1)
  )")));
}

TEST_CASE("fig 8a: weak lock with gets in the critical section stays weak") {
  CHECK(all_pass(check(R"(
    nodes 2
    lock l@1 wl
    loc x@1 = 0
    loc y@1 = 0
    thread t1@1 { acq_wl(l); x := 1; y := 1; rel_wl(l); }
    thread t2@2 { acq_wl(l); get(a, x, d); get(b, y, e); rel_wl(l); }
    assert allowed (a == 1 && b == 0) || (a == 0 && b == 1)
  )")));
}

TEST_CASE("fig 8b: waiting on the gets restores the strong outcome") {
  CHECK(all_pass(check(R"(
    nodes 2
    lock l@1 wl
    loc x@1 = 0
    loc y@1 = 0
    thread t1@1 { acq_wl(l); x := 1; y := 1; rel_wl(l); }
    thread t2@2 { acq_wl(l); get(a, x, d); get(b, y, d); wait(d); rel_wl(l); }
    assert forbidden (a == 1 && b == 0) || (a == 0 && b == 1)
  )")));
}

TEST_CASE("fig 8c: strong lock with gets and no explicit wait") {
  CHECK(all_pass(check(R"(
    nodes 2
    lock l@1 sl
    loc x@1 = 0
    loc y@1 = 0
    thread t1@1 { acq_sl(l); x := 1; y := 1; rel_sl(l); }
    thread t2@2 { acq_sl(l); get(a, x, d); get(b, y, e); rel_sl(l); }
    assert forbidden (a == 1 && b == 0) || (a == 0 && b == 1)
  )")));
}

TEST_CASE("fig 9a: strong lock release completes the protected put") {
  CHECK(all_pass(check(R"(
    nodes 3
    lock l@2 sl
    loc x@2 = 0
    loc y@3 = 0
    thread t1@1 { acq_sl(l); put(x, 1, d); rel_sl(l); put(y, 1, e); }
    thread t3@3 { a := y; get(b, x, f); }
    assert forbidden (a == 1 && b == 0)
    assert allowed (a == 1 && b == 1)
    assert allowed (a == 0 && b == 0)
  )")));
}

TEST_CASE("fig 9b: node lock release does not await the protected put") {
  CHECK(all_pass(check(R"(
    nodes 3
    lock l@2 nl
    loc x@2 = 0
    loc y@3 = 0
    thread t1@1 { acq_nl(l); put(x, 1, d); rel_nl(l); put(y, 1, e); }
    thread t3@3 { a := y; get(b, x, f); }
    assert allowed (a == 1 && b == 0)
  )")));
}

TEST_CASE("fig 9c: re-acquiring the node lock completes same-node puts only") {
  CHECK(all_pass(check(R"(
    nodes 4
    lock l@2 nl
    loc x@2 = 0
    loc z@4 = 0
    loc y@3 = 0
    thread t1@1 { acq_nl(l); put(x, 1, d); put(z, 1, e); rel_nl(l); put(y, 1, f); }
    thread t3@3 { a := y; acq_nl(l); get(b, x, g); get(c, z, h); rel_nl(l); }
    assert forbidden (a == 1 && b == 0)
    assert allowed (a == 1 && c == 0)
  )")));
}

TEST_CASE("section 4.4: node lock release may overlap later cpu stores") {
  CHECK(all_pass(check(R"(
    nodes 2
    lock l@2 nl
    loc z@2 = 0
    loc x@1 = 0
    thread t1@1 { acq_nl(l); put(z, x, d); rel_nl(l); x := 1; }
    assert allowed z == 1
    assert allowed z == 0
  )")));
}

TEST_CASE("fig 12a: sc message passing is forbidden") {
  CHECK(all_pass(check(R"(
    nodes 2
    scloc x@1 = 0
    scloc y@2 = 0
    thread t1@1 { scwrite(x, 1); scwrite(y, 1); }
    thread t2@2 { a := scread(y); b := scread(x); }
    assert forbidden (a == 1 && b == 0)
    assert allowed (a == 1 && b == 1)
  )")));
}

TEST_CASE("fig 12b: sc store buffering is forbidden") {
  CHECK(all_pass(check(R"(
    nodes 2
    scloc x@1 = 0
    scloc y@2 = 0
    thread t1@1 { scwrite(x, 1); a := scread(y); }
    thread t2@2 { scwrite(y, 1); b := scread(x); }
    assert forbidden (a == 0 && b == 0)
  )")));
}

TEST_CASE("fig 12c: sc rmw is strongly isolated") {
  CHECK(all_pass(check(R"(
    nodes 2
    scloc x@1 = 0
    thread t1@1 { a := sccas(x, 0, 2); }
    thread t2@2 { scwrite(x, 1); }
    assert forbidden x == 2
    assert allowed x == 1
  )")));
}

TEST_CASE("fig 12d: sc does not complete earlier operations of other libraries") {
  CHECK(all_pass(check(R"(
    nodes 2
    scloc x@1 = 0
    loc z@2 = 0
    thread t1@1 { put(z, 1, d); scwrite(x, 1); }
    thread t2@2 { a := scread(x); b := z; }
    assert allowed (a == 1 && b == 0)
  )")));
}

TEST_CASE("fig 12e: sc reads do not order later accesses of other libraries") {
  CHECK(all_pass(check(R"(
    nodes 2
    scloc x@1 = 0
    loc z@1 = 0
    thread t1@1 { scwrite(x, 1); z := 1; }
    thread t2@2 { get(a, z, d); b := scread(x); }
    assert allowed (a == 1 && b == 0)
  )")));
}

TEST_CASE("lock well-formedness: double acquire voids the guarantees") {
  // an ill-formed history places no synchronisation constraints, so the
  // weak outcome of fig 5a becomes observable
  CHECK(all_pass(check(R"(
    nodes 1
    lock l@1 wl
    loc x@1 = 0
    loc y@1 = 0
    thread t1@1 { acq_wl(l); x := 1; y := 1; rel_wl(l); }
    thread t2@1 { acq_wl(l); acq_wl(l); a := x; b := y; rel_wl(l); }
    assert allowed (a == 1 && b == 0)
  )")));
}

TEST_CASE("composition of a single library reduces to that library's check") {
  // same program checked standalone and with an unrelated brl thread
  Verdict base = check(R"(
    nodes 1
    loc x@1 = 0
    thread t1@1 { x := 1; a := x; }
    assert forbidden a == 0
  )");
  Verdict composed = check(R"(
    nodes 1
    svar s = 0
    loc x@1 = 0
    thread t1@1 { x := 1; a := x; }
    thread t2@1 { brlwrite(s, 1); }
    assert forbidden a == 0
  )");
  CHECK(base.all_pass());
  CHECK(composed.all_pass());
}
