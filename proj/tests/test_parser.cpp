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

using namespace rdmalit;

TEST_CASE("fig 1a parses to one thread on node 1 with two nodes") {
  LitmusTest t = parse_litmus(R"(
    nodes 2
    loc x@1 = 0
    loc z@2 = 0
    thread t1@1 {
      put(z, x);
      poll(2);
      x := 1;
    }
    assert forbidden z == 1
  )");
  CHECK(t.num_nodes == 2);
  CHECK(t.dialect == Dialect::Tso);
  REQUIRE(t.threads.size() == 1);
  CHECK(t.threads[0].node == 1);
  REQUIRE(t.threads[0].body.size() == 3);
  CHECK(t.threads[0].body[0].instr.op == Op::Put);
  CHECK(t.threads[0].body[1].instr.op == Op::Poll);
  CHECK(t.threads[0].body[2].instr.op == Op::CpuWrite);
  REQUIRE(t.assertions.size() == 1);
  CHECK_FALSE(t.assertions[0].expect_allowed);
}

TEST_CASE("empty program with a trivial assertion") {
  LitmusTest t = parse_litmus(R"(
    nodes 1
    loc x@1 = 0
    assert allowed x == 0
  )");
  CHECK(t.threads.empty());
  CHECK(t.assertions.size() == 1);
}

TEST_CASE("wait in a declared tso test is a dialect mismatch") {
  CHECK_THROWS_AS(parse_litmus(R"(
    nodes 2
    model tso
    loc x@1 = 0
    loc z@2 = 0
    thread t1@1 {
      put(z, x, d);
      wait(d);
    }
  )"),
                  ParseError);
}

TEST_CASE("poll mixed with wait-dialect operations is rejected") {
  CHECK_THROWS_AS(parse_litmus(R"(
    nodes 2
    loc x@1 = 0
    loc z@2 = 0
    thread t1@1 {
      put(z, x, d);
      wait(d);
      poll(2);
    }
  )"),
                  ParseError);
}

TEST_CASE("undeclared locations are reported") {
  CHECK_THROWS_AS(parse_litmus("nodes 1\nthread t@1 { y := 1; }"), ParseError);
}

TEST_CASE("cpu access to a remote location is ill-addressed") {
  CHECK_THROWS_AS(parse_litmus(R"(
    nodes 2
    loc x@2 = 0
    thread t1@1 { x := 1; }
  )"),
                  ParseError);
}

TEST_CASE("round trip: parse . pretty is stable") {
  const char* sources[] = {
      R"(
        nodes 2
        loc x@1 = 0
        loc z@2 = 0
        thread t1@1 {
          put(z, x, d);
          wait(d);
          x := 1;
          a := x;
          choice { mfence; } or { b := cas(x, 0, 2); }
          loop { c := x; }
          spin { if c == 1 { break; } }
        }
        assert forbidden z == 1
        assert allowed (a == 1 && z == 0)
      )",
      R"(
        nodes 3
        svar s = 0
        loc z@2 = 0
        lock l@2 nl
        scloc q@1 = 0
        thread t1@1 {
          acq_nl(l);
          brlwrite(s, 1);
          bcast(s, d, {2, 3});
          brlwait(d);
          gfence({2});
          scwrite(q, 1);
          rel_nl(l);
        }
        thread t2@2 {
          a := brlread(s);
          b := scread(q);
          c := sccas(q, 0, 2);
          e := scfaa(q, 1);
        }
        assert allowed s@2 == 1
      )",
  };
  for (const char* src : sources) {
    LitmusTest t1 = parse_litmus(src);
    std::string p1 = pretty_print(t1);
    LitmusTest t2 = parse_litmus(p1);
    std::string p2 = pretty_print(t2);
    CHECK(p1 == p2);
  }
}

TEST_CASE("literal puts and id-binding survive the round trip") {
  LitmusTest t = parse_litmus(R"(
    nodes 2
    loc z@2 = 0
    set s1@1
    thread t1@1 {
      put(z, 1) -> r;
      setadd(s1, r);
      spin {
        e := setisempty(s1);
        if e == 1 { break; }
        v := poll(2);
        setremove(s1, v);
      }
    }
  )");
  CHECK(t.dialect == Dialect::Tso);
  std::string p1 = pretty_print(t);
  CHECK(p1 == pretty_print(parse_litmus(p1)));
}
