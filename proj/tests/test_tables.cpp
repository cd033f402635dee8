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
#include <fstream>

#include "rdmalit/relation.hpp"
#include "rdmalit/stamps.hpp"

using namespace rdmalit;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::string golden(const std::string& name) {
  return slurp(std::string(GOLDEN_DIR) + "/" + name);
}

}  // namespace

TEST_CASE("sto table matches the hand transcription byte for byte") {
  CHECK(dump_sto_table() == golden("sto.tsv"));
}

TEST_CASE("ippo/oppo tables match the hand transcription byte for byte") {
  CHECK(dump_ippo_table() == golden("ippo.tsv"));
  CHECK(dump_oppo_table() == golden("oppo.tsv"));
}

TEST_CASE("sto spot checks") {
  // a CPU write may be reordered after a later CPU read
  CHECK_FALSE(sto({StampKind::aCW}, {StampKind::aCR}));
  // atomic remote reads stay ordered before remote writes on the same node
  CHECK(sto({StampKind::naRR, 2}, {StampKind::nRW, 2}));
  CHECK_FALSE(sto({StampKind::naRR, 2}, {StampKind::nRW, 3}));
  // a global fence orders everything after it
  for (int k = 0; k < kStampKinds; ++k) {
    Stamp s{static_cast<StampKind>(k), 3};
    CHECK(sto({StampKind::gF, 3}, s));
    CHECK(sto({StampKind::gF, 7}, s));
  }
  // plain remote reads may be delayed past remote writes, atomic ones not
  CHECK_FALSE(sto({StampKind::nRR, 2}, {StampKind::nRW, 2}));
}

TEST_CASE("ippo/oppo spot checks") {
  QpRef qp12{1, 2}, qp12b{1, 2}, qp13{1, 3}, cpu1{1, 0};
  CHECK(ippo_tso(LabelKind::lW, cpu1, LabelKind::lR, cpu1));
  CHECK_FALSE(oppo_tso(LabelKind::lW, cpu1, LabelKind::lR, cpu1));
  CHECK_FALSE(oppo_tso(LabelKind::lW, cpu1, LabelKind::P, cpu1));
  // same-rRMW write pair may commit out of order
  CHECK_FALSE(oppo_tso(LabelKind::narW, qp12, LabelKind::nlW, qp12b));
  CHECK(ippo_tso(LabelKind::narW, qp12, LabelKind::nlW, qp12b));
  // a remote fence only awaits issue, not completion, of earlier NIC writes
  CHECK(ippo_tso(LabelKind::nrW, qp12, LabelKind::nF, qp12b));
  CHECK_FALSE(oppo_tso(LabelKind::nrW, qp12, LabelKind::nF, qp12b));
  // same-queue-pair cells need the same thread and remote node
  CHECK_FALSE(ippo_tso(LabelKind::nrW, qp12, LabelKind::nrW, qp13));
  CHECK(ippo_tso(LabelKind::nrW, qp12, LabelKind::nrW, qp12b));
}

TEST_CASE("oppo is pointwise contained in ippo") {
  for (int a = 0; a < kLabelKinds; ++a)
    for (int b = 0; b < kLabelKinds; ++b) {
      Ord i = kIppoTable[a][b], o = kOppoTable[a][b];
      INFO(label_name(static_cast<LabelKind>(a)) << " -> "
                                                 << label_name(static_cast<LabelKind>(b)));
      if (o == Ord::Y) CHECK(i == Ord::Y);
      if (o == Ord::S) CHECK(i != Ord::N);
    }
}

TEST_CASE("relation closure and orders") {
  Rel r(4);
  r.add(0, 1);
  r.add(1, 2);
  CHECK(r.acyclic());
  Rel c = r.closed();
  CHECK(c.test(0, 2));
  CHECK_FALSE(c.test(2, 0));
  r.add(2, 0);
  CHECK_FALSE(r.acyclic());

  Rel s(3);
  s.add(0, 1);
  s.add(1, 2);
  s.add(0, 2);
  Rel imm = s.immediate();
  CHECK(imm.test(0, 1));
  CHECK(imm.test(1, 2));
  CHECK_FALSE(imm.test(0, 2));

  int perms = 0;
  for_each_permutation(std::vector<int>{1, 2, 3}, [&](const std::vector<int>&) {
    ++perms;
    return true;
  });
  CHECK(perms == 6);
}
