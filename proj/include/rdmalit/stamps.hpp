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

#ifndef RDMALIT_STAMPS_HPP_
#define RDMALIT_STAMPS_HPP_

#include <array>
#include <cassert>
#include <cstdint>
#include <sstream>
#include <string>

namespace rdmalit {

// ---------------------------------------------------------------------------
// Stamp vocabulary of the wait-based models (CPU row block, then the
// per-node NIC families). Order matters: it is the row/column order of the
// stamp-order matrix below.
// ---------------------------------------------------------------------------

enum class StampKind : std::uint8_t {
  aCR = 0,   // CPU read
  aCW = 1,   // CPU write
  aCAS = 2,  // successful CPU CAS
  aMF = 3,   // memory fence
  aWT = 4,   // wait
  nLR = 5,   // NIC local read (towards n)
  nRW = 6,   // NIC remote write (towards n)
  naRR = 7,  // NIC atomic remote read (towards n)
  nRR = 8,   // NIC remote read (towards n)
  nLW = 9,   // NIC local write (towards n)
  nF = 10,   // NIC fence (towards n)
  gF = 11,   // global fence (towards n)
};

constexpr int kStampKinds = 12;

/// Per-node stamp families start at nLR.
constexpr bool stamp_has_node(StampKind k) { return static_cast<int>(k) >= 5; }

inline const char* stamp_name(StampKind k) {
  static const char* names[kStampKinds] = {"aCR", "aCW", "aCAS", "aMF", "aWT", "nLR",
                                           "nRW", "naRR", "nRR", "nLW", "nF", "gF"};
  return names[static_cast<int>(k)];
}

/// A stamp: behaviour kind plus, for NIC/fence families, the node it is
/// directed towards. Node is 1-based; 0 for node-free kinds.
struct Stamp {
  StampKind kind;
  int node = 0;

  bool operator==(const Stamp&) const = default;
};

inline std::string to_string(const Stamp& s) {
  std::string r = stamp_name(s.kind);
  if (stamp_has_node(s.kind)) r += "_" + std::to_string(s.node);
  return r;
}

// ---------------------------------------------------------------------------
// Stamp order (sto). Kept as a data matrix so each cell can be reviewed
// against the golden TSV transcription. Y = ordered, N = unordered,
// S = ordered iff both stamps carry the same node.
// ---------------------------------------------------------------------------

enum class Ord : char { N = 'N', Y = 'Y', S = 'S' };

// clang-format off
constexpr std::array<std::array<Ord, kStampKinds>, kStampKinds> kStoTable = {{
  //            aCR     aCW     aCAS    aMF     aWT     nLR     nRW     naRR    nRR     nLW     nF      gF
  /* aCR  */ {{Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y}},
  /* aCW  */ {{Ord::N, Ord::Y, Ord::Y, Ord::Y, Ord::N, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y}},
  /* aCAS */ {{Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y}},
  /* aMF  */ {{Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y}},
  /* aWT  */ {{Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y}},
  /* nLR  */ {{Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S}},
  /* nRW  */ {{Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::S, Ord::S, Ord::S, Ord::S, Ord::N, Ord::S}},
  /* naRR */ {{Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S}},
  /* nRR  */ {{Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::S, Ord::S, Ord::S}},
  /* nLW  */ {{Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::S, Ord::N, Ord::S}},
  /* nF   */ {{Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S}},
  /* gF   */ {{Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y}},
}};
// clang-format on

/// Stamp order: are two program-order-related subevents with these stamps
/// ordered?
inline bool sto(const Stamp& a, const Stamp& b) {
  switch (kStoTable[static_cast<int>(a.kind)][static_cast<int>(b.kind)]) {
    case Ord::Y:
      return true;
    case Ord::N:
      return false;
    case Ord::S:
      return a.node == b.node;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Label vocabulary of the TSO-based model, with its ippo/oppo matrices.
// Same-queue-pair cells additionally require same thread; that check lives
// with the caller, which knows event threads.
// ---------------------------------------------------------------------------

enum class LabelKind : std::uint8_t {
  lR = 0,
  lW = 1,
  CAS = 2,
  MF = 3,
  P = 4,
  nlR = 5,
  nrW = 6,
  narR = 7,
  narW = 8,
  nrR = 9,
  nlW = 10,
  nF = 11,
};

constexpr int kLabelKinds = 12;

/// NIC labels carry the remote node of their queue pair.
constexpr bool label_is_nic(LabelKind k) { return static_cast<int>(k) >= 5; }

inline const char* label_name(LabelKind k) {
  static const char* names[kLabelKinds] = {"lR", "lW", "CAS", "MF", "P", "nlR",
                                           "nrW", "narR", "narW", "nrR", "nlW", "nF"};
  return names[static_cast<int>(k)];
}

// clang-format off
constexpr std::array<std::array<Ord, kLabelKinds>, kLabelKinds> kIppoTable = {{
  //            lR      lW      CAS     MF      P       nlR     nrW     narR    narW    nrR     nlW     nF
  /* lR   */ {{Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y}},
  /* lW   */ {{Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y}},
  /* CAS  */ {{Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y}},
  /* MF   */ {{Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y}},
  /* P    */ {{Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y}},
  /* nlR  */ {{Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S}},
  /* nrW  */ {{Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S}},
  /* narR */ {{Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S}},
  /* narW */ {{Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S}},
  /* nrR  */ {{Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::S, Ord::S}},
  /* nlW  */ {{Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::S, Ord::S}},
  /* nF   */ {{Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S}},
}};

constexpr std::array<std::array<Ord, kLabelKinds>, kLabelKinds> kOppoTable = {{
  //            lR      lW      CAS     MF      P       nlR     nrW     narR    narW    nrR     nlW     nF
  /* lR   */ {{Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y}},
  /* lW   */ {{Ord::N, Ord::Y, Ord::Y, Ord::Y, Ord::N, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y}},
  /* CAS  */ {{Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y}},
  /* MF   */ {{Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y}},
  /* P    */ {{Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y, Ord::Y}},
  /* nlR  */ {{Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S}},
  /* nrW  */ {{Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S, Ord::N}},
  /* narR */ {{Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S}},
  /* narW */ {{Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::S, Ord::S, Ord::S, Ord::S, Ord::N, Ord::N}},
  /* nrR  */ {{Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::S, Ord::S}},
  /* nlW  */ {{Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::S, Ord::N}},
  /* nF   */ {{Ord::N, Ord::N, Ord::N, Ord::N, Ord::N, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S, Ord::S}},
}};
// clang-format on

struct QpRef {
  int thread = -1;
  int node = 0;  // remote node of the queue pair; 0 for CPU labels

  bool same_qp(const QpRef& o) const {
    return thread == o.thread && node == o.node && node != 0;
  }
};

inline bool table_ordered(const std::array<std::array<Ord, kLabelKinds>, kLabelKinds>& t,
                          LabelKind a, const QpRef& qa, LabelKind b, const QpRef& qb) {
  switch (t[static_cast<int>(a)][static_cast<int>(b)]) {
    case Ord::Y:
      return true;
    case Ord::N:
      return false;
    case Ord::S:
      return qa.same_qp(qb);
  }
  return false;
}

/// ippo lookup for two program-order-related events' labels.
inline bool ippo_tso(LabelKind a, const QpRef& qa, LabelKind b, const QpRef& qb) {
  return table_ordered(kIppoTable, a, qa, b, qb);
}

/// oppo lookup; oppo is pointwise contained in ippo.
inline bool oppo_tso(LabelKind a, const QpRef& qa, LabelKind b, const QpRef& qb) {
  return table_ordered(kOppoTable, a, qa, b, qb);
}

// ---------------------------------------------------------------------------
// TSV dumps for diffing the matrices against their golden transcriptions.
// ---------------------------------------------------------------------------

namespace detail {
template <typename Table, typename NameFn>
std::string dump_table(const std::string& title, const Table& t, int n, NameFn name) {
  std::ostringstream os;
  os << title;
  for (int c = 0; c < n; ++c) os << '\t' << name(c);
  os << '\n';
  for (int r = 0; r < n; ++r) {
    os << name(r);
    for (int c = 0; c < n; ++c) os << '\t' << static_cast<char>(t[r][c]);
    os << '\n';
  }
  return os.str();
}
}  // namespace detail

inline std::string dump_sto_table() {
  return detail::dump_table("sto", kStoTable, kStampKinds,
                            [](int i) { return stamp_name(static_cast<StampKind>(i)); });
}

inline std::string dump_ippo_table() {
  return detail::dump_table("ippo", kIppoTable, kLabelKinds,
                            [](int i) { return label_name(static_cast<LabelKind>(i)); });
}

inline std::string dump_oppo_table() {
  return detail::dump_table("oppo", kOppoTable, kLabelKinds,
                            [](int i) { return label_name(static_cast<LabelKind>(i)); });
}

}  // namespace rdmalit

#endif  // RDMALIT_STAMPS_HPP_
