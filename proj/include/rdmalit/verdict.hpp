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

#ifndef RDMALIT_VERDICT_HPP_
#define RDMALIT_VERDICT_HPP_

#include <set>
#include <sstream>

#include "rdmalit/litmus.hpp"

namespace rdmalit {

/// Final values are reported over a fixed vocabulary: the test's registers
/// and locations, with one entry per node for shared variables. Auxiliary
/// names introduced by inlining or translation are excluded, which keeps
/// outcome sets comparable across abstraction levels.
struct Vocabulary {
  struct Entry {
    enum class Kind { Reg, Loc, SvarCopy } kind;
    int idx = -1;   // register or location index
    int node = 0;   // SvarCopy only
    std::string name;
  };
  std::vector<Entry> entries;
  std::map<int, int> reg_pos;
  std::map<std::pair<int, int>, int> loc_pos;  // (loc, node) -> position

  static Vocabulary of(const LitmusTest& t) {
    Vocabulary v;
    for (std::size_t r = 0; r < t.registers.size(); ++r) {
      if (t.registers[r].aux) continue;
      v.reg_pos[static_cast<int>(r)] = static_cast<int>(v.entries.size());
      v.entries.push_back({Entry::Kind::Reg, static_cast<int>(r), 0, t.registers[r].name});
    }
    for (std::size_t l = 0; l < t.locations.size(); ++l) {
      const Location& loc = t.locations[l];
      if (loc.aux || is_lock_kind(loc.kind) || loc.kind == LocKind::Set) continue;
      if (loc.kind == LocKind::SVar) {
        for (int n = 1; n <= t.num_nodes; ++n) {
          v.loc_pos[{static_cast<int>(l), n}] = static_cast<int>(v.entries.size());
          v.entries.push_back({Entry::Kind::SvarCopy, static_cast<int>(l), n,
                               loc.name + "@" + std::to_string(n)});
        }
      } else {
        v.loc_pos[{static_cast<int>(l), 0}] = static_cast<int>(v.entries.size());
        v.entries.push_back({Entry::Kind::Loc, static_cast<int>(l), 0, loc.name});
      }
    }
    return v;
  }
};

using Outcome = std::vector<Val>;

inline std::string outcome_to_string(const Vocabulary& v, const Outcome& o) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.entries.size(); ++i) {
    if (i) os << " ";
    os << v.entries[i].name << "=" << o[i];
  }
  return os.str();
}

inline bool eval_bool(const BoolExpr& e, const Vocabulary& v, const Outcome& o) {
  switch (e.kind) {
    case BoolExpr::Kind::Cmp: {
      Val subject = 0;
      if (e.reg >= 0) {
        auto it = v.reg_pos.find(e.reg);
        subject = it == v.reg_pos.end() ? 0 : o[it->second];
      } else {
        auto it = v.loc_pos.find({e.loc, e.svar_node});
        subject = it == v.loc_pos.end() ? 0 : o[it->second];
      }
      return (subject == e.value) == e.eq;
    }
    case BoolExpr::Kind::And:
      return eval_bool(e.kids[0], v, o) && eval_bool(e.kids[1], v, o);
    case BoolExpr::Kind::Or:
      return eval_bool(e.kids[0], v, o) || eval_bool(e.kids[1], v, o);
    case BoolExpr::Kind::Not:
      return !eval_bool(e.kids[0], v, o);
  }
  return false;
}

struct AssertionResult {
  std::string text;
  bool expect_allowed = true;
  bool observed_allowed = false;
  std::string witness;  // serialized witness for observed-allowed assertions

  bool pass() const { return expect_allowed == observed_allowed; }
};

struct CheckStats {
  std::size_t paths = 0;
  std::size_t exhausted_paths = 0;
  std::size_t candidates = 0;
  std::size_t consistent = 0;
  std::size_t states = 0;      // operational exploration
  std::size_t deadlocks = 0;   // operational dead ends
  bool star_capped = false;
  long time_ms = 0;
};

struct Verdict {
  std::string test;
  std::string model;
  Vocabulary vocab;
  std::set<Outcome> outcomes;
  std::vector<AssertionResult> results;
  CheckStats stats;
  bool resource_exceeded = false;
  std::string error;

  bool all_pass() const {
    if (resource_exceeded || !error.empty()) return false;
    for (const auto& r : results)
      if (!r.pass()) return false;
    return true;
  }
};

/// Assembles per-assertion results once the outcome set is complete.
inline void finalize_verdict(Verdict& v, const LitmusTest& t) {
  for (const Assertion& a : t.assertions) {
    AssertionResult r;
    r.text = a.text;
    r.expect_allowed = a.expect_allowed;
    for (const Outcome& o : v.outcomes)
      if (eval_bool(a.expr, v.vocab, o)) {
        r.observed_allowed = true;
        break;
      }
    v.results.push_back(std::move(r));
  }
}

struct CheckOptions {
  int loop_bound = 3;
  std::size_t candidate_cap = 10'000'000;
  std::size_t state_cap = 1'000'000;
  bool want_witnesses = false;
};

}  // namespace rdmalit

#endif  // RDMALIT_VERDICT_HPP_
