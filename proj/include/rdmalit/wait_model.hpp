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

#ifndef RDMALIT_WAIT_MODEL_HPP_
#define RDMALIT_WAIT_MODEL_HPP_

#include <chrono>

#include "rdmalit/graphdump.hpp"
#include "rdmalit/lib_specs.hpp"
#include "rdmalit/verdict.hpp"

namespace rdmalit {

/// Libraries used by an execution, in a fixed order.
inline std::vector<Lib> libraries_of(const SymExec& sx) {
  std::set<int> seen;
  for (const UEvent& e : sx.events) seen.insert(static_cast<int>(lib_of(e.op)));
  std::vector<Lib> out;
  for (int l : seen) out.push_back(static_cast<Lib>(l));
  return out;
}

/// Composed consistency: every library's restriction is consistent, the
/// synchronisation order is the union of the per-library orders, and
/// (so | ppo)+ is irreflexive.
inline bool check_composed(const Candidate& c) {
  Rel so(c.nsubs());
  for (Lib lib : libraries_of(*c.sx))
    if (!library_consistent(c, lib, so)) return false;
  Rel hb = so | detail::ppo_global(c);
  hb.close();
  return hb.irreflexive();
}

/// Single-library waitrmw consistency, as a named entry point.
inline bool check_wait(const Candidate& c) { return check_composed(c); }

/// Final values of one consistent candidate, over the vocabulary.
inline Outcome extract_outcome(const Candidate& c, const Vocabulary& v) {
  Outcome o(v.entries.size(), 0);
  for (std::size_t i = 0; i < v.entries.size(); ++i) {
    const Vocabulary::Entry& en = v.entries[i];
    if (en.kind == Vocabulary::Entry::Kind::Reg) {
      auto it = c.sx->final_regs.find(en.idx);
      if (it != c.sx->final_regs.end()) {
        auto val = c.cells.value(it->second);
        o[i] = val ? *val : 0;
      }
      continue;
    }
    long key = (static_cast<long>(en.idx) << 8) | en.node;
    Val result = c.test->locations[en.idx].init;
    auto it = c.mo.find(key);
    if (it != c.mo.end() && !it->second.empty()) {
      auto val = c.cells.value(c.subs[it->second.back()].vw);
      result = val ? *val : result;
    }
    o[i] = result;
  }
  return o;
}

/// Declarative check of a wait/library-dialect test: enumerates unfoldings
/// and candidate witnesses, collecting the outcomes of consistent ones.
inline Verdict run_wait_verdict(const LitmusTest& raw, const CheckOptions& opt = {}) {
  auto t0 = std::chrono::steady_clock::now();
  LitmusTest t = prepare_test(raw);
  Verdict v;
  v.test = t.name;
  v.model = "wait";
  v.vocab = Vocabulary::of(t);
  if (t.dialect == Dialect::Tso) {
    v.error = "tso-dialect test handed to the wait checker";
    return v;
  }

  std::vector<std::string> witnesses(t.assertions.size());
  UnfoldStats ustats;
  bool capped = false;
  unfold_symbolic(
      t, opt.loop_bound,
      [&](const SymExec& sx) {
        if (sx.exhausted || capped) return;
        CandidateEnumerator en(
            sx, t,
            [&](Candidate& c) {
              ++v.stats.candidates;
              if (!check_composed(c)) return true;
              ++v.stats.consistent;
              Outcome o = extract_outcome(c, v.vocab);
              v.outcomes.insert(o);
              if (opt.want_witnesses) {
                for (std::size_t i = 0; i < t.assertions.size(); ++i)
                  if (witnesses[i].empty() && eval_bool(t.assertions[i].expr, v.vocab, o))
                    witnesses[i] = dump_candidate(c);
              }
              return true;
            },
            opt.candidate_cap - std::min(opt.candidate_cap, v.stats.candidates),
            make_consistency_guide());
        if (!en.run()) capped = true;
      },
      &ustats);
  v.stats.paths = ustats.paths;
  v.stats.exhausted_paths = ustats.exhausted_paths;
  v.stats.star_capped = ustats.star_capped;
  v.resource_exceeded = capped;
  finalize_verdict(v, t);
  for (std::size_t i = 0; i < v.results.size() && i < witnesses.size(); ++i)
    if (v.results[i].observed_allowed) v.results[i].witness = witnesses[i];
  v.stats.time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  return v;
}

}  // namespace rdmalit

#endif  // RDMALIT_WAIT_MODEL_HPP_
