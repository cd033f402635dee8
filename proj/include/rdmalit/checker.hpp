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

#ifndef RDMALIT_CHECKER_HPP_
#define RDMALIT_CHECKER_HPP_

#include "rdmalit/lib_impls.hpp"
#include "rdmalit/op_sim.hpp"
#include "rdmalit/tso_decl.hpp"
#include "rdmalit/wait_model.hpp"

namespace rdmalit {

// Model pipelines. A model is a '+'-separated pipeline of transform steps
// ending in a checker:
//
//   wait | tso-decl | tso-op | spec:<lib>
//   inline:wlock|slock|nlock|sc[,more]  (source-to-source inlining)
//   translate                            (wait -> poll translation)
//
// e.g. "inline:sc,nlock+wait" inlines the SC library, then node locks, and
// checks the result declaratively; "translate+tso-op" runs the translation
// through the operational machine. A bare checker name is a pipeline too.

inline LitmusTest apply_inline(const LitmusTest& t, const std::string& lib) {
  if (lib == "wlock") return inline_wlock(t);
  if (lib == "slock") return inline_slock(t);
  if (lib == "nlock") return inline_nlock(t);
  if (lib == "sc") return inline_sc(t);
  throw std::runtime_error("unknown library to inline: '" + lib + "'");
}

inline Verdict run_model(const LitmusTest& test, const std::string& model,
                         const CheckOptions& opt = {}) {
  LitmusTest t = test;
  std::vector<std::string> steps;
  std::string cur;
  for (char c : model) {
    if (c == '+') {
      steps.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  steps.push_back(cur);

  for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
    const std::string& s = steps[i];
    if (s.rfind("inline:", 0) == 0) {
      std::string libs = s.substr(7), one;
      for (char c : libs + ",") {
        if (c == ',') {
          if (!one.empty()) t = apply_inline(t, one);
          one.clear();
        } else {
          one += c;
        }
      }
    } else if (s == "translate") {
      t = translate_wait_to_tso(t);
    } else {
      throw std::runtime_error("'" + s + "' is not a transform step");
    }
  }
  const std::string& checker = steps.back();
  Verdict v;
  if (checker == "wait" || checker.rfind("spec:", 0) == 0) {
    v = run_wait_verdict(t, opt);
  } else if (checker == "tso-decl") {
    v = run_tso_decl_verdict(t, opt);
  } else if (checker == "tso-op") {
    v = run_tso_op_verdict(t, opt);
  } else {
    throw std::runtime_error("unknown model '" + checker + "'");
  }
  v.model = model;
  v.test = test.name;
  return v;
}

/// Default models for a test, from its dialect: declarative for wait/library
/// tests, both tso checkers for tso tests.
inline std::vector<std::string> default_models(const LitmusTest& t) {
  if (t.dialect == Dialect::Tso) return {"tso-decl", "tso-op"};
  return {"wait"};
}

// ---------------------------------------------------------------------------
// Outcome-set comparison across models (projected onto the common names).
// ---------------------------------------------------------------------------

struct OutcomeComparison {
  std::vector<std::string> names;
  std::set<Outcome> only_a, only_b;

  bool equal() const { return only_a.empty() && only_b.empty(); }
  bool a_subset() const { return only_a.empty(); }
  bool b_subset() const { return only_b.empty(); }

  std::string relation() const {
    if (equal()) return "equal";
    if (a_subset()) return "A-subset-of-B";
    if (b_subset()) return "B-subset-of-A";
    return "incomparable";
  }
};

inline std::set<Outcome> project_outcomes(const Verdict& v,
                                          const std::vector<std::string>& names) {
  std::map<std::string, int> pos;
  for (std::size_t i = 0; i < v.vocab.entries.size(); ++i)
    pos[v.vocab.entries[i].name] = static_cast<int>(i);
  std::set<Outcome> out;
  for (const Outcome& o : v.outcomes) {
    Outcome p;
    for (const std::string& n : names) {
      auto it = pos.find(n);
      p.push_back(it == pos.end() ? 0 : o[it->second]);
    }
    out.insert(p);
  }
  return out;
}

inline OutcomeComparison compare_outcomes(const Verdict& a, const Verdict& b) {
  OutcomeComparison cmp;
  std::set<std::string> bn;
  for (const auto& e : b.vocab.entries) bn.insert(e.name);
  for (const auto& e : a.vocab.entries)
    if (bn.count(e.name)) cmp.names.push_back(e.name);
  std::set<Outcome> pa = project_outcomes(a, cmp.names), pb = project_outcomes(b, cmp.names);
  for (const Outcome& o : pa)
    if (!pb.count(o)) cmp.only_a.insert(o);
  for (const Outcome& o : pb)
    if (!pa.count(o)) cmp.only_b.insert(o);
  return cmp;
}

// ---------------------------------------------------------------------------
// Witness re-verification: recomputes every relation of a stored witness
// from scratch and re-checks the consistency conditions, including that the
// synchronisation order equals its defining union.
// ---------------------------------------------------------------------------

inline bool reverify_witness(const Candidate& c) {
  // well-formedness: rf value/location agreement, mo totality per location,
  // rao totality per node, forced nfo pairs oriented exactly once
  for (int r = 0; r < c.nsubs(); ++r) {
    if (!c.subs[r].rd) continue;
    int w = c.rf[r];
    auto vr = c.cells.value(c.subs[r].vr);
    if (!vr) return false;
    if (w >= 0) {
      if (!c.subs[w].wr || c.subs[w].lockey() != c.subs[r].lockey()) return false;
      auto vw = c.cells.value(c.subs[w].vw);
      if (!vw || *vw != *vr) return false;
    } else if (*vr != c.init_of(c.subs[r].lockey())) {
      return false;
    }
  }
  std::map<long, std::size_t> writes_per_key;
  for (int w = 0; w < c.nsubs(); ++w)
    if (c.subs[w].wr) ++writes_per_key[c.subs[w].lockey()];
  for (const auto& [key, order] : c.mo) {
    if (order.size() != writes_per_key[key]) return false;
    for (int s : order)
      if (!c.subs[s].wr || c.subs[s].lockey() != key) return false;
  }
  std::map<int, std::size_t> narr_per_node;
  for (int s = 0; s < c.nsubs(); ++s)
    if (c.subs[s].stamp.kind == StampKind::naRR) ++narr_per_node[c.subs[s].stamp.node];
  for (const auto& [node, order] : c.rao)
    if (order.size() != narr_per_node[node]) return false;

  // consistency, rebuilt from the stored witnesses: each library's
  // synchronisation order is recomputed as its defining union, so the
  // so-equality condition holds exactly of what gets checked here
  Rel so(c.nsubs());
  for (Lib lib : libraries_of(*c.sx))
    if (!library_consistent(c, lib, so)) return false;
  Rel hb = so | detail::ppo_global(c);
  hb.close();
  return hb.irreflexive();
}

}  // namespace rdmalit

#endif  // RDMALIT_CHECKER_HPP_
