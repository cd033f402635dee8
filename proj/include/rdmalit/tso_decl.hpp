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

#ifndef RDMALIT_TSO_DECL_HPP_
#define RDMALIT_TSO_DECL_HPP_

#include <chrono>

#include "rdmalit/exec.hpp"
#include "rdmalit/relation.hpp"
#include "rdmalit/verdict.hpp"

namespace rdmalit {

// Declarative tso checker. Method calls decompose into label events (a put is
// a NIC local read followed by a NIC remote write, and so on); pre-executions
// add one initialising write per location, a total reads-from, per-location
// modification orders, polls-from, the NIC flush order and the remote-atomic
// order; consistency is irreflexivity of the mutually recursive issued-before
// / observed-before fixpoints over the ippo/oppo tables.

struct TEvent {
  int ev = -1;      // source event, -1 for initialisation writes
  int thread = -1;  // -1 for the init pseudo-thread
  int seq = 0;      // order within the thread
  LabelKind kind{};
  int loc = -1;
  int qp_node = 0;  // remote node of NIC labels
  bool rd = false, wr = false;
  SymVal vr, vw;
  int opid = -1;  // on pollable writes: the operation's unique identifier
};

/// Wait-free pure-CPU tests are valid programs of either dialect.
inline bool tso_compatible(const LitmusTest& t) {
  if (t.dialect == Dialect::Tso) return true;
  if (t.dialect == Dialect::Library) return false;
  bool wait_only = false;
  std::function<void(const Body&)> scan = [&](const Body& b) {
    for (const Stmt& s : b) {
      if (s.kind == Stmt::Kind::Instr) {
        const Instr& in = s.instr;
        if (in.op == Op::Wait || in.wid >= 0) wait_only = true;
      }
      scan(s.a);
      scan(s.b);
    }
  };
  for (const Thread& th : t.threads) scan(th.body);
  return !wait_only;
}

struct TsoPreExec {
  const SymExec* sx = nullptr;
  const LitmusTest* test = nullptr;
  std::vector<TEvent> evs;
  std::vector<char> success;  // per source event (remote cas choice)
  Cells cells{0};
  std::vector<int> rf;                  // per event: source (reads only)
  std::map<int, std::vector<int>> mo;   // per location: writes in order (init first)
  std::vector<std::pair<int, int>> nfo;
  std::map<int, std::vector<int>> rao;  // per node: narR events in order
  std::vector<int> pf;                  // per event: polled write (polls only)

  int n() const { return static_cast<int>(evs.size()); }
  bool po(int a, int b) const {
    const TEvent &x = evs[a], &y = evs[b];
    if (x.thread == -1) return y.thread != -1 || x.seq < y.seq;
    return x.thread == y.thread && x.seq < y.seq;
  }
};

namespace detail {

/// Expands one source event into its labels; returns false when the success
/// choice conflicts with already-bound values.
inline bool push_tso_labels(TsoPreExec& p, const LitmusTest& t, const UEvent& e, bool succ,
                            std::vector<std::pair<SymVal, SymVal>>& diseqs) {
  auto& evs = p.evs;
  auto mk = [&](LabelKind k, int loc, int qp) {
    TEvent x;
    x.ev = e.eid;
    x.thread = e.thread;
    x.kind = k;
    x.loc = loc;
    x.qp_node = qp;
    return x;
  };
  switch (e.op) {
    case Op::CpuWrite: {
      TEvent x = mk(LabelKind::lW, e.loc, 0);
      x.wr = true;
      x.vw = e.v1;
      evs.push_back(x);
      return true;
    }
    case Op::CpuRead: {
      TEvent x = mk(LabelKind::lR, e.loc, 0);
      x.rd = true;
      x.vr = SymVal::of_slot(e.out_slot);
      evs.push_back(x);
      return true;
    }
    case Op::CpuCas: {
      SymVal out = SymVal::of_slot(e.out_slot);
      if (succ) {
        if (!p.cells.require_eq(out, e.v1)) return false;
        TEvent x = mk(LabelKind::CAS, e.loc, 0);
        x.rd = x.wr = true;
        x.vr = out;
        x.vw = e.v2;
        evs.push_back(x);
      } else {
        diseqs.emplace_back(out, e.v1);
        evs.push_back(mk(LabelKind::MF, -1, 0));
        TEvent x = mk(LabelKind::lR, e.loc, 0);
        x.rd = true;
        x.vr = out;
        evs.push_back(x);
      }
      return true;
    }
    case Op::Mfence:
      evs.push_back(mk(LabelKind::MF, -1, 0));
      return true;
    case Op::Poll:
      evs.push_back(mk(LabelKind::P, -1, e.node));
      return true;
    case Op::Rfence:
      evs.push_back(mk(LabelKind::nF, -1, e.node));
      return true;
    case Op::Put: {
      int nn = t.locations[e.loc].node;
      SymVal v = SymVal::of_slot(p.cells.fresh());
      TEvent r = mk(LabelKind::nlR, e.loc2, nn);
      r.rd = true;
      r.vr = v;
      TEvent w = mk(LabelKind::nrW, e.loc, nn);
      w.wr = true;
      w.vw = v;
      w.opid = e.opid;
      evs.push_back(r);
      evs.push_back(w);
      return true;
    }
    case Op::Get: {
      int nn = t.locations[e.loc2].node;
      SymVal v = SymVal::of_slot(p.cells.fresh());
      TEvent r = mk(LabelKind::nrR, e.loc2, nn);
      r.rd = true;
      r.vr = v;
      TEvent w = mk(LabelKind::nlW, e.loc, nn);
      w.wr = true;
      w.vw = v;
      w.opid = e.opid;
      evs.push_back(r);
      evs.push_back(w);
      return true;
    }
    case Op::Rcas: {
      int nn = t.locations[e.loc2].node;
      SymVal v = SymVal::of_slot(p.cells.fresh());
      TEvent r = mk(LabelKind::narR, e.loc2, nn);
      r.rd = true;
      r.vr = v;
      if (succ) {
        if (!p.cells.require_eq(v, e.v1)) return false;
        evs.push_back(r);
        TEvent aw = mk(LabelKind::narW, e.loc2, nn);
        aw.wr = true;
        aw.vw = e.v2;
        evs.push_back(aw);
      } else {
        diseqs.emplace_back(v, e.v1);
        evs.push_back(r);
      }
      TEvent lw = mk(LabelKind::nlW, e.loc, nn);
      lw.wr = true;
      lw.vw = v;
      lw.opid = e.opid;
      evs.push_back(lw);
      return true;
    }
    case Op::Rfaa: {
      int nn = t.locations[e.loc2].node;
      if (!e.v1.concrete())
        throw std::runtime_error("symbolic fetch-and-add increments are not supported");
      SymVal v = SymVal::of_slot(p.cells.fresh());
      TEvent r = mk(LabelKind::narR, e.loc2, nn);
      r.rd = true;
      r.vr = v;
      TEvent aw = mk(LabelKind::narW, e.loc2, nn);
      aw.wr = true;
      aw.vw = v + e.v1.c;
      TEvent lw = mk(LabelKind::nlW, e.loc, nn);
      lw.wr = true;
      lw.vw = v;
      lw.opid = e.opid;
      evs.push_back(r);
      evs.push_back(aw);
      evs.push_back(lw);
      return true;
    }
    case Op::SetAdd:
    case Op::SetRemove:
    case Op::SetIsEmpty:
      return true;  // auxiliary bookkeeping, no labels
    default:
      throw std::runtime_error("wait/library operation in a tso execution");
  }
}

inline bool tso_pollable(const TEvent& e) {
  return e.opid >= 0 && (e.kind == LabelKind::nrW || e.kind == LabelKind::nlW);
}

}  // namespace detail

/// Relations of a complete pre-execution, and the ib/ob fixpoint.
struct TsoRels {
  Rel ib, ob;
  bool consistent = false;
};

inline TsoRels check_tso(const TsoPreExec& p) {
  int n = p.n();
  Rel po(n), ippo(n), oppo(n), rf(n), rfi(n), mo(n), nfo(n), rao(n), pfr(n), nlw_pf(n),
      ar_rao(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (p.po(a, b)) {
        po.add(a, b);
        QpRef qa{p.evs[a].thread, p.evs[a].qp_node}, qb{p.evs[b].thread, p.evs[b].qp_node};
        if (ippo_tso(p.evs[a].kind, qa, p.evs[b].kind, qb)) ippo.add(a, b);
        if (oppo_tso(p.evs[a].kind, qa, p.evs[b].kind, qb)) oppo.add(a, b);
      }
  for (int r = 0; r < n; ++r) {
    if (p.evs[r].rd) {
      int w = p.rf[r];
      rf.add(w, r);
      if (p.evs[w].kind == LabelKind::lW && p.evs[r].kind == LabelKind::lR &&
          p.evs[w].thread == p.evs[r].thread)
        rfi.add(w, r);
    }
    if (p.evs[r].kind == LabelKind::P && p.pf[r] >= 0) {
      pfr.add(p.pf[r], r);
      if (p.evs[p.pf[r]].kind == LabelKind::nlW) nlw_pf.add(p.pf[r], r);
    }
  }
  Rel rfe = rf;
  for (auto [a, b] : rfi.pairs()) rfe.remove(a, b);
  std::map<int, std::map<int, std::size_t>> mo_pos;
  for (const auto& [loc, order] : p.mo)
    for (std::size_t i = 0; i < order.size(); ++i) {
      mo_pos[loc][order[i]] = i;
      for (std::size_t j = i + 1; j < order.size(); ++j) mo.add(order[i], order[j]);
    }
  Rel rb(n), fri(n);
  for (int r = 0; r < n; ++r) {
    if (!p.evs[r].rd) continue;
    int w = p.rf[r];
    auto it = p.mo.find(p.evs[r].loc);
    if (it == p.mo.end()) continue;
    const auto& order = it->second;
    std::size_t from = mo_pos[p.evs[r].loc][w] + 1;
    for (std::size_t i = from; i < order.size(); ++i)
      if (order[i] != r) {
        rb.add(r, order[i]);
        if (p.evs[r].kind == LabelKind::lR && p.evs[order[i]].kind == LabelKind::lW &&
            p.evs[r].thread == p.evs[order[i]].thread)
          fri.add(r, order[i]);
      }
  }
  for (auto [a, b] : p.nfo) nfo.add(a, b);
  for (const auto& [node, order] : p.rao)
    for (std::size_t i = 0; i < order.size(); ++i)
      for (std::size_t j = i + 1; j < order.size(); ++j) rao.add(order[i], order[j]);
  // ar;rao: the remote write of a successful rRMW is observed before every
  // rao-later atomic read
  for (int w = 0; w < n; ++w) {
    if (p.evs[w].kind != LabelKind::narW) continue;
    int r = w - 1;  // its atomic read immediately precedes it
    for (int x = 0; x < n; ++x)
      if (rao.test(r, x)) ar_rao.add(w, x);
  }

  std::vector<char> inst(n, 0);
  for (int a = 0; a < n; ++a) {
    LabelKind k = p.evs[a].kind;
    inst[a] = !(k == LabelKind::lW || k == LabelKind::nlW || k == LabelKind::nrW ||
                k == LabelKind::narW);
  }

  Rel ib_base = ippo | rf | pfr | nfo | fri;
  Rel ob_base = oppo | rfe | nlw_pf | nfo | rb | mo | rao | ar_rao;
  TsoRels out{ib_base.closed(), ob_base.closed(), false};
  for (;;) {
    Rel ib_next = ib_base;
    for (auto [a, b] : out.ob.pairs())
      if (inst[b]) ib_next.add(a, b);
    ib_next.close();
    Rel ob_next = ob_base;
    for (auto [a, b] : ib_next.pairs())
      if (inst[a]) ob_next.add(a, b);
    ob_next.close();
    if (ib_next == out.ib && ob_next == out.ob) break;
    out.ib = ib_next;
    out.ob = ob_next;
  }
  out.consistent = out.ib.irreflexive() && out.ob.irreflexive();
  return out;
}

// ---------------------------------------------------------------------------
// Witness enumeration over one unfolding.
// ---------------------------------------------------------------------------

class TsoEnumerator {
 public:
  TsoEnumerator(const SymExec& sx, const LitmusTest& t, std::function<bool(TsoPreExec&)> sink,
                std::size_t cap = 10'000'000, bool prune = true)
      : sx_(sx), t_(t), sink_(std::move(sink)), cap_(cap), prune_(prune) {}

  bool run() {
    p_.sx = &sx_;
    p_.test = &t_;
    p_.cells = Cells(sx_.n_slots);
    p_.success.assign(sx_.events.size(), 0);
    for (const SymConstraint& k : sx_.constraints) {
      if (k.eq) {
        if (!p_.cells.require_eq(k.l, k.r)) return true;
      } else {
        diseqs_.emplace_back(k.l, k.r);
      }
    }
    stop_ = false;
    events(0);
    return !capped_;
  }

 private:
  void events(std::size_t ev) {
    if (stop_) return;
    if (ev == sx_.events.size()) {
      seal_structure();
      return;
    }
    const UEvent& e = sx_.events[ev];
    bool branching = e.op == Op::CpuCas || e.op == Op::Rcas;
    for (int succ = 1; succ >= (branching ? 0 : 1); --succ) {
      auto mark = p_.cells.mark();
      std::size_t nevs = p_.evs.size(), ndis = diseqs_.size();
      p_.success[ev] = static_cast<char>(succ);
      if (detail::push_tso_labels(p_, t_, e, succ != 0, diseqs_)) events(ev + 1);
      p_.evs.resize(nevs);
      diseqs_.resize(ndis);
      p_.cells.undo(mark);
      if (stop_) return;
    }
  }

  // Inserts init events, numbers threads, resolves polls-from, then starts
  // the witness search. p_.evs is restored before returning so the event
  // recursion can keep unwinding.
  void seal_structure() {
    std::vector<TEvent> saved = p_.evs;
    std::vector<TEvent> sealed;
    int seq = 0;
    for (std::size_t l = 0; l < t_.locations.size(); ++l) {
      const Location& loc = t_.locations[l];
      if (loc.kind == LocKind::Set || loc.kind == LocKind::SVar || is_lock_kind(loc.kind))
        continue;
      TEvent x;
      x.ev = -1;
      x.thread = -1;
      x.seq = seq++;
      x.kind = LabelKind::lW;
      x.loc = static_cast<int>(l);
      x.wr = true;
      x.vw = SymVal::constant(loc.init);
      sealed.push_back(x);
    }
    std::map<int, int> tseq;
    for (TEvent e : p_.evs) {
      e.seq = tseq[e.thread]++;
      sealed.push_back(e);
    }
    p_.evs = std::move(sealed);

    // polls-from is forced: the i-th poll on a queue pair acknowledges the
    // i-th pollable write, which must exist, precede it, and carry the id
    // the program saw
    bool feasible = true;
    p_.pf.assign(p_.evs.size(), -1);
    std::map<std::pair<int, int>, std::pair<std::vector<int>, std::vector<int>>> qp;
    for (int i = 0; i < p_.n(); ++i) {
      const TEvent& e = p_.evs[i];
      if (detail::tso_pollable(e)) qp[{e.thread, e.qp_node}].first.push_back(i);
      if (e.kind == LabelKind::P) qp[{e.thread, e.qp_node}].second.push_back(i);
    }
    for (const auto& [key, wp] : qp) {
      const auto& [writes, polls] = wp;
      for (std::size_t i = 0; i < polls.size() && feasible; ++i) {
        if (i >= writes.size() || !p_.po(writes[i], polls[i])) {
          feasible = false;  // poll can never fire: no pre-execution
          break;
        }
        p_.pf[polls[i]] = writes[i];
        const UEvent& src = sx_.events[p_.evs[polls[i]].ev];
        if (src.reg >= 0 && src.out_const != p_.evs[p_.pf[polls[i]]].opid) feasible = false;
      }
    }

    if (feasible) {
      reads_.clear();
      for (int i = 0; i < p_.n(); ++i)
        if (p_.evs[i].rd) reads_.push_back(i);
      p_.rf.assign(p_.evs.size(), -1);
      rf(0);
    }
    p_.evs = std::move(saved);
  }

  void rf(std::size_t i) {
    if (stop_) return;
    if (i == reads_.size()) {
      for (const auto& [a, b] : diseqs_) {
        auto neq = p_.cells.known_neq(a, b);
        if (!neq || !*neq) return;
      }
      if (prune_) {
        for (const TEvent& e : p_.evs) {
          if (e.rd && !p_.cells.value(e.vr)) return;
          if (e.wr && !p_.cells.value(e.vw)) return;
        }
        if (!prune_partial()) return;
      }
      nfo_pairs_.clear();
      for (int a = 0; a < p_.n(); ++a) {
        const TEvent& ea = p_.evs[a];
        for (int b = 0; b < p_.n(); ++b) {
          if (a == b) continue;
          const TEvent& eb = p_.evs[b];
          if (ea.thread != eb.thread || ea.qp_node != eb.qp_node || ea.qp_node == 0) continue;
          bool local = ea.kind == LabelKind::nlR && eb.kind == LabelKind::nlW;
          bool remote = (ea.kind == LabelKind::nrR || ea.kind == LabelKind::narR) &&
                        (eb.kind == LabelKind::nrW || eb.kind == LabelKind::narW);
          if (local || remote) nfo_pairs_.emplace_back(a, b);
        }
      }
      p_.nfo.clear();
      nfo(0);
      return;
    }
    int r = reads_[i];
    const TEvent& re = p_.evs[r];
    for (int w = 0; w < p_.n() && !stop_; ++w) {
      const TEvent& we = p_.evs[w];
      if (!we.wr || we.loc != re.loc) continue;
      auto mark = p_.cells.mark();
      if (p_.cells.require_eq(re.vr, we.vw)) {
        p_.rf[r] = w;
        rf(i + 1);
      }
      p_.cells.undo(mark);
    }
  }

  bool prune_partial() { return check_tso(p_).consistent; }

  void nfo(std::size_t i) {
    if (stop_) return;
    if (i == nfo_pairs_.size()) {
      mo_keys_.clear();
      for (int w = 0; w < p_.n(); ++w)
        if (p_.evs[w].wr) mo_keys_[p_.evs[w].loc].push_back(w);
      mo(mo_keys_.begin());
      return;
    }
    auto [a, b] = nfo_pairs_[i];
    for (auto ori : {std::pair{a, b}, std::pair{b, a}}) {
      if (stop_) return;
      p_.nfo.push_back(ori);
      if (!prune_ || prune_partial()) nfo(i + 1);
      p_.nfo.pop_back();
    }
  }

  void mo(std::map<int, std::vector<int>>::iterator it) {
    if (stop_) return;
    if (it == mo_keys_.end()) {
      rao_nodes_.clear();
      for (int i = 0; i < p_.n(); ++i)
        if (p_.evs[i].kind == LabelKind::narR) rao_nodes_[p_.evs[i].qp_node].push_back(i);
      rao(rao_nodes_.begin());
      return;
    }
    int loc = it->first;
    auto next = std::next(it);
    // the initialising write comes first in every modification order
    int init = -1;
    std::vector<int> rest;
    for (int w : it->second) {
      if (p_.evs[w].ev < 0)
        init = w;
      else
        rest.push_back(w);
    }
    auto apply = [&](const std::vector<int>& perm) {
      std::vector<int> order;
      if (init >= 0) order.push_back(init);
      order.insert(order.end(), perm.begin(), perm.end());
      p_.mo[loc] = order;
      if (!prune_ || prune_partial()) mo(next);
      p_.mo.erase(loc);
      return !stop_;
    };
    if (rest.size() <= 1) {
      apply(rest);
      return;
    }
    for_each_permutation(rest, apply);
  }

  void rao(std::map<int, std::vector<int>>::iterator it) {
    if (stop_) return;
    if (it == rao_nodes_.end()) {
      emit();
      return;
    }
    int node = it->first;
    auto next = std::next(it);
    if (it->second.size() <= 1) {
      p_.rao[node] = it->second;
      rao(next);
      p_.rao.erase(node);
      return;
    }
    for_each_permutation(it->second, [&](const std::vector<int>& perm) {
      p_.rao[node] = perm;
      rao(next);
      p_.rao.erase(node);
      return !stop_;
    });
  }

  void emit() {
    if (++count_ > cap_) {
      capped_ = true;
      stop_ = true;
      return;
    }
    if (!sink_(p_)) stop_ = true;
  }

  const SymExec& sx_;
  const LitmusTest& t_;
  std::function<bool(TsoPreExec&)> sink_;
  std::size_t cap_;
  bool prune_;
  TsoPreExec p_;
  std::vector<std::pair<SymVal, SymVal>> diseqs_;
  std::vector<int> reads_;
  std::vector<std::pair<int, int>> nfo_pairs_;
  std::map<int, std::vector<int>> mo_keys_;
  std::map<int, std::vector<int>> rao_nodes_;
  std::size_t count_ = 0;
  bool capped_ = false;
  bool stop_ = false;
};

/// Outcome of one consistent tso pre-execution, over the vocabulary.
inline Outcome extract_tso_outcome(const TsoPreExec& p, const Vocabulary& v) {
  Outcome o(v.entries.size(), 0);
  for (std::size_t i = 0; i < v.entries.size(); ++i) {
    const Vocabulary::Entry& en = v.entries[i];
    if (en.kind == Vocabulary::Entry::Kind::Reg) {
      auto it = p.sx->final_regs.find(en.idx);
      if (it != p.sx->final_regs.end()) {
        auto val = p.cells.value(it->second);
        o[i] = val ? *val : 0;
      }
      continue;
    }
    Val result = p.test->locations[en.idx].init;
    auto it = p.mo.find(en.idx);
    if (it != p.mo.end() && !it->second.empty()) {
      auto val = p.cells.value(p.evs[it->second.back()].vw);
      result = val ? *val : result;
    }
    o[i] = result;
  }
  return o;
}

/// Declarative check of a tso-dialect test.
inline Verdict run_tso_decl_verdict(const LitmusTest& raw, const CheckOptions& opt = {}) {
  auto t0 = std::chrono::steady_clock::now();
  LitmusTest t = prepare_test(raw);
  Verdict v;
  v.test = t.name;
  v.model = "tso-decl";
  v.vocab = Vocabulary::of(t);
  if (!tso_compatible(t)) {
    v.error = "tso-decl expects a tso-dialect test";
    return v;
  }
  UnfoldStats ustats;
  bool capped = false;
  unfold_symbolic(
      t, opt.loop_bound,
      [&](const SymExec& sx) {
        if (sx.exhausted || capped) return;
        TsoEnumerator en(
            sx, t,
            [&](TsoPreExec& p) {
              ++v.stats.candidates;
              if (!check_tso(p).consistent) return true;
              ++v.stats.consistent;
              v.outcomes.insert(extract_tso_outcome(p, v.vocab));
              return true;
            },
            opt.candidate_cap - std::min(opt.candidate_cap, v.stats.candidates));
        if (!en.run()) capped = true;
      },
      &ustats);
  v.stats.paths = ustats.paths;
  v.stats.exhausted_paths = ustats.exhausted_paths;
  v.stats.star_capped = ustats.star_capped;
  v.resource_exceeded = capped;
  finalize_verdict(v, t);
  v.stats.time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  return v;
}

}  // namespace rdmalit

#endif  // RDMALIT_TSO_DECL_HPP_
