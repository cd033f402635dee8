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

#ifndef RDMALIT_EXEC_HPP_
#define RDMALIT_EXEC_HPP_

#include <map>
#include <optional>

#include "rdmalit/relation.hpp"
#include "rdmalit/stamps.hpp"
#include "rdmalit/unfold.hpp"

namespace rdmalit {

// ---------------------------------------------------------------------------
// Value cells. Each read subevent owns a cell; write values are affine
// expressions over cells (cell + offset). Reads-from assignment unifies the
// reader's cell with the writer's value; a union-find with offsets keeps this
// cheap and undoable.
// ---------------------------------------------------------------------------

class Cells {
 public:
  explicit Cells(int n) : parent_(n), off_(n, 0), val_(n), has_val_(n, false) {
    for (int i = 0; i < n; ++i) parent_[i] = i;
  }

  int size() const { return static_cast<int>(parent_.size()); }

  int fresh() {
    parent_.push_back(static_cast<int>(parent_.size()));
    off_.push_back(0);
    val_.push_back(0);
    has_val_.push_back(false);
    return static_cast<int>(parent_.size()) - 1;
  }

  /// value(i) = value(root) + offset; no path compression so operations can
  /// be undone via the trail.
  std::pair<int, Val> find(int i) const {
    Val off = 0;
    while (parent_[i] != i) {
      off += off_[i];
      i = parent_[i];
    }
    return {i, off};
  }

  std::optional<Val> value(int i) const {
    auto [r, off] = find(i);
    if (!has_val_[r]) return std::nullopt;
    return val_[r] + off;
  }

  std::optional<Val> value(const SymVal& v) const {
    if (v.concrete()) return v.c;
    auto x = value(v.slot);
    if (!x) return std::nullopt;
    return *x + v.c;
  }

  /// Asserts value(i) == v. Returns false on conflict.
  bool bind(int i, Val v) {
    auto [r, off] = find(i);
    if (has_val_[r]) return val_[r] + off == v;
    trail_.push_back({r, TrailOp::Value});
    has_val_[r] = true;
    val_[r] = v - off;
    return true;
  }

  /// Asserts value(a) == value(b) + delta.
  bool unify(int a, int b, Val delta) {
    auto [ra, offa] = find(a);
    auto [rb, offb] = find(b);
    // value(ra) + offa == value(rb) + offb + delta
    if (ra == rb) return offa == offb + delta;
    if (has_val_[ra] && has_val_[rb]) return val_[ra] + offa == val_[rb] + offb + delta;
    if (has_val_[ra]) {
      trail_.push_back({rb, TrailOp::Value});
      has_val_[rb] = true;
      val_[rb] = val_[ra] + offa - offb - delta;
      return true;
    }
    // attach ra under rb: value(ra) = value(rb) + (offb + delta - offa)
    trail_.push_back({ra, TrailOp::Parent});
    parent_[ra] = rb;
    off_[ra] = offb + delta - offa;
    return true;
  }

  /// Asserts value-equality of two symbolic values.
  bool require_eq(const SymVal& a, const SymVal& b) {
    if (a.concrete() && b.concrete()) return a.c == b.c;
    if (a.concrete()) return bind(b.slot, a.c - b.c);
    if (b.concrete()) return bind(a.slot, b.c - a.c);
    return unify(a.slot, b.slot, b.c - a.c);
  }

  /// Three-valued disequality: known-unequal, known-equal or undetermined.
  std::optional<bool> known_neq(const SymVal& a, const SymVal& b) const {
    auto va = value(a), vb = value(b);
    if (va && vb) return *va != *vb;
    if (!a.concrete() && !b.concrete()) {
      auto [ra, offa] = find(a.slot);
      auto [rb, offb] = find(b.slot);
      if (ra == rb) return offa + a.c != offb + b.c;
    }
    return std::nullopt;
  }

  std::size_t mark() const { return trail_.size(); }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      auto [i, op] = trail_.back();
      trail_.pop_back();
      if (op == TrailOp::Value)
        has_val_[i] = false;
      else
        parent_[i] = i;
    }
  }

 private:
  enum class TrailOp { Value, Parent };
  std::vector<int> parent_;
  std::vector<Val> off_;
  std::vector<Val> val_;
  std::vector<char> has_val_;
  std::vector<std::pair<int, TrailOp>> trail_;
};

// ---------------------------------------------------------------------------
// Subevents: one (event, stamp) pair, with its location, library, and value
// expressions. Shared-variable subevents carry the node whose copy they
// touch; their location key combines both.
// ---------------------------------------------------------------------------

struct Sub {
  int ev = -1;
  int thread = 0;
  Stamp stamp{};
  Lib lib = Lib::WaitRmw;
  int loc = -1;        // location index, -1 for fences/waits
  int copy_node = 0;   // shared-variable copy (brl), else 0
  bool rd = false, wr = false;
  SymVal vr, vw;
  int wid = -1;

  /// rf/mo/rb range over subevents with equal keys.
  long lockey() const { return loc < 0 ? -1 : (static_cast<long>(loc) << 8) | copy_node; }
};

/// One candidate execution: subevents plus all witness relations.
struct Candidate {
  const SymExec* sx = nullptr;
  const LitmusTest* test = nullptr;
  std::vector<Sub> subs;
  std::vector<int> ev_sub_begin;  // per event, first sub index (and sentinel)
  std::vector<char> success;      // per event: CAS/RCAS/ScCas took the success branch
  Cells cells{0};
  std::vector<std::pair<SymVal, SymVal>> diseqs;  // must differ once bound

  std::vector<int> rf;                     // per sub: source sub index or -1
  std::map<long, std::vector<int>> mo;     // per lockey: write subs in mo order
  std::vector<std::pair<int, int>> nfo;    // oriented NIC flush pairs (sub, sub)
  std::map<int, std::vector<int>> rao;     // per node: naRR subs in rao order
  std::map<int, std::vector<int>> lo;      // per lock location: acquire events in order

  int nsubs() const { return static_cast<int>(subs.size()); }
  bool po(int sa, int sb) const { return sx->po(subs[sa].ev, subs[sb].ev); }
  bool same_ev(int sa, int sb) const { return subs[sa].ev == subs[sb].ev; }

  Val init_of(long key) const {
    return key < 0 ? 0 : test->locations[static_cast<int>(key >> 8)].init;
  }
};

namespace detail {

inline int lock_home(const LitmusTest& t, int loc) { return t.locations[loc].node; }

/// Builds the subevent list for one event under a given success choice,
/// binding the value constraints the choice implies. Returns false when the
/// choice conflicts with already-bound values.
inline bool push_subs(Candidate& c, const LitmusTest& t, const UEvent& e, bool succ) {
  auto& subs = c.subs;
  Cells& cells = c.cells;
  int tn = t.threads[e.thread].node;
  auto mk = [&](StampKind k, int node, int loc, int copy) {
    Sub s;
    s.ev = e.eid;
    s.thread = e.thread;
    s.stamp = {k, node};
    s.lib = lib_of(e.op);
    s.loc = loc;
    s.copy_node = copy;
    s.wid = e.wid;
    return s;
  };
  switch (e.op) {
    case Op::CpuWrite: {
      Sub s = mk(StampKind::aCW, 0, e.loc, 0);
      s.wr = true;
      s.vw = e.v1;
      subs.push_back(s);
      return true;
    }
    case Op::CpuRead: {
      Sub s = mk(StampKind::aCR, 0, e.loc, 0);
      s.rd = true;
      s.vr = SymVal::of_slot(e.out_slot);
      subs.push_back(s);
      return true;
    }
    case Op::CpuCas: {
      SymVal out = SymVal::of_slot(e.out_slot);
      if (succ) {
        if (!cells.require_eq(out, e.v1)) return false;
        Sub s = mk(StampKind::aCAS, 0, e.loc, 0);
        s.rd = s.wr = true;
        s.vr = out;
        s.vw = e.v2;
        subs.push_back(s);
      } else {
        c.diseqs.emplace_back(out, e.v1);
        subs.push_back(mk(StampKind::aMF, 0, e.loc, 0));
        Sub s = mk(StampKind::aCR, 0, e.loc, 0);
        s.rd = true;
        s.vr = out;
        subs.push_back(s);
      }
      return true;
    }
    case Op::Mfence:
      subs.push_back(mk(StampKind::aMF, 0, -1, 0));
      return true;
    case Op::Put: {
      int n = t.locations[e.loc].node;
      SymVal v = SymVal::of_slot(cells.fresh());
      Sub r = mk(StampKind::nLR, n, e.loc2, 0);
      r.rd = true;
      r.vr = v;
      Sub w = mk(StampKind::nRW, n, e.loc, 0);
      w.wr = true;
      w.vw = v;
      subs.push_back(r);
      subs.push_back(w);
      return true;
    }
    case Op::Get: {
      int n = t.locations[e.loc2].node;
      SymVal v = SymVal::of_slot(cells.fresh());
      Sub r = mk(StampKind::nRR, n, e.loc2, 0);
      r.rd = true;
      r.vr = v;
      Sub w = mk(StampKind::nLW, n, e.loc, 0);
      w.wr = true;
      w.vw = v;
      subs.push_back(r);
      subs.push_back(w);
      return true;
    }
    case Op::Wait:
      subs.push_back(mk(StampKind::aWT, 0, -1, 0));
      return true;
    case Op::Rfence:
      subs.push_back(mk(StampKind::nF, e.node, -1, 0));
      return true;
    case Op::Rcas: {
      int n = t.locations[e.loc2].node;
      SymVal v = SymVal::of_slot(cells.fresh());
      Sub r = mk(StampKind::naRR, n, e.loc2, 0);
      r.rd = true;
      r.vr = v;
      if (succ) {
        if (!cells.require_eq(v, e.v1)) return false;
        subs.push_back(r);
        Sub w = mk(StampKind::nRW, n, e.loc2, 0);
        w.wr = true;
        w.vw = e.v2;
        subs.push_back(w);
      } else {
        c.diseqs.emplace_back(v, e.v1);
        subs.push_back(r);
      }
      Sub lw = mk(StampKind::nLW, n, e.loc, 0);
      lw.wr = true;
      lw.vw = v;
      subs.push_back(lw);
      return true;
    }
    case Op::Rfaa: {
      int n = t.locations[e.loc2].node;
      if (!e.v1.concrete())
        throw std::runtime_error("symbolic fetch-and-add increments are not supported");
      SymVal v = SymVal::of_slot(cells.fresh());
      Sub r = mk(StampKind::naRR, n, e.loc2, 0);
      r.rd = true;
      r.vr = v;
      Sub w = mk(StampKind::nRW, n, e.loc2, 0);
      w.wr = true;
      w.vw = v + e.v1.c;
      Sub lw = mk(StampKind::nLW, n, e.loc, 0);
      lw.wr = true;
      lw.vw = v;
      subs.push_back(r);
      subs.push_back(w);
      subs.push_back(lw);
      return true;
    }
    case Op::GFence:
      for (int n : e.nodes) subs.push_back(mk(StampKind::gF, n, -1, 0));
      return true;
    case Op::BrlWrite: {
      Sub s = mk(StampKind::aCW, 0, e.loc, tn);
      s.wr = true;
      s.vw = e.v1;
      subs.push_back(s);
      return true;
    }
    case Op::BrlRead: {
      Sub s = mk(StampKind::aCR, 0, e.loc, tn);
      s.rd = true;
      s.vr = SymVal::of_slot(e.out_slot);
      subs.push_back(s);
      return true;
    }
    case Op::BrlBcast: {
      for (int n : e.nodes) {
        SymVal v = SymVal::of_slot(cells.fresh());
        Sub r = mk(StampKind::nLR, n, e.loc, tn);
        r.rd = true;
        r.vr = v;
        Sub w = mk(StampKind::nRW, n, e.loc, n);
        w.wr = true;
        w.vw = v;
        subs.push_back(r);
        subs.push_back(w);
      }
      return true;
    }
    case Op::BrlWait:
      subs.push_back(mk(StampKind::aWT, 0, -1, 0));
      return true;
    case Op::AcqWl:
    case Op::AcqSl:
    case Op::AcqNl:
      subs.push_back(mk(StampKind::aMF, 0, e.loc, 0));
      return true;
    case Op::RelWl:
      subs.push_back(mk(StampKind::aCW, 0, e.loc, 0));
      return true;
    case Op::RelSl:
      for (int n = 1; n <= t.num_nodes; ++n) subs.push_back(mk(StampKind::gF, n, e.loc, 0));
      return true;
    case Op::RelNl: {
      int n = lock_home(t, e.loc);
      subs.push_back(mk(StampKind::nF, n, e.loc, 0));
      subs.push_back(mk(StampKind::nRW, n, e.loc, 0));
      return true;
    }
    case Op::ScWrite: {
      Sub s = mk(StampKind::aMF, 0, e.loc, 0);
      s.wr = true;
      s.vw = e.v1;
      subs.push_back(s);
      return true;
    }
    case Op::ScRead: {
      Sub s = mk(StampKind::aMF, 0, e.loc, 0);
      s.rd = true;
      s.vr = SymVal::of_slot(e.out_slot);
      subs.push_back(s);
      return true;
    }
    case Op::ScCas: {
      SymVal out = SymVal::of_slot(e.out_slot);
      Sub s = mk(StampKind::aMF, 0, e.loc, 0);
      s.rd = true;
      s.vr = out;
      if (succ) {
        if (!cells.require_eq(out, e.v1)) return false;
        s.wr = true;
        s.vw = e.v2;
      } else {
        c.diseqs.emplace_back(out, e.v1);
      }
      subs.push_back(s);
      return true;
    }
    case Op::ScFaa: {
      if (!e.v1.concrete())
        throw std::runtime_error("symbolic fetch-and-add increments are not supported");
      SymVal out = SymVal::of_slot(e.out_slot);
      Sub s = mk(StampKind::aMF, 0, e.loc, 0);
      s.rd = s.wr = true;
      s.vr = out;
      s.vw = out + e.v1.c;
      subs.push_back(s);
      return true;
    }
    case Op::Poll:
    case Op::SetAdd:
    case Op::SetRemove:
    case Op::SetIsEmpty:
      throw std::runtime_error("tso-dialect operation in a wait/library execution");
  }
  return false;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Candidate enumeration: stamp/success choices, then reads-from (the most
// value-constrained witness, resolved first so conflicting branches die
// early), then mo / nfo / rao / lo. The sink sees every locally well-formed
// candidate; it returns false to stop the enumeration.
// ---------------------------------------------------------------------------

/// Optional consistency-guided pruning hooks. Each hook may reject a partial
/// candidate whose already-fixed relations cannot extend to a consistent one;
/// the unpruned enumeration (empty guide) is the reference behaviour.
struct EnumGuide {
  std::function<bool(Candidate&)> after_rf;  // reads-from fully assigned
  std::function<bool(Candidate&)> nfo_step;  // after each flush-pair orientation
  std::function<bool(Candidate&)> mo_step;   // after each location's mo order
};

class CandidateEnumerator {
 public:
  CandidateEnumerator(const SymExec& sx, const LitmusTest& t,
                      std::function<bool(Candidate&)> sink, std::size_t cap = 10'000'000,
                      EnumGuide guide = {})
      : sx_(sx), t_(t), sink_(std::move(sink)), cap_(cap), guide_(std::move(guide)) {}

  /// Returns false when the candidate cap was hit.
  bool run() {
    c_.sx = &sx_;
    c_.test = &t_;
    c_.cells = Cells(sx_.n_slots);
    c_.success.assign(sx_.events.size(), 0);
    for (const SymConstraint& k : sx_.constraints) {
      if (k.eq) {
        if (!c_.cells.require_eq(k.l, k.r)) return true;  // infeasible path
      } else {
        c_.diseqs.emplace_back(k.l, k.r);
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
      c_.ev_sub_begin.clear();
      int si = 0;
      for (std::size_t e = 0; e < sx_.events.size(); ++e) {
        c_.ev_sub_begin.push_back(si);
        while (si < c_.nsubs() && c_.subs[si].ev == static_cast<int>(e)) ++si;
      }
      c_.ev_sub_begin.push_back(si);
      reads_.clear();
      for (int i = 0; i < c_.nsubs(); ++i)
        if (c_.subs[i].rd) reads_.push_back(i);
      c_.rf.assign(c_.subs.size(), -1);
      rf(0);
      return;
    }
    const UEvent& e = sx_.events[ev];
    bool branching = e.op == Op::CpuCas || e.op == Op::Rcas || e.op == Op::ScCas;
    for (int succ = 1; succ >= (branching ? 0 : 1); --succ) {
      auto mark = c_.cells.mark();
      std::size_t nsubs = c_.subs.size(), ndis = c_.diseqs.size();
      c_.success[ev] = static_cast<char>(succ);
      if (detail::push_subs(c_, t_, e, succ != 0)) events(ev + 1);
      c_.subs.resize(nsubs);
      c_.diseqs.resize(ndis);
      c_.cells.undo(mark);
      if (stop_) return;
    }
  }

  void rf(std::size_t i) {
    if (stop_) return;
    if (i == reads_.size()) {
      for (const auto& [a, b] : c_.diseqs) {
        auto neq = c_.cells.known_neq(a, b);
        if (!neq || !*neq) return;  // violated (or never bound: no witnesses)
      }
      if (guide_.after_rf && !guide_.after_rf(c_)) return;
      nfo_pairs_.clear();
      for (int a = 0; a < c_.nsubs(); ++a) {
        const Sub& sa = c_.subs[a];
        if (sa.lib != Lib::WaitRmw) continue;
        for (int b = 0; b < c_.nsubs(); ++b) {
          if (a == b) continue;
          const Sub& sb = c_.subs[b];
          if (sb.lib != Lib::WaitRmw || sa.thread != sb.thread ||
              sa.stamp.node != sb.stamp.node)
            continue;
          bool local = sa.stamp.kind == StampKind::nLR && sb.stamp.kind == StampKind::nLW;
          bool remote = (sa.stamp.kind == StampKind::nRR || sa.stamp.kind == StampKind::naRR) &&
                        sb.stamp.kind == StampKind::nRW;
          if (local || remote) nfo_pairs_.emplace_back(a, b);
        }
      }
      c_.nfo.clear();
      nfo(0);
      return;
    }
    int r = reads_[i];
    const Sub& rs = c_.subs[r];
    for (int w = 0; w < c_.nsubs() && !stop_; ++w) {
      const Sub& ws = c_.subs[w];
      if (!ws.wr || ws.lib != rs.lib || ws.lockey() != rs.lockey()) continue;
      auto mark = c_.cells.mark();
      if (c_.cells.require_eq(rs.vr, ws.vw)) {
        c_.rf[r] = w;
        rf(i + 1);
      }
      c_.cells.undo(mark);
    }
    if (stop_) return;
    // no source: the read returns the location's initial value
    auto mark = c_.cells.mark();
    if (c_.cells.require_eq(rs.vr, SymVal::constant(c_.init_of(rs.lockey())))) {
      c_.rf[r] = -1;
      rf(i + 1);
    }
    c_.cells.undo(mark);
  }

  void nfo(std::size_t i) {
    if (stop_) return;
    if (i == nfo_pairs_.size()) {
      mo_keys_.clear();
      for (int w = 0; w < c_.nsubs(); ++w)
        if (c_.subs[w].wr) mo_keys_[c_.subs[w].lockey()].push_back(w);
      mo(mo_keys_.begin());
      return;
    }
    auto [a, b] = nfo_pairs_[i];
    for (auto ori : {std::pair{a, b}, std::pair{b, a}}) {
      if (stop_) return;
      c_.nfo.push_back(ori);
      if (!guide_.nfo_step || guide_.nfo_step(c_)) nfo(i + 1);
      c_.nfo.pop_back();
    }
  }

  void mo(std::map<long, std::vector<int>>::iterator it) {
    if (stop_) return;
    if (it == mo_keys_.end()) {
      rao_nodes_.clear();
      for (int s = 0; s < c_.nsubs(); ++s)
        if (c_.subs[s].stamp.kind == StampKind::naRR)
          rao_nodes_[c_.subs[s].stamp.node].push_back(s);
      rao(rao_nodes_.begin());
      return;
    }
    long key = it->first;
    auto next = std::next(it);
    if (it->second.size() <= 1) {
      c_.mo[key] = it->second;
      mo(next);
      c_.mo.erase(key);
      return;
    }
    for_each_permutation(it->second, [&](const std::vector<int>& perm) {
      c_.mo[key] = perm;
      if (!guide_.mo_step || guide_.mo_step(c_)) mo(next);
      c_.mo.erase(key);
      return !stop_;
    });
  }

  void rao(std::map<int, std::vector<int>>::iterator it) {
    if (stop_) return;
    if (it == rao_nodes_.end()) {
      lock_locs_.clear();
      for (const UEvent& e : sx_.events)
        if (e.op == Op::AcqWl || e.op == Op::AcqSl || e.op == Op::AcqNl)
          lock_locs_[e.loc].push_back(e.eid);
      lo(lock_locs_.begin());
      return;
    }
    int node = it->first;
    auto next = std::next(it);
    if (it->second.size() <= 1) {
      c_.rao[node] = it->second;
      rao(next);
      c_.rao.erase(node);
      return;
    }
    for_each_permutation(it->second, [&](const std::vector<int>& perm) {
      c_.rao[node] = perm;
      rao(next);
      c_.rao.erase(node);
      return !stop_;
    });
  }

  void lo(std::map<int, std::vector<int>>::iterator it) {
    if (stop_) return;
    if (it == lock_locs_.end()) {
      emit();
      return;
    }
    int loc = it->first;
    auto next = std::next(it);
    if (it->second.size() <= 1) {
      c_.lo[loc] = it->second;
      lo(next);
      c_.lo.erase(loc);
      return;
    }
    for_each_permutation(it->second, [&](const std::vector<int>& perm) {
      c_.lo[loc] = perm;
      lo(next);
      c_.lo.erase(loc);
      return !stop_;
    });
  }

  void emit() {
    if (++count_ > cap_) {
      capped_ = true;
      stop_ = true;
      return;
    }
    if (!sink_(c_)) stop_ = true;
  }

  const SymExec& sx_;
  const LitmusTest& t_;
  std::function<bool(Candidate&)> sink_;
  std::size_t cap_;
  EnumGuide guide_;
  Candidate c_;
  std::vector<int> reads_;
  std::map<long, std::vector<int>> mo_keys_;
  std::vector<std::pair<int, int>> nfo_pairs_;
  std::map<int, std::vector<int>> rao_nodes_;
  std::map<int, std::vector<int>> lock_locs_;
  std::size_t count_ = 0;
  bool capped_ = false;
  bool stop_ = false;
};

}  // namespace rdmalit

#endif  // RDMALIT_EXEC_HPP_
