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

#ifndef RDMALIT_LIB_SPECS_HPP_
#define RDMALIT_LIB_SPECS_HPP_

#include "rdmalit/exec.hpp"
#include "rdmalit/relation.hpp"

namespace rdmalit {

// Per-library consistency. Each builder derives the library's relations from
// the candidate's witnesses, accumulates its synchronisation order into `so`,
// and reports whether the library-internal conditions hold. The composed
// check then closes so with the global preserved program order.

namespace detail {

inline bool is_acquire(Op op) { return op == Op::AcqWl || op == Op::AcqSl || op == Op::AcqNl; }
inline bool is_release(Op op) { return op == Op::RelWl || op == Op::RelSl || op == Op::RelNl; }

/// Preserved program order over all subevents (stamp order applied to
/// program-order-related events, across libraries).
inline Rel ppo_global(const Candidate& c) {
  int n = c.nsubs();
  Rel r(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (c.po(a, b) && sto(c.subs[a].stamp, c.subs[b].stamp)) r.add(a, b);
  return r;
}

/// Position map of the mo order for one location key.
inline std::vector<std::pair<int, int>> mo_pairs(const std::vector<int>& order) {
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = i + 1; j < order.size(); ++j) out.emplace_back(order[i], order[j]);
  return out;
}

struct ReadEdges {
  Rel rf, rfi, rfe, rb, mo;
};

/// rf / rb / mo edges restricted to one library, with the convention that a
/// read without a source read the location's initial value (and so
/// reads-before every same-location write).
inline ReadEdges value_edges(const Candidate& c, Lib lib) {
  int n = c.nsubs();
  ReadEdges e{Rel(n), Rel(n), Rel(n), Rel(n), Rel(n)};
  for (const auto& [key, order] : c.mo) {
    if (order.empty() || c.subs[order[0]].lib != lib) continue;
    for (auto [a, b] : mo_pairs(order)) e.mo.add(a, b);
  }
  for (int r = 0; r < n; ++r) {
    const Sub& rs = c.subs[r];
    if (!rs.rd || rs.lib != lib) continue;
    int w = c.rf[r];
    if (w >= 0) {
      e.rf.add(w, r);
      bool internal = c.subs[w].stamp.kind == StampKind::aCW &&
                      rs.stamp.kind == StampKind::aCR && c.po(w, r);
      (internal ? e.rfi : e.rfe).add(w, r);
    }
    // reads-before: every same-location write mo-after the source (or all of
    // them when reading the initial value), minus the identity
    auto it = c.mo.find(rs.lockey());
    if (it == c.mo.end()) continue;
    const std::vector<int>& order = it->second;
    std::size_t from = 0;
    if (w >= 0) {
      while (from < order.size() && order[from] != w) ++from;
      ++from;
    }
    for (std::size_t i = from; i < order.size(); ++i)
      if (order[i] != r) e.rb.add(r, order[i]);
  }
  return e;
}

// -------------------------------------------------------------------------
// waitrmw (Def 3.3)
// -------------------------------------------------------------------------

struct WaitRels {
  Rel iso, pfg, pfp, ippo, ib, so;
  ReadEdges val;
  bool ib_ok = false;
};

inline WaitRels waitrmw_relations(const Candidate& c) {
  int n = c.nsubs();
  WaitRels w{Rel(n), Rel(n), Rel(n), Rel(n), Rel(n), Rel(n), value_edges(c, Lib::WaitRmw)};
  const SymExec& sx = *c.sx;

  // iso: within-event ordering (read part before write parts; failed CPU CAS
  // fences before reading)
  for (std::size_t ev = 0; ev < sx.events.size(); ++ev) {
    int b = c.ev_sub_begin[ev], e2 = c.ev_sub_begin[ev + 1];
    if (b >= e2 || c.subs[b].lib != Lib::WaitRmw) continue;
    if (sx.events[ev].op == Op::CpuCas && !c.success[ev]) {
      w.iso.add(b, b + 1);  // aMF before aCR
      continue;
    }
    for (int i = b; i < e2; ++i) {
      StampKind k = c.subs[i].stamp.kind;
      if (k != StampKind::nLR && k != StampKind::nRR && k != StampKind::naRR) continue;
      for (int j = b; j < e2; ++j)
        if (c.subs[j].stamp.kind == StampKind::nLW || c.subs[j].stamp.kind == StampKind::nRW)
          w.iso.add(i, j);
    }
  }

  // pfg / pfp: wid-matched NIC writes before the wait on the same wid
  for (int a = 0; a < n; ++a) {
    const Sub& sa = c.subs[a];
    if (sa.lib != Lib::WaitRmw || sa.wid < 0) continue;
    bool g = sa.stamp.kind == StampKind::nLW, p = sa.stamp.kind == StampKind::nRW;
    if (!g && !p) continue;
    for (int b = 0; b < n; ++b) {
      const Sub& sb = c.subs[b];
      if (sb.lib == Lib::WaitRmw && sx.events[sb.ev].op == Op::Wait && sb.wid == sa.wid &&
          c.po(a, b))
        (g ? w.pfg : w.pfp).add(a, b);
    }
  }

  // ippo: ppo plus issue-order extensions (writes issue before later reads
  // and waits; NIC writes start before a later remote fence to that node)
  for (int a = 0; a < n; ++a) {
    const Sub& sa = c.subs[a];
    if (sa.lib != Lib::WaitRmw) continue;
    for (int b = 0; b < n; ++b) {
      const Sub& sb = c.subs[b];
      if (sb.lib != Lib::WaitRmw || !c.po(a, b)) continue;
      if (sto(sa.stamp, sb.stamp)) w.ippo.add(a, b);
      if (sa.stamp.kind == StampKind::aCW &&
          (sb.stamp.kind == StampKind::aCR || sb.stamp.kind == StampKind::aWT))
        w.ippo.add(a, b);
      if ((sa.stamp.kind == StampKind::nRW || sa.stamp.kind == StampKind::nLW) &&
          sb.stamp.kind == StampKind::nF && sa.stamp.node == sb.stamp.node)
        w.ippo.add(a, b);
    }
  }

  // fri: same-thread reads-before between CPU accesses
  Rel fri(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (w.val.rb.test(a, b) && c.subs[a].stamp.kind == StampKind::aCR &&
          c.subs[b].stamp.kind == StampKind::aCW &&
          c.subs[a].thread == c.subs[b].thread && !c.same_ev(a, b))
        fri.add(a, b);

  Rel nfo(n);
  for (auto [a, b] : c.nfo) nfo.add(a, b);

  w.ib = w.ippo | w.iso | w.val.rf | w.pfg | w.pfp | nfo | fri;
  w.ib.close();
  w.ib_ok = w.ib.irreflexive();

  // rao and the remote-RMW mutual-atomicity component
  Rel rao(n), atomic(n);
  for (const auto& [node, order] : c.rao)
    for (std::size_t i = 0; i < order.size(); ++i)
      for (std::size_t j = i + 1; j < order.size(); ++j) rao.add(order[i], order[j]);
  for (std::size_t ev = 0; ev < sx.events.size(); ++ev) {
    int b = c.ev_sub_begin[ev], e2 = c.ev_sub_begin[ev + 1];
    int rr = -1, rw = -1;
    for (int i = b; i < e2; ++i) {
      if (c.subs[i].stamp.kind == StampKind::naRR) rr = i;
      if (c.subs[i].stamp.kind == StampKind::nRW) rw = i;
    }
    if (rr < 0 || rw < 0) continue;
    for (int j = 0; j < n; ++j)
      if (rao.test(rr, j)) atomic.add(rw, j);
  }

  w.so = w.iso | w.val.rfe | w.pfg | nfo | w.val.rb | w.val.mo | rao | atomic;
  // instantaneous subevents carry their issue order into so
  for (int a = 0; a < n; ++a) {
    const Sub& sa = c.subs[a];
    if (sa.lib != Lib::WaitRmw) continue;
    StampKind k = sa.stamp.kind;
    if (k == StampKind::aCW || k == StampKind::nLW || k == StampKind::nRW) continue;
    for (int b = 0; b < n; ++b)
      if (w.ib.test(a, b)) w.so.add(a, b);
  }
  return w;
}

/// waitrmw-consistency of the restriction: issued-before is irreflexive.
inline bool waitrmw_consistent(const Candidate& c, Rel& so_accum) {
  WaitRels w = waitrmw_relations(c);
  if (!w.ib_ok) return false;
  so_accum |= w.so;
  return true;
}

// -------------------------------------------------------------------------
// brl shared variables (per-node copies)
// -------------------------------------------------------------------------

inline bool brl_consistent(const Candidate& c, Rel& so_accum) {
  int n = c.nsubs();
  ReadEdges val = value_edges(c, Lib::Brl);

  // reads-before may not contradict program order between CPU accesses
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (val.rb.test(a, b) && c.subs[a].stamp.kind == StampKind::aCR &&
          c.subs[b].stamp.kind == StampKind::aCW && c.po(b, a))
        return false;

  Rel iso(n), pf(n);
  const SymExec& sx = *c.sx;
  for (std::size_t ev = 0; ev < sx.events.size(); ++ev) {
    if (sx.events[ev].op != Op::BrlBcast) continue;
    int b = c.ev_sub_begin[ev], e2 = c.ev_sub_begin[ev + 1];
    for (int i = b; i < e2; ++i)
      for (int j = b; j < e2; ++j)
        if (c.subs[i].stamp.kind == StampKind::nLR && c.subs[j].stamp.kind == StampKind::nRW &&
            c.subs[i].stamp.node == c.subs[j].stamp.node)
          iso.add(i, j);
  }
  for (int a = 0; a < n; ++a) {
    const Sub& sa = c.subs[a];
    if (sa.lib != Lib::Brl || sa.stamp.kind != StampKind::nLR || sa.wid < 0) continue;
    for (int b = 0; b < n; ++b) {
      const Sub& sb = c.subs[b];
      if (sb.lib == Lib::Brl && sx.events[sb.ev].op == Op::BrlWait && sb.wid == sa.wid &&
          c.po(a, b))
        pf.add(a, b);
    }
  }
  so_accum |= iso | val.rfe | pf | val.rb | val.mo;
  return true;
}

// -------------------------------------------------------------------------
// Locks (Def 4.1 well-formedness; wlock/slock/nlock synchronisation)
// -------------------------------------------------------------------------

/// Every acquire is immediately followed, per lock location and thread, by
/// its release and vice versa.
inline bool lock_well_formed(const Candidate& c, Lib lib) {
  const SymExec& sx = *c.sx;
  std::map<std::pair<int, int>, int> state;  // (thread, loc) -> expecting (0=acq, 1=rel)
  for (const UEvent& e : sx.events) {
    if (lib_of(e.op) != lib) continue;
    if (!is_acquire(e.op) && !is_release(e.op)) continue;
    auto key = std::make_pair(e.thread, e.loc);
    int& st = state[key];
    if (is_acquire(e.op)) {
      if (st != 0) return false;
      st = 1;
    } else {
      if (st != 1) return false;
      st = 0;
    }
  }
  for (const auto& [k, st] : state)
    if (st != 0) return false;
  return true;
}

/// Common lock synchronisation: release subevents of `rel_kind` synchronise
/// with the fence subevent of every lo-later acquisition of the same lock.
inline void lock_chain_so(const Candidate& c, Lib lib, StampKind rel_kind, Rel& so) {
  const SymExec& sx = *c.sx;
  for (const auto& [loc, acq_order] : c.lo) {
    if (acq_order.empty()) continue;
    if (lib_of(sx.events[acq_order[0]].op) != lib) continue;
    std::map<int, std::size_t> pos;
    for (std::size_t i = 0; i < acq_order.size(); ++i) pos[acq_order[i]] = i;
    for (std::size_t ev = 0; ev < sx.events.size(); ++ev) {
      const UEvent& e = sx.events[ev];
      if (!is_release(e.op) || lib_of(e.op) != lib || e.loc != loc) continue;
      // matching acquire: the latest program-order-earlier event on this lock
      int match = -1;
      for (int q = static_cast<int>(ev) - 1; q >= 0; --q) {
        const UEvent& a = sx.events[q];
        if (a.thread == e.thread && lib_of(a.op) == lib && a.loc == loc) {
          if (is_acquire(a.op)) match = q;
          break;
        }
      }
      if (match < 0) continue;
      std::size_t mpos = pos[match];
      for (std::size_t i = mpos + 1; i < acq_order.size(); ++i) {
        int acq_ev = acq_order[i];
        int acq_sub = c.ev_sub_begin[acq_ev];  // the aMF subevent
        for (int s = c.ev_sub_begin[ev]; s < c.ev_sub_begin[ev + 1]; ++s)
          if (c.subs[s].stamp.kind == rel_kind) so.add(s, acq_sub);
      }
    }
  }
}

inline bool wlock_consistent(const Candidate& c, Rel& so_accum) {
  if (!lock_well_formed(c, Lib::WLock)) return true;  // any behaviour allowed
  lock_chain_so(c, Lib::WLock, StampKind::aCW, so_accum);
  return true;
}

inline bool slock_consistent(const Candidate& c, Rel& so_accum) {
  if (!lock_well_formed(c, Lib::SLock)) return true;
  lock_chain_so(c, Lib::SLock, StampKind::gF, so_accum);
  return true;
}

inline bool nlock_consistent(const Candidate& c, Rel& so_accum) {
  if (!lock_well_formed(c, Lib::NLock)) return true;
  // internal edge of each release: the NIC fence before the remote write
  const SymExec& sx = *c.sx;
  for (std::size_t ev = 0; ev < sx.events.size(); ++ev) {
    if (sx.events[ev].op != Op::RelNl) continue;
    int b = c.ev_sub_begin[ev];
    so_accum.add(b, b + 1);  // nF before nRW, as pushed
  }
  lock_chain_so(c, Lib::NLock, StampKind::nRW, so_accum);
  return true;
}

// -------------------------------------------------------------------------
// strl (SC library)
// -------------------------------------------------------------------------

inline bool strl_consistent(const Candidate& c, Rel& so_accum) {
  int n = c.nsubs();
  ReadEdges val = value_edges(c, Lib::Strl);
  Rel po(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (c.subs[a].lib == Lib::Strl && c.subs[b].lib == Lib::Strl && c.po(a, b)) po.add(a, b);
  so_accum |= po | val.rf | val.mo | val.rb;
  return true;
}

}  // namespace detail

/// Library-consistency of the candidate's restriction to `lib` (the caller
/// accumulates each library's synchronisation order for the composed check).
inline bool library_consistent(const Candidate& c, Lib lib, Rel& so_accum) {
  switch (lib) {
    case Lib::WaitRmw:
      return detail::waitrmw_consistent(c, so_accum);
    case Lib::Brl:
      return detail::brl_consistent(c, so_accum);
    case Lib::WLock:
      return detail::wlock_consistent(c, so_accum);
    case Lib::SLock:
      return detail::slock_consistent(c, so_accum);
    case Lib::NLock:
      return detail::nlock_consistent(c, so_accum);
    case Lib::Strl:
      return detail::strl_consistent(c, so_accum);
    case Lib::TsoCore:
      return false;  // tso programs go through the tso checkers
  }
  return false;
}

/// Straightforward reimplementation of Def 4.1 over an event list, for
/// callers that do not have a candidate at hand.
inline bool lock_well_formed_events(const SymExec& sx, Lib lib) {
  Candidate c;
  c.sx = &sx;
  return detail::lock_well_formed(c, lib);
}

/// Can the partially-built candidate still extend to a consistent one? Every
/// relation used here only grows as later witnesses are fixed, so rejecting
/// on a cycle is safe.
inline bool partially_consistent(const Candidate& c) {
  detail::WaitRels w = detail::waitrmw_relations(c);
  if (!w.ib_ok) return false;
  Rel so = w.so;
  if (!detail::brl_consistent(c, so)) return false;
  detail::strl_consistent(c, so);
  so |= detail::ppo_global(c);
  so.close();
  return so.irreflexive();
}

/// Consistency-guided pruning for the candidate enumerator. A read or write
/// whose value never got bound sits on a value-dependency cycle, which always
/// induces an issued-before cycle, so those branches die immediately.
inline EnumGuide make_consistency_guide() {
  EnumGuide g;
  g.after_rf = [](Candidate& c) {
    for (const Sub& s : c.subs) {
      if (s.rd && !c.cells.value(s.vr)) return false;
      if (s.wr && !c.cells.value(s.vw)) return false;
    }
    return partially_consistent(c);
  };
  g.nfo_step = [](Candidate& c) { return partially_consistent(c); };
  g.mo_step = [](Candidate& c) { return partially_consistent(c); };
  return g;
}

}  // namespace rdmalit

#endif  // RDMALIT_LIB_SPECS_HPP_
