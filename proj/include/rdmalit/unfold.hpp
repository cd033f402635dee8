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

#ifndef RDMALIT_UNFOLD_HPP_
#define RDMALIT_UNFOLD_HPP_

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include "rdmalit/litmus.hpp"

namespace rdmalit {

// ---------------------------------------------------------------------------
// Symbolic values. A slot stands for the output of one value-returning call
// (CPU/brl/SC reads and RMWs); everything else is a constant. Slot values get
// fixed later, either by enumeration over the value domain (the plain
// `unfold`) or by reads-from assignment during witness search.
// ---------------------------------------------------------------------------

struct SymVal {
  int slot = -1;  // -1: constant
  Val c = 0;      // constant, or offset added to the slot value

  static SymVal constant(Val v) { return {-1, v}; }
  static SymVal of_slot(int s, Val add = 0) { return {s, add}; }
  bool concrete() const { return slot < 0; }
  SymVal operator+(Val d) const { return {slot, c + d}; }
  bool operator==(const SymVal&) const = default;
  bool operator<(const SymVal& o) const { return std::tie(slot, c) < std::tie(o.slot, o.c); }
};

struct SymConstraint {
  SymVal l;
  bool eq = true;
  SymVal r;
};

/// One method-call instance of a plain execution.
struct UEvent {
  int thread = 0;
  int eid = 0;  // global id; po-ordered within a thread by construction
  Op op{};
  int loc = -1, loc2 = -1;
  SymVal v1, v2;         // evaluated value operands
  int out_slot = -1;     // output slot for value-returning calls
  Val out_const = 0;     // concrete output otherwise (poll ids, set queries)
  int wid = -1;
  int node = 0;
  std::vector<int> nodes;
  int opid = -1;  // unique identifier of tso remote operations
  int reg = -1;   // register the output is bound to, if any
};

struct SymExec {
  std::vector<UEvent> events;
  std::vector<SymConstraint> constraints;
  std::map<int, SymVal> final_regs;  // register index -> final value
  int n_slots = 0;
  bool exhausted = false;  // some spin loop ran out of iteration budget

  bool po(int a, int b) const { return events[a].thread == events[b].thread && a < b; }
};

/// A fully concrete plain execution: a SymExec whose slots are all bound.
struct PlainExecution {
  SymExec sym;
  std::vector<Val> slots;

  Val value_of(const SymVal& v) const { return v.concrete() ? v.c : slots[v.slot] + v.c; }
};

// ---------------------------------------------------------------------------
// Test preparation: resolves surface conveniences the semantics does not know
// about (literal put payloads become constant aux locations, broadcast
// default target sets become explicit).
// ---------------------------------------------------------------------------

namespace detail {

inline void prepare_body(Body& b, LitmusTest& t, int thread_node) {
  for (Stmt& s : b) {
    if (s.kind == Stmt::Kind::Instr) {
      Instr& in = s.instr;
      if (in.op == Op::Put && in.src_is_lit) {
        Val v = in.a.lit;
        std::string name = "_k" + std::to_string(v) + "_n" + std::to_string(thread_node);
        int l = t.find_loc(name);
        if (l < 0) {
          Location c;
          c.name = name;
          c.node = thread_node;
          c.init = v;
          c.aux = true;
          l = t.add_loc(c);
        }
        in.loc2 = l;
        in.src_is_lit = false;
      }
      if (in.op == Op::BrlBcast && in.nodes.empty()) {
        for (int n = 1; n <= t.num_nodes; ++n)
          if (n != thread_node) in.nodes.push_back(n);
      }
    }
    prepare_body(s.a, t, thread_node);
    prepare_body(s.b, t, thread_node);
  }
}

}  // namespace detail

/// Normalises a parsed test for checking.
inline LitmusTest prepare_test(LitmusTest t) {
  for (Thread& th : t.threads) detail::prepare_body(th.body, t, th.node);
  return t;
}

// ---------------------------------------------------------------------------
// Value domain: constants appearing in the test plus zero, closed under the
// additions the test can perform (fetch-and-add increments and register
// offsets). The closure depth is bounded by the number of adding sites times
// the loop bound, so every value a bounded unfolding can compute is covered.
// ---------------------------------------------------------------------------

namespace detail {

inline void collect_consts(const Body& b, std::set<Val>& consts, std::set<Val>& addends,
                           int& add_sites) {
  for (const Stmt& s : b) {
    if (s.kind == Stmt::Kind::Instr) {
      const Instr& in = s.instr;
      for (const ValExpr* v : {&in.a, &in.b}) {
        if (v->is_reg) {
          if (v->lit != 0) {
            addends.insert(v->lit);
            ++add_sites;
          }
        } else {
          consts.insert(v->lit);
        }
      }
      if ((in.op == Op::Rfaa || in.op == Op::ScFaa) && !in.a.is_reg) {
        addends.insert(in.a.lit);
        ++add_sites;
      }
    }
    if (s.kind == Stmt::Kind::If) {
      for (const ValExpr* v : {&s.cond.lhs, &s.cond.rhs})
        if (!v->is_reg) consts.insert(v->lit);
    }
    collect_consts(s.a, consts, addends, add_sites);
    collect_consts(s.b, consts, addends, add_sites);
  }
}

}  // namespace detail

inline std::vector<Val> value_domain(const LitmusTest& t, int loop_bound) {
  std::set<Val> d = {0};
  std::set<Val> addends;
  int add_sites = 0;
  for (const Location& l : t.locations)
    if (l.kind != LocKind::Set) d.insert(l.init);
  for (const Assertion& a : t.assertions) {
    std::function<void(const BoolExpr&)> walk = [&](const BoolExpr& e) {
      if (e.kind == BoolExpr::Kind::Cmp) d.insert(e.value);
      for (const BoolExpr& k : e.kids) walk(k);
    };
    walk(a.expr);
  }
  for (const Thread& th : t.threads) detail::collect_consts(th.body, d, addends, add_sites);
  int steps = std::min(add_sites * std::max(loop_bound, 1) + 1, 16);
  for (int i = 0; i < steps && d.size() < 128; ++i) {
    std::set<Val> next = d;
    for (Val v : d)
      for (Val a : addends) next.insert(v + a);
    if (next == d) break;
    d.swap(next);
  }
  return {d.begin(), d.end()};
}

// ---------------------------------------------------------------------------
// Per-thread symbolic unfolding. Enumerates control paths; each path carries
// its events, the branch constraints taken, and the final register values.
// ---------------------------------------------------------------------------

namespace detail {

struct ThreadPath {
  std::vector<UEvent> events;
  std::vector<SymConstraint> constraints;
  std::map<int, SymVal> env;
  bool exhausted = false;
};

class ThreadUnfolder {
 public:
  ThreadUnfolder(const LitmusTest& t, int thread, int loop_bound)
      : t_(t), thread_(thread), bound_(loop_bound) {}

  // Slots are numbered from `first_slot`; returns one past the largest used.
  int run(int first_slot, std::vector<ThreadPath>& out) {
    next_slot_ = max_slot_ = first_slot;
    out_ = &out;
    State st;
    st.frames.push_back({&t_.threads[thread_].body, 0, nullptr, 0});
    explore(std::move(st));
    return max_slot_;
  }

  bool hit_star_cap() const { return star_capped_; }

 private:
  struct Frame {
    const Body* body;
    std::size_t idx;
    const Stmt* loop;  // set when this frame is one iteration of that loop
    int remaining;     // loop iterations left after this one
  };

  struct State {
    std::vector<Frame> frames;
    ThreadPath path;
    std::map<int, std::multiset<Val>> sets;
    int remote_ops = 0;
  };

  void explore(State st) {
    for (;;) {
      if (st.frames.empty()) {
        out_->push_back(std::move(st.path));
        return;
      }
      Frame& f = st.frames.back();
      if (f.idx >= f.body->size()) {
        if (f.loop) {
          const Stmt* lp = f.loop;
          int rem = f.remaining;
          st.frames.pop_back();
          return reenter_loop(std::move(st), lp, rem);
        }
        st.frames.pop_back();
        continue;
      }
      const Stmt& s = (*f.body)[f.idx++];
      switch (s.kind) {
        case Stmt::Kind::Instr:
          if (!emit(s.instr, st)) return;
          continue;
        case Stmt::Kind::Choice: {
          State other = st;
          other.frames.push_back({&s.b, 0, nullptr, 0});
          st.frames.push_back({&s.a, 0, nullptr, 0});
          explore(std::move(other));
          continue;
        }
        case Stmt::Kind::If: {
          SymVal l = eval(s.cond.lhs, st.path), r = eval(s.cond.rhs, st.path);
          int dec = decide(l, s.cond.eq, r);
          if (dec > 0) {
            st.frames.push_back({&s.a, 0, nullptr, 0});
          } else if (dec < 0) {
            st.frames.push_back({&s.b, 0, nullptr, 0});
          } else {
            State other = st;
            other.path.constraints.push_back({l, !s.cond.eq, r});
            other.frames.push_back({&s.b, 0, nullptr, 0});
            st.path.constraints.push_back({l, s.cond.eq, r});
            st.frames.push_back({&s.a, 0, nullptr, 0});
            explore(std::move(other));
          }
          continue;
        }
        case Stmt::Kind::Loop:
          return reenter_loop(std::move(st), &s, bound_);
        case Stmt::Kind::Break: {
          // unwind to just past the innermost enclosing loop
          while (!st.frames.empty() && !st.frames.back().loop) st.frames.pop_back();
          if (st.frames.empty()) return;  // stray break: drop the path
          st.frames.pop_back();
          continue;
        }
      }
    }
  }

  // About to run another iteration of `lp` (with `remaining` still allowed),
  // or to stop: star loops may stop now, spin loops stop only via break.
  void reenter_loop(State st, const Stmt* lp, int remaining) {
    if (lp->star) {
      State exit = st;
      explore(std::move(exit));
      if (remaining <= 0) {
        if (!lp->a.empty()) star_capped_ = true;
        return;
      }
    } else if (remaining <= 0) {
      st.path.exhausted = true;
      out_->push_back(std::move(st.path));
      return;
    }
    st.frames.push_back({&lp->a, 0, lp, remaining - 1});
    explore(std::move(st));
  }

  SymVal eval(const ValExpr& v, const ThreadPath& p) const {
    if (!v.is_reg) return SymVal::constant(v.lit);
    auto it = p.env.find(v.reg);
    SymVal base = it == p.env.end() ? SymVal::constant(0) : it->second;
    return base + v.lit;
  }

  // 0 = unknown, 1 = holds, -1 = fails
  static int decide(const SymVal& l, bool eq, const SymVal& r) {
    if (l.concrete() && r.concrete()) return ((l.c == r.c) == eq) ? 1 : -1;
    if (l.slot == r.slot) return ((l.c == r.c) == eq) ? 1 : -1;
    return 0;
  }

  // Returns false when this path can be discarded outright.
  bool emit(const Instr& in, State& st) {
    UEvent e;
    e.thread = thread_;
    e.op = in.op;
    e.loc = in.loc;
    e.loc2 = in.loc2;
    e.wid = in.wid;
    e.node = in.node;
    e.nodes = in.nodes;
    e.reg = in.reg;
    e.v1 = eval(in.a, st.path);
    e.v2 = eval(in.b, st.path);

    switch (in.op) {
      case Op::CpuRead:
      case Op::CpuCas:
      case Op::BrlRead:
      case Op::ScRead:
      case Op::ScCas:
      case Op::ScFaa:
        e.out_slot = next_slot_++;
        max_slot_ = std::max(max_slot_, next_slot_);
        if (in.reg >= 0) st.path.env[in.reg] = SymVal::of_slot(e.out_slot);
        break;
      case Op::Put:
      case Op::Get:
      case Op::Rcas:
      case Op::Rfaa:
        e.opid = thread_ * 4096 + (++st.remote_ops);
        if (in.reg >= 0) st.path.env[in.reg] = SymVal::constant(e.opid);
        break;
      case Op::Poll:
        // The poll returns the id of the operation it acknowledges; enumerate
        // the candidates only when the program binds the result.
        if (in.reg >= 0) {
          std::vector<Val> cands;
          for (const UEvent& q : st.path.events)
            if (q.opid >= 0 && remote_target(q) == in.node) cands.push_back(q.opid);
          if (cands.empty()) return false;  // such a poll can never fire
          for (std::size_t k = 1; k < cands.size(); ++k) {
            State other = st;
            UEvent e2 = e;
            e2.out_const = cands[k];
            other.path.env[in.reg] = SymVal::constant(cands[k]);
            e2.eid = static_cast<int>(other.path.events.size());
            other.path.events.push_back(std::move(e2));
            explore(std::move(other));
          }
          e.out_const = cands[0];
          st.path.env[in.reg] = SymVal::constant(cands[0]);
        }
        break;
      case Op::SetAdd:
      case Op::SetRemove: {
        if (!e.v1.concrete()) throw std::runtime_error("set operations need concrete ids");
        auto& ms = st.sets[in.loc];
        if (in.op == Op::SetAdd) {
          ms.insert(e.v1.c);
        } else {
          auto it = ms.find(e.v1.c);
          if (it != ms.end()) ms.erase(it);
        }
        break;
      }
      case Op::SetIsEmpty:
        e.out_const = st.sets[in.loc].empty() ? 1 : 0;
        if (in.reg >= 0) st.path.env[in.reg] = SymVal::constant(e.out_const);
        break;
      default:
        break;
    }
    e.eid = static_cast<int>(st.path.events.size());
    st.path.events.push_back(std::move(e));
    return true;
  }

  int remote_target(const UEvent& q) const {
    switch (q.op) {
      case Op::Put:
        return t_.locations[q.loc].node;
      case Op::Get:
      case Op::Rcas:
      case Op::Rfaa:
        return t_.locations[q.loc2].node;
      default:
        return 0;
    }
  }

  const LitmusTest& t_;
  int thread_;
  int bound_;
  int next_slot_ = 0;
  int max_slot_ = 0;
  bool star_capped_ = false;
  std::vector<ThreadPath>* out_ = nullptr;
};

}  // namespace detail

struct UnfoldStats {
  std::size_t paths = 0;             // symbolic executions produced
  std::size_t exhausted_paths = 0;   // spin loop ran out of budget
  bool star_capped = false;          // star loop behaviours were truncated
};

/// Enumerates the symbolic plain executions of a prepared test: one per
/// combination of per-thread control paths. Slot values stay free.
inline void unfold_symbolic(const LitmusTest& t, int loop_bound,
                            const std::function<void(const SymExec&)>& sink,
                            UnfoldStats* stats = nullptr) {
  std::vector<std::vector<detail::ThreadPath>> per_thread(t.threads.size());
  int slot_base = 0;
  bool capped = false;
  for (std::size_t ti = 0; ti < t.threads.size(); ++ti) {
    detail::ThreadUnfolder u(t, static_cast<int>(ti), loop_bound);
    slot_base = u.run(slot_base, per_thread[ti]);
    capped |= u.hit_star_cap();
  }
  if (stats) stats->star_capped = capped;

  SymExec ex;
  ex.n_slots = slot_base;
  std::function<void(std::size_t)> rec = [&](std::size_t ti) {
    if (ti == t.threads.size()) {
      if (stats) {
        ++stats->paths;
        if (ex.exhausted) ++stats->exhausted_paths;
      }
      sink(ex);
      return;
    }
    for (const detail::ThreadPath& p : per_thread[ti]) {
      std::size_t ne = ex.events.size(), nc = ex.constraints.size();
      auto regs_snapshot = ex.final_regs;
      bool was_exhausted = ex.exhausted;
      for (UEvent e : p.events) {
        e.eid = static_cast<int>(ex.events.size());
        ex.events.push_back(std::move(e));
      }
      ex.constraints.insert(ex.constraints.end(), p.constraints.begin(), p.constraints.end());
      for (const auto& [r, v] : p.env) ex.final_regs[r] = v;
      ex.exhausted |= p.exhausted;
      rec(ti + 1);
      ex.events.resize(ne);
      ex.constraints.resize(nc);
      ex.final_regs = std::move(regs_snapshot);
      ex.exhausted = was_exhausted;
    }
  };
  if (t.threads.empty()) {
    if (stats) stats->paths = 1;
    sink(ex);
  } else {
    rec(0);
  }
}

/// The plain-execution semantics: every control path, with every read output
/// enumerated over the value domain. Exhausted spin-loop paths are not
/// proper terminations and are skipped.
inline std::vector<PlainExecution> unfold(const LitmusTest& t, int loop_bound) {
  std::vector<Val> domain = value_domain(t, loop_bound);
  std::vector<PlainExecution> out;
  unfold_symbolic(t, loop_bound, [&](const SymExec& sx) {
    if (sx.exhausted) return;
    // collect the slots this execution actually uses
    std::vector<int> used;
    for (const UEvent& e : sx.events)
      if (e.out_slot >= 0) used.push_back(e.out_slot);
    std::vector<Val> assign(sx.n_slots, 0);
    auto value_of = [&](const SymVal& v) { return v.concrete() ? v.c : assign[v.slot] + v.c; };
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == used.size()) {
        for (const SymConstraint& c : sx.constraints)
          if ((value_of(c.l) == value_of(c.r)) != c.eq) return;
        PlainExecution pe;
        pe.sym = sx;
        pe.slots = assign;
        out.push_back(std::move(pe));
        return;
      }
      for (Val v : domain) {
        assign[used[i]] = v;
        rec(i + 1);
      }
    };
    rec(0);
  });
  return out;
}

}  // namespace rdmalit

#endif  // RDMALIT_UNFOLD_HPP_
