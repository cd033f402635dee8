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

#ifndef RDMALIT_LIB_IMPLS_HPP_
#define RDMALIT_LIB_IMPLS_HPP_

#include <functional>

#include "rdmalit/litmus.hpp"

namespace rdmalit {

// Source-to-source inlining of the reference lock/SC implementations, and the
// wait-to-poll translation. All transforms allocate hygienic auxiliary names
// (underscore-prefixed, collision-checked) and mark them as auxiliary so they
// stay out of reported outcomes.

namespace detail {

class Inliner {
 public:
  explicit Inliner(LitmusTest t) : t_(std::move(t)) {}

  LitmusTest take() {
    if (t_.dialect != Dialect::Tso) {
      bool lib = false;
      std::function<void(const Body&)> scan = [&](const Body& b) {
        for (const Stmt& s : b) {
          if (s.kind == Stmt::Kind::Instr && lib_of(s.instr.op) != Lib::WaitRmw) lib = true;
          scan(s.a);
          scan(s.b);
        }
      };
      for (const Thread& th : t_.threads) scan(th.body);
      t_.dialect = lib ? Dialect::Library : Dialect::Wait;
    }
    return std::move(t_);
  }

  int aux_loc(const std::string& name, int node, Val init, LocKind kind = LocKind::Plain) {
    int l = t_.find_loc(name);
    if (l >= 0) {
      if (!t_.locations[l].aux)
        throw std::runtime_error("auxiliary location name collides with '" + name + "'");
      return l;
    }
    Location loc;
    loc.name = name;
    loc.node = kind == LocKind::SVar ? 0 : node;
    loc.init = init;
    loc.kind = kind;
    loc.aux = true;
    return t_.add_loc(loc);
  }

  int aux_reg(int thread) {
    return t_.add_reg("_r" + std::to_string(reg_counter_++), thread, true);
  }

  int fresh_wid() { return t_.add_wid("_w" + std::to_string(wid_counter_++)); }

  void rewrite_threads(const std::function<void(int, const Stmt&, Body&)>& fn) {
    for (std::size_t ti = 0; ti < t_.threads.size(); ++ti)
      t_.threads[ti].body = rewrite_body(t_.threads[ti].body, static_cast<int>(ti), fn);
  }

  LitmusTest& test() { return t_; }

 private:
  Body rewrite_body(const Body& b, int thread,
                    const std::function<void(int, const Stmt&, Body&)>& fn) {
    Body out;
    for (const Stmt& s : b) {
      if (s.kind == Stmt::Kind::Instr) {
        fn(thread, s, out);
      } else {
        Stmt copy = s;
        copy.a = rewrite_body(s.a, thread, fn);
        copy.b = rewrite_body(s.b, thread, fn);
        out.push_back(std::move(copy));
      }
    }
    return out;
  }

  LitmusTest t_;
  int reg_counter_ = 0;
  int wid_counter_ = 0;
};

inline Stmt instr_of(Instr in) {
  Stmt s;
  s.kind = Stmt::Kind::Instr;
  s.instr = std::move(in);
  return s;
}

inline Instr op3(Op op, int loc, int loc2, int wid) {
  Instr in;
  in.op = op;
  in.loc = loc;
  in.loc2 = loc2;
  in.wid = wid;
  return in;
}

inline Stmt if_eq_break(int reg, ValExpr rhs) {
  Stmt s;
  s.kind = Stmt::Kind::If;
  s.cond = {ValExpr::of_reg(reg), true, rhs};
  Stmt br;
  br.kind = Stmt::Kind::Break;
  s.a.push_back(br);
  return s;
}

}  // namespace detail

/// Weak-lock inlining: a distributed ticket lock over a remote fetch-and-add
/// dispenser and per-thread shared release variables. Acquire fetches a
/// ticket, then scans every thread's release variable for its turn; release
/// writes ticket+1 locally and broadcasts it to all other nodes.
inline LitmusTest inline_wlock(const LitmusTest& src) {
  detail::Inliner in(src);
  LitmusTest& t = in.test();
  int T = static_cast<int>(t.threads.size());

  struct LockAux {
    int dispenser;
    std::vector<int> release_vars;  // per thread index
  };
  std::map<int, LockAux> aux;
  auto lock_aux = [&](int lock) -> LockAux& {
    auto it = aux.find(lock);
    if (it != aux.end()) return it->second;
    const std::string n = t.locations[lock].name;
    LockAux a;
    a.dispenser = in.aux_loc("_wl_" + n + "_a", t.locations[lock].node, 0);
    for (int i = 0; i < T; ++i)
      a.release_vars.push_back(
          in.aux_loc("_wl_" + n + "_t" + std::to_string(i + 1), 0, 0, LocKind::SVar));
    return aux.emplace(lock, std::move(a)).first->second;
  };
  std::map<std::pair<int, int>, int> tickets;  // (thread, lock) -> p^t_x
  auto ticket_loc = [&](int thread, int lock) {
    auto key = std::make_pair(thread, lock);
    auto it = tickets.find(key);
    if (it != tickets.end()) return it->second;
    int l = in.aux_loc("_wl_" + t.locations[lock].name + "_p" + std::to_string(thread + 1),
                       t.threads[thread].node, 0);
    return tickets.emplace(key, l).first->second;
  };

  in.rewrite_threads([&](int thread, const Stmt& s, Body& out) {
    const Instr& i = s.instr;
    if (i.op == Op::AcqWl) {
      LockAux& a = lock_aux(i.loc);
      int p = ticket_loc(thread, i.loc);
      int d = in.fresh_wid();
      out.push_back(detail::instr_of([&] {
        Instr r = detail::op3(Op::Rfaa, p, a.dispenser, d);
        r.a = ValExpr::literal(1);
        return r;
      }()));
      out.push_back(detail::instr_of(detail::op3(Op::Wait, -1, -1, d)));
      int v = in.aux_reg(thread);
      out.push_back(detail::instr_of([&] {
        Instr r;
        r.op = Op::CpuRead;
        r.loc = p;
        r.reg = v;
        return r;
      }()));
      Stmt spin;
      spin.kind = Stmt::Kind::Loop;
      spin.star = false;
      for (int k = 0; k < T; ++k) {
        int rk = in.aux_reg(thread);
        Instr rd;
        rd.op = Op::BrlRead;
        rd.loc = a.release_vars[k];
        rd.reg = rk;
        spin.a.push_back(detail::instr_of(rd));
        spin.a.push_back(detail::if_eq_break(rk, ValExpr::of_reg(v)));
      }
      out.push_back(std::move(spin));
    } else if (i.op == Op::RelWl) {
      LockAux& a = lock_aux(i.loc);
      int p = ticket_loc(thread, i.loc);
      int v = in.aux_reg(thread);
      out.push_back(detail::instr_of([&] {
        Instr r;
        r.op = Op::CpuRead;
        r.loc = p;
        r.reg = v;
        return r;
      }()));
      out.push_back(detail::instr_of([&] {
        Instr r;
        r.op = Op::BrlWrite;
        r.loc = a.release_vars[thread];
        r.a = ValExpr::of_reg(v, 1);
        return r;
      }()));
      out.push_back(detail::instr_of([&] {
        Instr r;
        r.op = Op::BrlBcast;
        r.loc = a.release_vars[thread];
        r.wid = in.fresh_wid();  // never waited on
        for (int n = 1; n <= t.num_nodes; ++n)
          if (n != t.threads[thread].node) r.nodes.push_back(n);
        return r;
      }()));
    } else {
      out.push_back(s);
    }
  });
  return in.take();
}

/// Strong-lock inlining: a weak lock whose release is preceded by a global
/// fence towards every node.
inline LitmusTest inline_slock(const LitmusTest& src) {
  detail::Inliner in(src);
  LitmusTest& t = in.test();
  in.rewrite_threads([&](int, const Stmt& s, Body& out) {
    const Instr& i = s.instr;
    if (i.op == Op::AcqSl) {
      Instr a = i;
      a.op = Op::AcqWl;
      out.push_back(detail::instr_of(a));
    } else if (i.op == Op::RelSl) {
      Instr g;
      g.op = Op::GFence;
      for (int n = 1; n <= t.num_nodes; ++n) g.nodes.push_back(n);
      out.push_back(detail::instr_of(g));
      Instr r = i;
      r.op = Op::RelWl;
      out.push_back(detail::instr_of(r));
    } else {
      out.push_back(s);
    }
  });
  for (Location& l : in.test().locations)
    if (l.kind == LocKind::LockSl) l.kind = LocKind::LockWl;
  return in.take();
}

/// Node-lock inlining: a centralised ticket lock with the dispenser and
/// release counter on the lock's node, acquired through remote RMWs and
/// released with a remote-fenced put.
inline LitmusTest inline_nlock(const LitmusTest& src) {
  detail::Inliner in(src);
  LitmusTest& t = in.test();

  struct LockAux {
    int dispenser, release;
  };
  std::map<int, LockAux> aux;
  auto lock_aux = [&](int lock) -> LockAux& {
    auto it = aux.find(lock);
    if (it != aux.end()) return it->second;
    const std::string n = t.locations[lock].name;
    int home = t.locations[lock].node;
    LockAux a{in.aux_loc("_nl_" + n + "_a", home, 0), in.aux_loc("_nl_" + n + "_r", home, 0)};
    return aux.emplace(lock, a).first->second;
  };
  std::map<std::pair<int, int>, int> tickets;
  auto ticket_loc = [&](int thread, int lock) {
    auto key = std::make_pair(thread, lock);
    auto it = tickets.find(key);
    if (it != tickets.end()) return it->second;
    int l = in.aux_loc("_nl_" + t.locations[lock].name + "_p" + std::to_string(thread + 1),
                       t.threads[thread].node, 0);
    return tickets.emplace(key, l).first->second;
  };

  in.rewrite_threads([&](int thread, const Stmt& s, Body& out) {
    const Instr& i = s.instr;
    if (i.op == Op::AcqNl) {
      LockAux& a = lock_aux(i.loc);
      int p = ticket_loc(thread, i.loc);
      int d = in.fresh_wid();
      out.push_back(detail::instr_of([&] {
        Instr r = detail::op3(Op::Rfaa, p, a.dispenser, d);
        r.a = ValExpr::literal(1);
        return r;
      }()));
      out.push_back(detail::instr_of(detail::op3(Op::Wait, -1, -1, d)));
      int v = in.aux_reg(thread);
      out.push_back(detail::instr_of([&] {
        Instr r;
        r.op = Op::CpuRead;
        r.loc = p;
        r.reg = v;
        return r;
      }()));
      Stmt spin;
      spin.kind = Stmt::Kind::Loop;
      spin.star = false;
      int d2 = in.fresh_wid();
      spin.a.push_back(detail::instr_of(detail::op3(Op::Get, p, a.release, d2)));
      spin.a.push_back(detail::instr_of(detail::op3(Op::Wait, -1, -1, d2)));
      int rk = in.aux_reg(thread);
      spin.a.push_back(detail::instr_of([&] {
        Instr r;
        r.op = Op::CpuRead;
        r.loc = p;
        r.reg = rk;
        return r;
      }()));
      spin.a.push_back(detail::if_eq_break(rk, ValExpr::of_reg(v)));
      out.push_back(std::move(spin));
      out.push_back(detail::instr_of([&] {
        Instr r;
        r.op = Op::CpuWrite;
        r.loc = p;
        r.a = ValExpr::of_reg(v, 1);
        return r;
      }()));
    } else if (i.op == Op::RelNl) {
      LockAux& a = lock_aux(i.loc);
      int p = ticket_loc(thread, i.loc);
      out.push_back(detail::instr_of([&] {
        Instr r;
        r.op = Op::Rfence;
        r.node = t.locations[i.loc].node;
        return r;
      }()));
      out.push_back(detail::instr_of(detail::op3(Op::Put, a.release, p, in.fresh_wid())));
    } else {
      out.push_back(s);
    }
  });
  return in.take();
}

/// SC inlining: every SC location becomes a plain location protected by a
/// node lock on its node; writes put without waiting, reads/RMWs wait after
/// releasing the lock and then read the fetched value locally.
inline LitmusTest inline_sc(const LitmusTest& src) {
  detail::Inliner in(src);
  LitmusTest& t = in.test();

  std::map<int, int> lock_of;  // sc loc -> nlock loc
  auto sc_lock = [&](int loc) {
    auto it = lock_of.find(loc);
    if (it != lock_of.end()) return it->second;
    int l = in.aux_loc("_sc_" + t.locations[loc].name + "_l", t.locations[loc].node, 0,
                       LocKind::LockNl);
    return lock_of.emplace(loc, l).first->second;
  };
  std::map<int, int> read_buf;  // thread -> r_t
  auto rt_loc = [&](int thread) {
    auto it = read_buf.find(thread);
    if (it != read_buf.end()) return it->second;
    int l = in.aux_loc("_sc_r" + std::to_string(thread + 1), t.threads[thread].node, 0);
    return read_buf.emplace(thread, l).first->second;
  };
  std::map<std::pair<int, int>, int> put_buf;  // (thread, loc) -> p^t_x
  auto pt_loc = [&](int thread, int loc) {
    auto key = std::make_pair(thread, loc);
    auto it = put_buf.find(key);
    if (it != put_buf.end()) return it->second;
    int l = in.aux_loc(
        "_sc_" + t.locations[loc].name + "_p" + std::to_string(thread + 1),
        t.threads[thread].node, 0);
    return put_buf.emplace(key, l).first->second;
  };

  in.rewrite_threads([&](int thread, const Stmt& s, Body& out) {
    const Instr& i = s.instr;
    auto acq = [&](int loc) {
      out.push_back(detail::instr_of([&] {
        Instr r;
        r.op = Op::AcqNl;
        r.loc = sc_lock(loc);
        return r;
      }()));
    };
    auto rel = [&](int loc) {
      out.push_back(detail::instr_of([&] {
        Instr r;
        r.op = Op::RelNl;
        r.loc = sc_lock(loc);
        return r;
      }()));
    };
    auto wait_and_read = [&](int wid, int reg) {
      out.push_back(detail::instr_of(detail::op3(Op::Wait, -1, -1, wid)));
      out.push_back(detail::instr_of([&] {
        Instr r;
        r.op = Op::CpuRead;
        r.loc = rt_loc(thread);
        r.reg = reg;
        return r;
      }()));
    };
    switch (i.op) {
      case Op::ScWrite: {
        acq(i.loc);
        int p = pt_loc(thread, i.loc);
        out.push_back(detail::instr_of([&] {
          Instr r;
          r.op = Op::CpuWrite;
          r.loc = p;
          r.a = i.a;
          return r;
        }()));
        out.push_back(detail::instr_of(detail::op3(Op::Put, i.loc, p, in.fresh_wid())));
        rel(i.loc);
        return;
      }
      case Op::ScRead: {
        acq(i.loc);
        int d = in.fresh_wid();
        out.push_back(detail::instr_of(detail::op3(Op::Get, rt_loc(thread), i.loc, d)));
        rel(i.loc);
        wait_and_read(d, i.reg);
        return;
      }
      case Op::ScCas: {
        acq(i.loc);
        int d = in.fresh_wid();
        out.push_back(detail::instr_of([&] {
          Instr r = detail::op3(Op::Rcas, rt_loc(thread), i.loc, d);
          r.a = i.a;
          r.b = i.b;
          return r;
        }()));
        rel(i.loc);
        wait_and_read(d, i.reg);
        return;
      }
      case Op::ScFaa: {
        acq(i.loc);
        int d = in.fresh_wid();
        out.push_back(detail::instr_of([&] {
          Instr r = detail::op3(Op::Rfaa, rt_loc(thread), i.loc, d);
          r.a = i.a;
          return r;
        }()));
        rel(i.loc);
        wait_and_read(d, i.reg);
        return;
      }
      default:
        out.push_back(s);
        return;
    }
  });
  for (Location& l : in.test().locations)
    if (l.kind == LocKind::Sc) l.kind = LocKind::Plain;
  return in.take();
}

/// Wait-to-poll translation: every remote operation records its returned
/// identifier in a per-(wid, node) set; a wait polls each node until the
/// wid's set for that node drains, removing polled identifiers from all of
/// the thread's sets.
inline LitmusTest translate_wait_to_tso(const LitmusTest& src) {
  if (src.dialect == Dialect::Library)
    throw std::runtime_error("translate expects a wait-dialect test (inline libraries first)");
  detail::Inliner in(src);
  LitmusTest& t = in.test();

  // threads must use disjoint work identifiers
  std::map<int, int> wid_owner;
  std::function<void(const Body&, int)> scan = [&](const Body& b, int thread) {
    for (const Stmt& s : b) {
      if (s.kind == Stmt::Kind::Instr && s.instr.wid >= 0) {
        auto [it, fresh] = wid_owner.emplace(s.instr.wid, thread);
        if (!fresh && it->second != thread)
          throw std::runtime_error("work identifier '" + t.wids[s.instr.wid] +
                                   "' is shared across threads");
      }
      scan(s.a, thread);
      scan(s.b, thread);
    }
  };
  for (std::size_t ti = 0; ti < t.threads.size(); ++ti)
    scan(t.threads[ti].body, static_cast<int>(ti));

  std::map<std::pair<int, int>, int> sets;  // (wid, node) -> set location
  auto set_loc = [&](int wid, int node, int thread) {
    auto key = std::make_pair(wid, node);
    auto it = sets.find(key);
    if (it != sets.end()) return it->second;
    int l = in.aux_loc("_s_" + t.wids[wid] + "_" + std::to_string(node),
                       t.threads[thread].node, 0, LocKind::Set);
    return sets.emplace(key, l).first->second;
  };
  std::map<int, std::set<int>> thread_wids;
  for (const auto& [w, th] : wid_owner) thread_wids[th].insert(w);

  in.rewrite_threads([&](int thread, const Stmt& s, Body& out) {
    Instr i = s.instr;
    switch (i.op) {
      case Op::Put:
      case Op::Get:
      case Op::Rcas:
      case Op::Rfaa: {
        int target =
            t.locations[i.op == Op::Put ? i.loc : i.loc2].node;
        int wid = i.wid;
        i.wid = -1;
        if (wid >= 0) {
          int r = in.aux_reg(thread);
          i.reg = r;
          out.push_back(detail::instr_of(i));
          Instr add;
          add.op = Op::SetAdd;
          add.loc = set_loc(wid, target, thread);
          add.a = ValExpr::of_reg(r);
          out.push_back(detail::instr_of(add));
        } else {
          out.push_back(detail::instr_of(i));
        }
        return;
      }
      case Op::Wait: {
        for (int n = 1; n <= t.num_nodes; ++n) {
          Stmt spin;
          spin.kind = Stmt::Kind::Loop;
          spin.star = false;
          int e = in.aux_reg(thread);
          Instr q;
          q.op = Op::SetIsEmpty;
          q.loc = set_loc(i.wid, n, thread);
          q.reg = e;
          spin.a.push_back(detail::instr_of(q));
          spin.a.push_back(detail::if_eq_break(e, ValExpr::literal(1)));
          int v = in.aux_reg(thread);
          Instr p;
          p.op = Op::Poll;
          p.node = n;
          p.reg = v;
          spin.a.push_back(detail::instr_of(p));
          for (int w : thread_wids[thread]) {
            Instr rm;
            rm.op = Op::SetRemove;
            rm.loc = set_loc(w, n, thread);
            rm.a = ValExpr::of_reg(v);
            spin.a.push_back(detail::instr_of(rm));
          }
          out.push_back(std::move(spin));
        }
        return;
      }
      default:
        out.push_back(s);
        return;
    }
  });
  in.test().dialect = Dialect::Tso;
  return in.take();
}

}  // namespace rdmalit

#endif  // RDMALIT_LIB_IMPLS_HPP_
