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

#ifndef RDMALIT_OP_SIM_HPP_
#define RDMALIT_OP_SIM_HPP_

#include <chrono>
#include <cstring>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "rdmalit/tso_decl.hpp"
#include "rdmalit/unfold.hpp"
#include "rdmalit/verdict.hpp"

namespace rdmalit {

// Operational tso machine: per-thread store buffers, per-node remote-atomic
// locks, and one pipe/wbR/wbL queue-pair triple per (thread, remote node).
// Exploration is breadth-first over canonicalised states with deduplication.

namespace opsim {

// Queue entries. Queues are vectors with index 0 oldest; a rule that matches
// "alpha . entry . beta" sees beta as the strictly older suffix.
struct Entry {
  enum class Kind : std::uint8_t {
    CpuWrite,   // store buffer: x := v
    PendPut,    // put whose local read is pending (dst, src)
    PendGet,    // get whose remote read is pending (dst, src)
    PendRcas,   // remote cas awaiting its read (dst, src, exp=a, upd=b)
    PendRfaa,   // remote faa awaiting its read (dst, src, add=a)
    RemW,       // NIC remote write y := v
    AtomW,      // NIC remote atomic write y :=_A v
    LocW,       // NIC local write x := v
    AckP,       // put acknowledgement
    Cn,         // completion notification
    Rfence,
  };
  Kind kind{};
  int loc = -1, loc2 = -1;
  Val a = 0, b = 0;
  int id = -1;  // operation identifier (remote ops, acks, notifications)

  bool operator==(const Entry&) const = default;
};

struct QuPair {
  std::vector<Entry> pipe, wbr, wbl;
  bool operator==(const QuPair&) const = default;
};

struct Frame {
  int body = 0;  // body id (registered per test)
  int idx = 0;
  int loop = -1;  // loop body id when this frame is an iteration, else -1
  int remaining = 0;
  bool operator==(const Frame&) const = default;
};

struct ThreadState {
  std::vector<Frame> frames;
  std::vector<std::pair<int, Val>> regs;            // sorted by register
  std::vector<std::pair<int, std::vector<Val>>> sets;  // sorted by set location
  int ops_issued = 0;
  bool operator==(const ThreadState&) const = default;
};

struct State {
  std::vector<ThreadState> threads;
  std::vector<std::vector<Entry>> sb;  // per thread
  std::vector<Val> mem;
  std::vector<char> atomics;            // per node, 1 = busy
  std::vector<std::vector<QuPair>> qp;  // [thread][node-1]
  bool operator==(const State&) const = default;
};

inline void encode(const State& s, std::string& out) {
  out.clear();
  auto put = [&](long long v) { out.append(reinterpret_cast<const char*>(&v), sizeof v); };
  auto put_queue = [&](const std::vector<Entry>& es) {
    put(static_cast<long long>(es.size()));
    for (const Entry& e : es) {
      put(static_cast<int>(e.kind));
      put(e.loc);
      put(e.loc2);
      put(e.a);
      put(e.b);
      put(e.id);
    }
  };
  for (const ThreadState& t : s.threads) {
    put(static_cast<long long>(t.frames.size()));
    for (const Frame& f : t.frames) {
      put(f.body);
      put(f.idx);
      put(f.loop);
      put(f.remaining);
    }
    put(static_cast<long long>(t.regs.size()));
    for (auto& [r, v] : t.regs) {
      put(r);
      put(v);
    }
    put(static_cast<long long>(t.sets.size()));
    for (auto& [l, vs] : t.sets) {
      put(l);
      put(static_cast<long long>(vs.size()));
      for (Val v : vs) put(v);
    }
    put(t.ops_issued);
  }
  for (const auto& buf : s.sb) put_queue(buf);
  for (Val m : s.mem) put(m);
  for (char a : s.atomics) put(a);
  for (const auto& per_thread : s.qp)
    for (const QuPair& q : per_thread) {
      put_queue(q.pipe);
      put_queue(q.wbr);
      put_queue(q.wbl);
    }
}

}  // namespace opsim

struct OpOutcomes {
  std::set<Outcome> outcomes;
  CheckStats stats;
  bool state_cap_hit = false;
  bool invariant_violation = false;
  std::string error;
  // one witness trace (rule names) per reachable outcome, when requested
  std::map<Outcome, std::vector<std::string>> traces;
};

/// Exhaustive reachability of the operational machine.
class OpExplorer {
 public:
  OpExplorer(const LitmusTest& test, const CheckOptions& opt, bool want_traces = false)
      : t_(prepare_test(test)), opt_(opt), want_traces_(want_traces) {
    vocab_ = Vocabulary::of(t_);
    register_bodies();
  }

  const Vocabulary& vocab() const { return vocab_; }

  OpOutcomes run() {
    OpOutcomes out;
    if (!tso_compatible(t_)) {
      out.error = "the operational machine runs tso-dialect tests";
      return out;
    }
    auto t0 = std::chrono::steady_clock::now();
    opsim::State init = initial_state();
    bool init_ok = true;
    for (std::size_t ti = 0; ti < init.threads.size() && init_ok; ++ti)
      init_ok = normalize_or_flag(init, ti);
    if (init_ok) push_state(std::move(init), -1, "init");
    std::size_t head = 0;
    while (head < states_.size()) {
      if (states_.size() > opt_.state_cap) {
        out.state_cap_hit = true;
        break;
      }
      const std::size_t cur = head++;
      succ_.clear();
      expand(states_[cur]);
      if (succ_.empty()) {
        if (quiescent(states_[cur])) {
          Outcome o = outcome_of(states_[cur]);
          out.outcomes.insert(o);
          if (want_traces_ && !out.traces.count(o)) out.traces[o] = trace_of(cur);
        } else {
          ++out.stats.deadlocks;
        }
        continue;
      }
      for (auto& [st, rule] : succ_) {
        if (!check_invariants(st)) {
          out.invariant_violation = true;
          out.error = "machine invariant violated after " + rule;
          return out;
        }
        push_state(std::move(st), static_cast<long>(cur), rule);
      }
    }
    out.stats.states = states_.size();
    out.stats.exhausted_paths = exhausted_drops_;
    out.stats.star_capped = star_capped_;
    out.stats.time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    return out;
  }

 private:
  using Entry = opsim::Entry;
  using EK = opsim::Entry::Kind;

  void register_bodies() {
    std::function<void(const Body&)> reg = [&](const Body& b) {
      bodies_.push_back(&b);
      for (const Stmt& s : b) {
        reg(s.a);
        reg(s.b);
      }
    };
    for (const Thread& th : t_.threads) reg(th.body);
    for (std::size_t i = 0; i < bodies_.size(); ++i) body_id_[bodies_[i]] = static_cast<int>(i);
    int max_remote = 0;
    for (const Thread& th : t_.threads) {
      int count = 0;
      std::function<void(const Body&)> scan = [&](const Body& b) {
        for (const Stmt& s : b) {
          if (s.kind == Stmt::Kind::Instr &&
              (s.instr.op == Op::Put || s.instr.op == Op::Get || s.instr.op == Op::Rcas ||
               s.instr.op == Op::Rfaa))
            ++count;
          scan(s.a);
          scan(s.b);
        }
      };
      scan(th.body);
      max_remote = std::max(max_remote, count);
    }
    spin_budget_ = std::max(opt_.loop_bound, max_remote + 1);
  }

  opsim::State initial_state() {
    opsim::State s;
    s.threads.resize(t_.threads.size());
    s.sb.resize(t_.threads.size());
    s.mem.resize(t_.locations.size(), 0);
    for (std::size_t l = 0; l < t_.locations.size(); ++l) s.mem[l] = t_.locations[l].init;
    s.atomics.assign(t_.num_nodes, 0);
    s.qp.assign(t_.threads.size(), std::vector<opsim::QuPair>(t_.num_nodes));
    for (std::size_t ti = 0; ti < t_.threads.size(); ++ti)
      s.threads[ti].frames.push_back({body_id_.at(&t_.threads[ti].body), 0, -1, 0});
    return s;
  }

  // --- program helpers -----------------------------------------------------

  static Val reg_value(const opsim::ThreadState& th, int reg) {
    for (auto& [r, v] : th.regs)
      if (r == reg) return v;
    return 0;
  }

  static void set_reg(opsim::ThreadState& th, int reg, Val v) {
    for (auto& p : th.regs)
      if (p.first == reg) {
        p.second = v;
        return;
      }
    th.regs.emplace_back(reg, v);
    std::sort(th.regs.begin(), th.regs.end());
  }

  static Val eval(const opsim::ThreadState& th, const ValExpr& e) {
    return e.is_reg ? reg_value(th, e.reg) + e.lit : e.lit;
  }

  static std::vector<Val>* set_of(opsim::ThreadState& th, int loc) {
    for (auto& p : th.sets)
      if (p.first == loc) return &p.second;
    th.sets.emplace_back(loc, std::vector<Val>{});
    std::sort(th.sets.begin(), th.sets.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return set_of(th, loc);
  }

  /// Advances through control flow and thread-local bookkeeping until the
  /// thread reaches a labelled instruction, a branch point, or its end.
  /// Returns false when a spin loop exceeds its budget.
  bool normalize(opsim::State& s, std::size_t ti, bool& exhausted) {
    opsim::ThreadState& th = s.threads[ti];
    for (;;) {
      if (th.frames.empty()) return true;
      opsim::Frame& f = th.frames.back();
      const Body& body = *bodies_[f.body];
      if (f.idx >= static_cast<int>(body.size())) {
        if (f.loop >= 0) {
          const Stmt* lp = loop_stmt_.at(f.loop);
          if (lp->star) return true;  // boundary is a branch point, keep the frame
          if (f.remaining <= 0) {
            exhausted = true;
            return false;
          }
          f = {f.loop, 0, f.loop, f.remaining - 1};
          continue;
        }
        th.frames.pop_back();
        continue;
      }
      const Stmt& st = body[static_cast<std::size_t>(f.idx)];
      switch (st.kind) {
        case Stmt::Kind::Instr: {
          const Instr& in = st.instr;
          if (in.op == Op::SetAdd || in.op == Op::SetRemove || in.op == Op::SetIsEmpty) {
            ++f.idx;
            auto* ms = set_of(th, in.loc);
            if (in.op == Op::SetAdd) {
              ms->insert(std::lower_bound(ms->begin(), ms->end(), eval(th, in.a)),
                         eval(th, in.a));
            } else if (in.op == Op::SetRemove) {
              auto it = std::lower_bound(ms->begin(), ms->end(), eval(th, in.a));
              if (it != ms->end() && *it == eval(th, in.a)) ms->erase(it);
            } else {
              set_reg(th, in.reg, ms->empty() ? 1 : 0);
            }
            continue;
          }
          return true;  // a labelled instruction
        }
        case Stmt::Kind::If: {
          ++f.idx;
          Val l = eval(th, st.cond.lhs), r = eval(th, st.cond.rhs);
          const Body& br = ((l == r) == st.cond.eq) ? st.a : st.b;
          if (!br.empty()) th.frames.push_back({body_id_.at(&br), 0, -1, 0});
          continue;
        }
        case Stmt::Kind::Break: {
          while (!th.frames.empty() && th.frames.back().loop < 0) th.frames.pop_back();
          if (!th.frames.empty()) th.frames.pop_back();
          continue;
        }
        case Stmt::Kind::Choice:
        case Stmt::Kind::Loop:
          register_loop(st);
          return true;  // branch points handled by the caller
      }
    }
  }

  void register_loop(const Stmt& st) {
    if (st.kind == Stmt::Kind::Loop) loop_stmt_[body_id_.at(&st.a)] = &st;
  }

  /// The statement the (normalized) thread is about to run, or nullptr.
  const Stmt* head_stmt(const opsim::ThreadState& th) const {
    if (th.frames.empty()) return nullptr;
    const opsim::Frame& f = th.frames.back();
    const Body& body = *bodies_[f.body];
    if (f.idx >= static_cast<int>(body.size())) return nullptr;  // loop boundary
    return &body[static_cast<std::size_t>(f.idx)];
  }

  // --- hardware helpers ----------------------------------------------------

  static Val sb_forward(const opsim::State& s, std::size_t ti, int loc) {
    const auto& buf = s.sb[ti];
    for (auto it = buf.rbegin(); it != buf.rend(); ++it)
      if (it->kind == EK::CpuWrite && it->loc == loc) return it->a;
    return s.mem[static_cast<std::size_t>(loc)];
  }

  static bool sb_has_write(const opsim::State& s, std::size_t ti) {
    return !s.sb[ti].empty();
  }

  int remote_node(const Instr& in) const {
    switch (in.op) {
      case Op::Put:
        return t_.locations[in.loc].node;
      case Op::Get:
      case Op::Rcas:
      case Op::Rfaa:
        return t_.locations[in.loc2].node;
      case Op::Rfence:
        return in.node;
      default:
        return 0;
    }
  }

  // --- expansion -----------------------------------------------------------

  void add_succ(opsim::State st, std::string rule) {
    succ_.emplace_back(std::move(st), std::move(rule));
  }

  void expand(const opsim::State& s0) {
    // program transitions
    for (std::size_t ti = 0; ti < s0.threads.size(); ++ti) expand_program(s0, ti);
    // store-buffer drains
    for (std::size_t ti = 0; ti < s0.threads.size(); ++ti) {
      if (s0.sb[ti].empty()) continue;
      opsim::State s = s0;
      Entry e = s.sb[ti].front();
      s.sb[ti].erase(s.sb[ti].begin());
      if (e.kind == EK::CpuWrite) {
        s.mem[static_cast<std::size_t>(e.loc)] = e.a;
        add_succ(std::move(s), "t" + std::to_string(ti) + ":sb-commit");
      } else if (e.kind == EK::Rfence) {
        s.qp[ti][static_cast<std::size_t>(e.loc - 1)].pipe.push_back(e);
        add_succ(std::move(s), "t" + std::to_string(ti) + ":sb-push");
      } else {
        int node = e.loc2 >= 0 && e.kind != EK::PendPut ? t_.locations[e.loc2].node
                                                        : t_.locations[e.loc].node;
        if (e.kind == EK::PendPut) node = t_.locations[e.loc].node;
        s.qp[ti][static_cast<std::size_t>(node - 1)].pipe.push_back(e);
        add_succ(std::move(s), "t" + std::to_string(ti) + ":sb-push");
      }
    }
    // queue-pair transitions
    for (std::size_t ti = 0; ti < s0.qp.size(); ++ti)
      for (int n = 0; n < t_.num_nodes; ++n) expand_qp(s0, ti, n);
  }

  void expand_program(const opsim::State& s0, std::size_t ti) {
    const Stmt* st = head_stmt(s0.threads[ti]);
    std::string pfx = "t" + std::to_string(ti) + ":";
    if (!st) {
      // at a star-loop boundary (or done): exiting/iterating are the branches
      if (s0.threads[ti].frames.empty()) return;
      const opsim::Frame f = s0.threads[ti].frames.back();
      const Stmt* lp = loop_stmt_.at(f.loop);
      {
        opsim::State s = s0;
        s.threads[ti].frames.pop_back();
        if (normalize_or_flag(s, ti)) add_succ(std::move(s), pfx + "loop-exit");
      }
      if (f.remaining > 0) {
        opsim::State s = s0;
        s.threads[ti].frames.back() = {f.loop, 0, f.loop, f.remaining - 1};
        if (normalize_or_flag(s, ti)) add_succ(std::move(s), pfx + "loop-iter");
      } else if (!lp->a.empty()) {
        star_capped_ = true;
      }
      return;
    }
    if (st->kind == Stmt::Kind::Choice) {
      for (const Body* br : {&st->a, &st->b}) {
        opsim::State s = s0;
        ++s.threads[ti].frames.back().idx;
        if (!br->empty()) s.threads[ti].frames.push_back({body_id_.at(br), 0, -1, 0});
        if (normalize_or_flag(s, ti)) add_succ(std::move(s), pfx + "choice");
      }
      return;
    }
    if (st->kind == Stmt::Kind::Loop) {
      // entering the loop: exit now or run an iteration
      {
        opsim::State s = s0;
        ++s.threads[ti].frames.back().idx;
        if (st->star) {
          if (normalize_or_flag(s, ti)) add_succ(std::move(s), pfx + "loop-exit");
        }
      }
      {
        opsim::State s = s0;
        ++s.threads[ti].frames.back().idx;
        int bid = body_id_.at(&st->a);
        loop_stmt_[bid] = st;
        s.threads[ti].frames.push_back({bid, 0, bid, spin_budget_ - 1});
        if (normalize_or_flag(s, ti)) add_succ(std::move(s), pfx + "loop-iter");
      }
      return;
    }

    const Instr& in = st->instr;
    auto step = [&](auto&& mutate, const std::string& rule) {
      opsim::State s = s0;
      ++s.threads[ti].frames.back().idx;
      if (!mutate(s)) return;
      if (normalize_or_flag(s, ti)) add_succ(std::move(s), pfx + rule);
    };
    switch (in.op) {
      case Op::CpuWrite:
        step(
            [&](opsim::State& s) {
              s.sb[ti].push_back({EK::CpuWrite, in.loc, -1, eval(s.threads[ti], in.a), 0, -1});
              return true;
            },
            "lW");
        return;
      case Op::CpuRead:
        step(
            [&](opsim::State& s) {
              set_reg(s.threads[ti], in.reg, sb_forward(s, ti, in.loc));
              return true;
            },
            "lR");
        return;
      case Op::CpuCas: {
        if (sb_has_write(s0, ti)) return;  // fences drain first
        Val cur = s0.mem[static_cast<std::size_t>(in.loc)];
        step(
            [&](opsim::State& s) {
              Val exp = eval(s.threads[ti], in.a);
              if (cur == exp) s.mem[static_cast<std::size_t>(in.loc)] = eval(s.threads[ti], in.b);
              set_reg(s.threads[ti], in.reg, cur);
              return true;
            },
            cur == eval(s0.threads[ti], in.a) ? "CAS-S" : "CAS-F");
        return;
      }
      case Op::Mfence:
        if (sb_has_write(s0, ti)) return;
        step([&](opsim::State&) { return true; }, "MF");
        return;
      case Op::Poll: {
        const auto& wbl = s0.qp[ti][static_cast<std::size_t>(in.node - 1)].wbl;
        if (wbl.empty() || wbl.front().kind != EK::Cn) return;  // blocked
        step(
            [&](opsim::State& s) {
              auto& w = s.qp[ti][static_cast<std::size_t>(in.node - 1)].wbl;
              int id = w.front().id;
              w.erase(w.begin());
              if (in.reg >= 0) set_reg(s.threads[ti], in.reg, id);
              return true;
            },
            "P");
        return;
      }
      case Op::Put:
      case Op::Get:
      case Op::Rcas:
      case Op::Rfaa: {
        step(
            [&](opsim::State& s) {
              opsim::ThreadState& th = s.threads[ti];
              int id = static_cast<int>(ti) * 4096 + (++th.ops_issued);
              EK k = in.op == Op::Put    ? EK::PendPut
                     : in.op == Op::Get  ? EK::PendGet
                     : in.op == Op::Rcas ? EK::PendRcas
                                         : EK::PendRfaa;
              s.sb[ti].push_back({k, in.loc, in.loc2, eval(th, in.a), eval(th, in.b), id});
              if (in.reg >= 0) set_reg(th, in.reg, id);
              return true;
            },
            op_label(in.op));
        return;
      }
      case Op::Rfence:
        step(
            [&](opsim::State& s) {
              s.sb[ti].push_back({EK::Rfence, in.node, -1, 0, 0, -1});
              return true;
            },
            "rF");
        return;
      default:
        throw std::runtime_error("wait/library operation reached the operational machine");
    }
  }

  static const char* op_label(Op op) {
    switch (op) {
      case Op::Put: return "put";
      case Op::Get: return "get";
      case Op::Rcas: return "RCAS";
      case Op::Rfaa: return "RFAA";
      default: return "?";
    }
  }

  bool normalize_or_flag(opsim::State& s, std::size_t ti) {
    bool exhausted = false;
    if (!normalize(s, ti, exhausted)) {
      if (exhausted) ++exhausted_drops_;
      return false;
    }
    return true;
  }

  // beta-suffix admissibility for the mid-pipe rules. The older entries may
  // be local writes, pending gets, remote (atomic) writes, rRMWs and acks,
  // but never pending puts or remote fences.
  static bool beta_local_read(const std::vector<Entry>& pipe, std::size_t pos) {
    for (std::size_t i = 0; i < pos; ++i) {
      EK k = pipe[i].kind;
      if (k == EK::PendPut || k == EK::Rfence) return false;
    }
    return true;
  }

  // older entries restricted to pending gets, local writes and acks
  static bool beta_reads_only(const std::vector<Entry>& pipe, std::size_t pos) {
    for (std::size_t i = 0; i < pos; ++i) {
      EK k = pipe[i].kind;
      if (k != EK::PendGet && k != EK::LocW && k != EK::AckP) return false;
    }
    return true;
  }

  void expand_qp(const opsim::State& s0, std::size_t ti, int n) {
    const opsim::QuPair& q = s0.qp[ti][static_cast<std::size_t>(n)];
    std::string pfx = "t" + std::to_string(ti) + "/n" + std::to_string(n + 1) + ":";
    auto clone = [&](auto&& mutate, const std::string& rule) {
      opsim::State s = s0;
      mutate(s, s.qp[ti][static_cast<std::size_t>(n)]);
      add_succ(std::move(s), pfx + rule);
    };

    // pipe rules; index 0 is oldest, so "head of the pipe" is index 0
    for (std::size_t pos = 0; pos < q.pipe.size(); ++pos) {
      const Entry e = q.pipe[pos];
      switch (e.kind) {
        case EK::Rfence:
          if (pos == 0)
            clone([&](opsim::State&, opsim::QuPair& qq) { qq.pipe.erase(qq.pipe.begin()); },
                  "rfence");
          break;
        case EK::PendPut: {
          bool wbl_ok = true;
          for (const Entry& w : q.wbl)
            if (w.kind != EK::Cn) wbl_ok = false;
          if (wbl_ok && beta_local_read(q.pipe, pos))
            clone(
                [&](opsim::State& s, opsim::QuPair& qq) {
                  qq.pipe[pos] = {EK::RemW, e.loc, -1,
                                  s.mem[static_cast<std::size_t>(e.loc2)], 0, e.id};
                },
                "local-read");
          break;
        }
        case EK::RemW:
          if (beta_reads_only(q.pipe, pos))
            clone(
                [&](opsim::State&, opsim::QuPair& qq) {
                  Entry w = qq.pipe[pos];
                  qq.pipe[pos] = {EK::AckP, -1, -1, 0, 0, w.id};
                  qq.wbr.push_back(w);
                },
                "send-write");
          break;
        case EK::AckP:
          if (pos == 0)
            clone(
                [&](opsim::State&, opsim::QuPair& qq) {
                  Entry a = qq.pipe.front();
                  qq.pipe.erase(qq.pipe.begin());
                  qq.wbl.push_back({EK::Cn, -1, -1, 0, 0, a.id});
                },
                "ack");
          break;
        case EK::PendGet:
          if (q.wbr.empty() && beta_reads_only(q.pipe, pos))
            clone(
                [&](opsim::State& s, opsim::QuPair& qq) {
                  qq.pipe[pos] = {EK::LocW, e.loc, -1,
                                  s.mem[static_cast<std::size_t>(e.loc2)], 0, e.id};
                },
                "remote-read");
          break;
        case EK::LocW:
          if (pos == 0)
            clone(
                [&](opsim::State&, opsim::QuPair& qq) {
                  Entry w = qq.pipe.front();
                  qq.pipe.erase(qq.pipe.begin());
                  qq.wbl.push_back(w);
                  qq.wbl.push_back({EK::Cn, -1, -1, 0, 0, w.id});
                },
                "send-read");
          break;
        case EK::PendRcas: {
          if (!q.wbr.empty() || !beta_reads_only(q.pipe, pos)) break;
          int home = t_.locations[e.loc2].node;
          if (s0.atomics[static_cast<std::size_t>(home - 1)]) break;
          Val cur = s0.mem[static_cast<std::size_t>(e.loc2)];
          if (cur != e.a) {
            clone(
                [&](opsim::State&, opsim::QuPair& qq) {
                  qq.pipe[pos] = {EK::LocW, e.loc, -1, cur, 0, e.id};
                },
                "nCAS-F");
          } else {
            clone(
                [&](opsim::State& s, opsim::QuPair& qq) {
                  s.atomics[static_cast<std::size_t>(home - 1)] = 1;
                  qq.pipe[pos] = {EK::LocW, e.loc, -1, cur, 0, e.id};
                  qq.pipe.insert(qq.pipe.begin() + static_cast<long>(pos),
                                 {EK::AtomW, e.loc2, -1, e.b, 0, e.id});
                },
                "nCAS-S");
          }
          break;
        }
        case EK::PendRfaa: {
          if (!q.wbr.empty() || !beta_reads_only(q.pipe, pos)) break;
          int home = t_.locations[e.loc2].node;
          if (s0.atomics[static_cast<std::size_t>(home - 1)]) break;
          Val cur = s0.mem[static_cast<std::size_t>(e.loc2)];
          clone(
              [&](opsim::State& s, opsim::QuPair& qq) {
                s.atomics[static_cast<std::size_t>(home - 1)] = 1;
                qq.pipe[pos] = {EK::LocW, e.loc, -1, cur, 0, e.id};
                qq.pipe.insert(qq.pipe.begin() + static_cast<long>(pos),
                               {EK::AtomW, e.loc2, -1, cur + e.a, 0, e.id});
              },
              "nFAA");
          break;
        }
        case EK::AtomW:
          if (beta_reads_only(q.pipe, pos))
            clone(
                [&](opsim::State&, opsim::QuPair& qq) {
                  Entry w = qq.pipe[pos];
                  qq.pipe.erase(qq.pipe.begin() + static_cast<long>(pos));
                  qq.wbr.push_back(w);
                },
                "nRMW-1");
          break;
        default:
          break;
      }
    }

    // write-buffer commits
    if (!q.wbr.empty()) {
      const Entry e = q.wbr.front();
      if (e.kind == EK::RemW) {
        clone(
            [&](opsim::State& s, opsim::QuPair& qq) {
              s.mem[static_cast<std::size_t>(e.loc)] = e.a;
              qq.wbr.erase(qq.wbr.begin());
            },
            "remote-write");
      } else {
        clone(
            [&](opsim::State& s, opsim::QuPair& qq) {
              s.mem[static_cast<std::size_t>(e.loc)] = e.a;
              s.atomics[static_cast<std::size_t>(t_.locations[e.loc].node - 1)] = 0;
              qq.wbr.erase(qq.wbr.begin());
            },
            "nRMW-2");
      }
    }
    for (std::size_t pos = 0; pos < q.wbl.size(); ++pos) {
      if (q.wbl[pos].kind != EK::LocW) continue;
      bool older_only_cn = true;
      for (std::size_t i = 0; i < pos; ++i)
        if (q.wbl[i].kind != EK::Cn) older_only_cn = false;
      if (older_only_cn) {
        const Entry e = q.wbl[pos];
        clone(
            [&](opsim::State& s, opsim::QuPair& qq) {
              s.mem[static_cast<std::size_t>(e.loc)] = e.a;
              qq.wbl.erase(qq.wbl.begin() + static_cast<long>(pos));
            },
            "local-write");
      }
      break;  // only the oldest local write is eligible
    }
  }

  // --- structural invariants (checked on every reachable state) -------------

  bool check_invariants(const opsim::State& s) const {
    int busy_writes_total = 0;
    for (std::size_t ti = 0; ti < s.qp.size(); ++ti)
      for (const opsim::QuPair& q : s.qp[ti]) {
        for (const Entry& e : q.wbr)
          if (e.kind != EK::RemW && e.kind != EK::AtomW) return false;
        for (const Entry& e : q.wbl)
          if (e.kind != EK::LocW && e.kind != EK::Cn) return false;
        for (const Entry& e : q.pipe)
          if (e.kind == EK::Cn || e.kind == EK::CpuWrite) return false;
      }
    // one in-flight atomic write per busy node, none for free nodes
    for (int n = 1; n <= t_.num_nodes; ++n) {
      int in_flight = 0;
      for (std::size_t ti = 0; ti < s.qp.size(); ++ti)
        for (const opsim::QuPair& q : s.qp[ti]) {
          for (const Entry& e : q.pipe)
            if (e.kind == EK::AtomW && t_.locations[e.loc].node == n) ++in_flight;
          for (const Entry& e : q.wbr)
            if (e.kind == EK::AtomW && t_.locations[e.loc].node == n) ++in_flight;
        }
      if (s.atomics[static_cast<std::size_t>(n - 1)] ? in_flight != 1 : in_flight != 0)
        return false;
      busy_writes_total += in_flight;
    }
    (void)busy_writes_total;
    return true;
  }

  bool quiescent(const opsim::State& s) const {
    for (const opsim::ThreadState& th : s.threads)
      if (!th.frames.empty()) return false;
    for (const auto& buf : s.sb)
      if (!buf.empty()) return false;
    for (const auto& per_thread : s.qp)
      for (const opsim::QuPair& q : per_thread) {
        if (!q.pipe.empty() || !q.wbr.empty()) return false;
        for (const Entry& e : q.wbl)
          if (e.kind != EK::Cn) return false;
      }
    return true;
  }

  Outcome outcome_of(const opsim::State& s) const {
    Outcome o(vocab_.entries.size(), 0);
    for (std::size_t i = 0; i < vocab_.entries.size(); ++i) {
      const Vocabulary::Entry& en = vocab_.entries[i];
      if (en.kind == Vocabulary::Entry::Kind::Reg) {
        int thread = t_.registers[en.idx].thread;
        o[i] = reg_value(s.threads[static_cast<std::size_t>(thread)], en.idx);
      } else {
        o[i] = s.mem[static_cast<std::size_t>(en.idx)];
      }
    }
    return o;
  }

  // --- state bookkeeping ----------------------------------------------------

  void push_state(opsim::State st, long parent, const std::string& rule) {
    encode(st, buf_);
    auto [it, fresh] = seen_.emplace(buf_, states_.size());
    if (!fresh) return;
    states_.push_back(std::move(st));
    parents_.emplace_back(parent, rule);
  }

  std::vector<std::string> trace_of(std::size_t idx) const {
    std::vector<std::string> out;
    long cur = static_cast<long>(idx);
    while (cur >= 0) {
      out.push_back(parents_[static_cast<std::size_t>(cur)].second);
      cur = parents_[static_cast<std::size_t>(cur)].first;
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  LitmusTest t_;
  CheckOptions opt_;
  bool want_traces_;
  Vocabulary vocab_;
  std::vector<const Body*> bodies_;
  std::map<const Body*, int> body_id_;
  std::map<int, const Stmt*> loop_stmt_;
  int spin_budget_ = 3;
  bool star_capped_ = false;
  std::size_t exhausted_drops_ = 0;
  std::vector<opsim::State> states_;
  std::vector<std::pair<long, std::string>> parents_;
  std::unordered_map<std::string, std::size_t> seen_;
  std::vector<std::pair<opsim::State, std::string>> succ_;
  std::string buf_;
};

/// Operational check of a tso-dialect test.
inline Verdict run_tso_op_verdict(const LitmusTest& raw, const CheckOptions& opt = {},
                                  OpOutcomes* detail_out = nullptr) {
  Verdict v;
  v.test = raw.name;
  v.model = "tso-op";
  OpExplorer ex(raw, opt);
  v.vocab = ex.vocab();
  OpOutcomes oo = ex.run();
  v.outcomes = oo.outcomes;
  v.stats = oo.stats;
  v.resource_exceeded = oo.state_cap_hit;
  v.error = oo.error;
  LitmusTest t = prepare_test(raw);
  finalize_verdict(v, t);
  if (detail_out) *detail_out = std::move(oo);
  return v;
}

}  // namespace rdmalit

#endif  // RDMALIT_OP_SIM_HPP_
