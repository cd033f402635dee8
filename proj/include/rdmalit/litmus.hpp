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

#ifndef RDMALIT_LITMUS_HPP_
#define RDMALIT_LITMUS_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdmalit {

using Val = long long;

enum class Dialect { Wait, Tso, Library };

enum class LocKind {
  Plain,   // ordinary memory location on one node
  SVar,    // shared variable with one copy per node
  LockWl,  // weak lock
  LockSl,  // strong lock
  LockNl,  // node lock
  Sc,      // sequentially consistent abstract location
  Set,     // auxiliary id-set location (translated programs)
};

struct Location {
  std::string name;
  int node = 1;  // 1-based; for SVar, the node is per-copy and this is unused
  Val init = 0;
  LocKind kind = LocKind::Plain;
  bool aux = false;  // introduced by inlining/translation; excluded from outcomes
};

/// Value expressions: a literal, or a register plus a literal offset.
struct ValExpr {
  bool is_reg = false;
  Val lit = 0;
  int reg = -1;  // global register index

  static ValExpr literal(Val v) { return {false, v, -1}; }
  static ValExpr of_reg(int r, Val add = 0) { return {true, add, r}; }
  bool operator==(const ValExpr&) const = default;
};

struct Cond {
  ValExpr lhs;
  bool eq = true;  // == or !=
  ValExpr rhs;
};

enum class Op {
  CpuWrite,
  CpuRead,
  CpuCas,
  Mfence,
  Put,
  Get,
  Wait,
  Rfence,
  Rcas,
  Rfaa,
  Poll,
  GFence,
  BrlWrite,
  BrlRead,
  BrlBcast,
  BrlWait,
  AcqWl,
  RelWl,
  AcqSl,
  RelSl,
  AcqNl,
  RelNl,
  ScWrite,
  ScRead,
  ScCas,
  ScFaa,
  SetAdd,
  SetRemove,
  SetIsEmpty,
};

struct Instr {
  Op op;
  int loc = -1;    // result/target location (Put: remote dst; Get/Rcas/Rfaa: local dst)
  int loc2 = -1;   // source location (Put: local src; Get/Rcas/Rfaa: remote src)
  int reg = -1;    // output register (reads, CAS-likes, poll/remote-op id binding)
  ValExpr a, b;    // value operands (written value / expected / update / addend)
  bool src_is_lit = false;  // Put with a literal payload instead of loc2
  int wid = -1;             // work identifier (wait-dialect remote ops)
  int node = 0;             // Poll/Rfence target node
  std::vector<int> nodes;   // GFence/BrlBcast target nodes
};

struct Stmt;
using Body = std::vector<Stmt>;

struct Stmt {
  enum class Kind { Instr, Choice, Loop, If, Break };
  Kind kind = Kind::Instr;
  Instr instr{};
  Body a, b;         // Choice branches; Loop body in a; If then/else
  bool star = true;  // Loop: star loops may stop before any iteration,
                     // spin loops exit only via break
  Cond cond{};       // If
};

struct Thread {
  std::string name;
  int node = 1;
  Body body;
};

struct Register {
  std::string name;
  int thread = -1;
  bool aux = false;
};

/// Assertion expressions over final register and location values.
struct BoolExpr {
  enum class Kind { Cmp, And, Or, Not };
  Kind kind = Kind::Cmp;
  // Cmp: subject is a register (reg >= 0) or a location (loc >= 0, with
  // svar_node selecting the copy for shared variables).
  int reg = -1;
  int loc = -1;
  int svar_node = 0;
  bool eq = true;
  Val value = 0;
  std::vector<BoolExpr> kids;
};

struct Assertion {
  bool expect_allowed = true;
  BoolExpr expr;
  std::string text;  // source form, for reporting
};

struct LitmusTest {
  std::string name;
  int num_nodes = 1;
  Dialect dialect = Dialect::Wait;
  std::vector<Location> locations;
  std::vector<Register> registers;
  std::vector<Thread> threads;
  std::vector<Assertion> assertions;
  std::vector<std::string> wids;  // wid names, indexed by Instr::wid

  int find_loc(const std::string& n) const {
    for (std::size_t i = 0; i < locations.size(); ++i)
      if (locations[i].name == n) return static_cast<int>(i);
    return -1;
  }
  int find_reg(const std::string& n, int thread) const {
    for (std::size_t i = 0; i < registers.size(); ++i)
      if (registers[i].name == n && (thread < 0 || registers[i].thread == thread))
        return static_cast<int>(i);
    return -1;
  }
  int add_loc(Location l) {
    locations.push_back(std::move(l));
    return static_cast<int>(locations.size()) - 1;
  }
  int add_reg(const std::string& n, int thread, bool aux = false) {
    registers.push_back({n, thread, aux});
    return static_cast<int>(registers.size()) - 1;
  }
  int add_wid(const std::string& n) {
    for (std::size_t i = 0; i < wids.size(); ++i)
      if (wids[i] == n) return static_cast<int>(i);
    wids.push_back(n);
    return static_cast<int>(wids.size()) - 1;
  }
};

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg + " at " + std::to_string(line_) + ":" + std::to_string(col_)),
        line(line_),
        col(col_) {}
};

inline bool is_lock_kind(LocKind k) {
  return k == LocKind::LockWl || k == LocKind::LockSl || k == LocKind::LockNl;
}

/// Library that owns a method, for composed consistency checking.
enum class Lib { WaitRmw, Brl, WLock, SLock, NLock, Strl, TsoCore };

inline Lib lib_of(Op op) {
  switch (op) {
    case Op::BrlWrite:
    case Op::BrlRead:
    case Op::BrlBcast:
    case Op::BrlWait:
    case Op::GFence:
      return Lib::Brl;
    case Op::AcqWl:
    case Op::RelWl:
      return Lib::WLock;
    case Op::AcqSl:
    case Op::RelSl:
      return Lib::SLock;
    case Op::AcqNl:
    case Op::RelNl:
      return Lib::NLock;
    case Op::ScWrite:
    case Op::ScRead:
    case Op::ScCas:
    case Op::ScFaa:
      return Lib::Strl;
    default:
      return Lib::WaitRmw;
  }
}

}  // namespace rdmalit

#endif  // RDMALIT_LITMUS_HPP_
