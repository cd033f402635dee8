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

#ifndef RDMALIT_PARSER_HPP_
#define RDMALIT_PARSER_HPP_

#include <algorithm>
#include <cctype>
#include <sstream>

#include "rdmalit/litmus.hpp"

namespace rdmalit {

// Litmus text format
//
//   nodes 2
//   model wait
//   loc x@1 = 0
//   svar s = 0
//   scloc q@1 = 0
//   lock l@2 nl
//   thread t1@1 {
//     put(z, x, d);
//     wait(d);
//     x := 1;
//     a := x;
//   }
//   assert forbidden z == 1
//
// Statements: CPU ops use assignment sugar (`x := 1`, `a := x`,
// `a := cas(x,0,1)`), everything else is a named call. `loop { }` may stop
// before any iteration; `spin { }` only exits via break.

namespace detail {

struct Tok {
  enum Kind { Ident, Int, Punct, End } kind;
  std::string s;
  Val num = 0;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { next(); }

  const Tok& peek() const { return tok_; }

  Tok take() {
    Tok t = tok_;
    next();
    return t;
  }

  bool eat_punct(const std::string& p) {
    if (tok_.kind == Tok::Punct && tok_.s == p) {
      next();
      return true;
    }
    return false;
  }

  bool eat_ident(const std::string& w) {
    if (tok_.kind == Tok::Ident && tok_.s == w) {
      next();
      return true;
    }
    return false;
  }

  void expect_punct(const std::string& p) {
    if (!eat_punct(p)) fail("expected '" + p + "'");
  }

  std::string expect_ident() {
    if (tok_.kind != Tok::Ident) fail("expected identifier");
    return take().s;
  }

  Val expect_int() {
    bool neg = false;
    if (tok_.kind == Tok::Punct && tok_.s == "-") {
      neg = true;
      next();
    }
    if (tok_.kind != Tok::Int) fail("expected integer");
    Val v = take().num;
    return neg ? -v : v;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + (tok_.kind == Tok::End ? " (at end of input)"
                                                  : " (got '" + tok_.s + "')"),
                     tok_.line, tok_.col);
  }

 private:
  void next() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++col_;
        ++pos_;
      } else if (c == '#' || (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/')) {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_ = {Tok::End, "", 0, line_, col_};
      return;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string s;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        s += src_[pos_++];
        ++col_;
      }
      tok_ = {Tok::Ident, s, 0, tok_.line, tok_.col};
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      Val v = 0;
      std::string s;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        v = v * 10 + (src_[pos_] - '0');
        s += src_[pos_++];
        ++col_;
      }
      tok_ = {Tok::Int, s, v, tok_.line, tok_.col};
    } else {
      std::string s(1, c);
      ++pos_;
      ++col_;
      // two-char operators
      if (pos_ < src_.size()) {
        char d = src_[pos_];
        if ((c == ':' && d == '=') || (c == '=' && d == '=') || (c == '!' && d == '=') ||
            (c == '&' && d == '&') || (c == '|' && d == '|') || (c == '-' && d == '>')) {
          s += d;
          ++pos_;
          ++col_;
        }
      }
      tok_ = {Tok::Punct, s, 0, tok_.line, tok_.col};
    }
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Tok tok_;
};

class Parser {
 public:
  Parser(const std::string& src, std::string name) : lx_(src) { test_.name = std::move(name); }

  LitmusTest run() {
    parse_header();
    while (lx_.peek().kind == Tok::Ident && lx_.peek().s == "thread") parse_thread();
    while (lx_.peek().kind == Tok::Ident && lx_.peek().s == "assert") parse_assert();
    if (lx_.peek().kind != Tok::End) lx_.fail("unexpected trailing input");
    finalize();
    return std::move(test_);
  }

 private:
  void parse_header() {
    for (;;) {
      if (lx_.eat_ident("nodes")) {
        test_.num_nodes = static_cast<int>(lx_.expect_int());
      } else if (lx_.eat_ident("model")) {
        std::string m = lx_.expect_ident();
        if (m == "wait")
          declared_dialect_ = Dialect::Wait;
        else if (m == "tso")
          declared_dialect_ = Dialect::Tso;
        else if (m == "library")
          declared_dialect_ = Dialect::Library;
        else
          lx_.fail("unknown model '" + m + "'");
      } else if (lx_.eat_ident("loc")) {
        parse_loc_decl(LocKind::Plain);
      } else if (lx_.eat_ident("svar")) {
        Location l;
        l.name = lx_.expect_ident();
        l.kind = LocKind::SVar;
        l.node = 0;
        if (lx_.eat_punct("=")) l.init = lx_.expect_int();
        declare(l);
      } else if (lx_.eat_ident("scloc")) {
        Location l;
        l.name = lx_.expect_ident();
        l.kind = LocKind::Sc;
        l.node = 1;
        if (lx_.eat_punct("@")) l.node = static_cast<int>(lx_.expect_int());
        if (lx_.eat_punct("=")) l.init = lx_.expect_int();
        declare(l);
      } else if (lx_.eat_ident("lock")) {
        Location l;
        l.name = lx_.expect_ident();
        lx_.expect_punct("@");
        l.node = static_cast<int>(lx_.expect_int());
        std::string k = lx_.expect_ident();
        if (k == "wl")
          l.kind = LocKind::LockWl;
        else if (k == "sl")
          l.kind = LocKind::LockSl;
        else if (k == "nl")
          l.kind = LocKind::LockNl;
        else
          lx_.fail("lock kind must be wl, sl or nl");
        declare(l);
      } else if (lx_.eat_ident("set")) {
        parse_loc_decl(LocKind::Set);
      } else {
        break;
      }
    }
  }

  void parse_loc_decl(LocKind kind) {
    Location l;
    l.kind = kind;
    l.name = lx_.expect_ident();
    lx_.expect_punct("@");
    l.node = static_cast<int>(lx_.expect_int());
    if (lx_.eat_punct("=")) l.init = lx_.expect_int();
    if (kind == LocKind::Set) l.aux = true;
    declare(l);
  }

  void declare(const Location& l) {
    if (test_.find_loc(l.name) >= 0) lx_.fail("duplicate location '" + l.name + "'");
    if (l.kind != LocKind::SVar && (l.node < 1 || l.node > test_.num_nodes))
      lx_.fail("location '" + l.name + "' on undeclared node");
    test_.locations.push_back(l);
  }

  void parse_thread() {
    lx_.eat_ident("thread");
    Thread th;
    th.name = lx_.expect_ident();
    lx_.expect_punct("@");
    th.node = static_cast<int>(lx_.expect_int());
    if (th.node < 1 || th.node > test_.num_nodes) lx_.fail("thread on undeclared node");
    cur_thread_ = static_cast<int>(test_.threads.size());
    cur_node_ = th.node;
    lx_.expect_punct("{");
    th.body = parse_body();
    lx_.expect_punct("}");
    test_.threads.push_back(std::move(th));
  }

  Body parse_body() {
    Body b;
    while (!(lx_.peek().kind == Tok::Punct && lx_.peek().s == "}")) {
      if (lx_.peek().kind == Tok::End) lx_.fail("unterminated block");
      b.push_back(parse_stmt());
      lx_.eat_punct(";");
    }
    return b;
  }

  Stmt block_stmt(Stmt::Kind kind) {
    Stmt s;
    s.kind = kind;
    lx_.expect_punct("{");
    s.a = parse_body();
    lx_.expect_punct("}");
    return s;
  }

  Stmt parse_stmt() {
    Tok t = lx_.peek();
    if (t.kind != Tok::Ident) lx_.fail("expected statement");
    const std::string& w = t.s;

    if (w == "choice") {
      lx_.take();
      Stmt s = block_stmt(Stmt::Kind::Choice);
      if (!lx_.eat_ident("or")) lx_.fail("expected 'or'");
      lx_.expect_punct("{");
      s.b = parse_body();
      lx_.expect_punct("}");
      return s;
    }
    if (w == "loop") {
      lx_.take();
      Stmt s = block_stmt(Stmt::Kind::Loop);
      s.star = true;
      return s;
    }
    if (w == "spin") {
      lx_.take();
      Stmt s = block_stmt(Stmt::Kind::Loop);
      s.star = false;
      return s;
    }
    if (w == "if") {
      lx_.take();
      Stmt s;
      s.kind = Stmt::Kind::If;
      s.cond.lhs = parse_val();
      if (lx_.eat_punct("=="))
        s.cond.eq = true;
      else if (lx_.eat_punct("!="))
        s.cond.eq = false;
      else
        lx_.fail("expected == or !=");
      s.cond.rhs = parse_val();
      lx_.expect_punct("{");
      s.a = parse_body();
      lx_.expect_punct("}");
      if (lx_.eat_ident("else")) {
        lx_.expect_punct("{");
        s.b = parse_body();
        lx_.expect_punct("}");
      }
      return s;
    }
    if (w == "break") {
      lx_.take();
      Stmt s;
      s.kind = Stmt::Kind::Break;
      return s;
    }

    // named calls without a result
    if (w == "mfence") return simple_instr(Op::Mfence);
    if (w == "wait") return wid_instr(Op::Wait);
    if (w == "brlwait") return wid_instr(Op::BrlWait);
    if (w == "rfence") return node_instr(Op::Rfence);
    if (w == "poll") return instr_stmt(parse_poll());
    if (w == "gfence") return instr_stmt(parse_gfence());
    if (w == "put") return instr_stmt(parse_put());
    if (w == "get") return instr_stmt(parse_get());
    if (w == "rcas") return instr_stmt(parse_rcas());
    if (w == "rfaa") return instr_stmt(parse_rfaa());
    if (w == "bcast") return instr_stmt(parse_bcast());
    if (w == "brlwrite") return loc_val_instr(Op::BrlWrite, LocKind::SVar);
    if (w == "scwrite") return loc_val_instr(Op::ScWrite, LocKind::Sc);
    if (w == "setadd") return loc_val_instr(Op::SetAdd, LocKind::Set);
    if (w == "setremove") return loc_val_instr(Op::SetRemove, LocKind::Set);
    if (w == "acq_wl") return lock_instr(Op::AcqWl, LocKind::LockWl);
    if (w == "rel_wl") return lock_instr(Op::RelWl, LocKind::LockWl);
    if (w == "acq_sl") return lock_instr(Op::AcqSl, LocKind::LockSl);
    if (w == "rel_sl") return lock_instr(Op::RelSl, LocKind::LockSl);
    if (w == "acq_nl") return lock_instr(Op::AcqNl, LocKind::LockNl);
    if (w == "rel_nl") return lock_instr(Op::RelNl, LocKind::LockNl);

    // assignment sugar: `target := rhs`
    std::string lhs = lx_.expect_ident();
    lx_.expect_punct(":=");
    int loc = test_.find_loc(lhs);
    if (loc >= 0) {
      // CpuWrite to a declared location
      Instr in;
      in.op = Op::CpuWrite;
      in.loc = loc;
      in.a = parse_val();
      return instr_stmt(in);
    }
    return instr_stmt(parse_read_like(lhs));
  }

  Instr parse_read_like(const std::string& reg_name) {
    Tok t = lx_.peek();
    if (t.kind != Tok::Ident) lx_.fail("expected a read/cas call or location");
    Instr in;
    if (t.s == "cas" || t.s == "sccas" || t.s == "scfaa" || t.s == "scread" ||
        t.s == "brlread" || t.s == "setisempty" || t.s == "poll") {
      std::string fn = lx_.take().s;
      lx_.expect_punct("(");
      if (fn == "poll") {
        in.op = Op::Poll;
        in.node = static_cast<int>(lx_.expect_int());
      } else {
        in.loc = expect_loc(fn == "brlread"      ? LocKind::SVar
                            : fn == "setisempty" ? LocKind::Set
                            : (fn == "scread" || fn == "sccas" || fn == "scfaa")
                                ? LocKind::Sc
                                : LocKind::Plain);
        if (fn == "cas" || fn == "sccas") {
          lx_.expect_punct(",");
          in.a = parse_val();
          lx_.expect_punct(",");
          in.b = parse_val();
          in.op = fn == "cas" ? Op::CpuCas : Op::ScCas;
        } else if (fn == "scfaa") {
          lx_.expect_punct(",");
          in.a = parse_val();
          in.op = Op::ScFaa;
        } else {
          in.op = fn == "brlread" ? Op::BrlRead : fn == "scread" ? Op::ScRead : Op::SetIsEmpty;
        }
      }
      lx_.expect_punct(")");
    } else {
      // plain CPU read of a location
      in.op = Op::CpuRead;
      in.loc = expect_loc(LocKind::Plain);
    }
    in.reg = reg_for(reg_name, true);
    return in;
  }

  Instr parse_put() {
    lx_.eat_ident("put");
    Instr in;
    in.op = Op::Put;
    lx_.expect_punct("(");
    in.loc = expect_loc(LocKind::Plain);
    lx_.expect_punct(",");
    if (lx_.peek().kind == Tok::Int || (lx_.peek().kind == Tok::Punct && lx_.peek().s == "-")) {
      in.src_is_lit = true;
      in.a = ValExpr::literal(lx_.expect_int());
    } else {
      std::string n = lx_.expect_ident();
      int l = test_.find_loc(n);
      if (l < 0 || test_.locations[l].kind != LocKind::Plain)
        lx_.fail("put source '" + n + "' is not a plain location");
      in.loc2 = l;
    }
    parse_wid_and_close(in);
    return in;
  }

  Instr parse_get() {
    lx_.eat_ident("get");
    Instr in;
    in.op = Op::Get;
    lx_.expect_punct("(");
    in.loc = expect_loc_autodecl();
    lx_.expect_punct(",");
    in.loc2 = expect_loc(LocKind::Plain);
    parse_wid_and_close(in);
    return in;
  }

  Instr parse_rcas() {
    lx_.eat_ident("rcas");
    Instr in;
    in.op = Op::Rcas;
    lx_.expect_punct("(");
    in.loc = expect_loc_autodecl();
    lx_.expect_punct(",");
    in.loc2 = expect_loc(LocKind::Plain);
    lx_.expect_punct(",");
    in.a = parse_val();
    lx_.expect_punct(",");
    in.b = parse_val();
    parse_wid_and_close(in);
    return in;
  }

  Instr parse_rfaa() {
    lx_.eat_ident("rfaa");
    Instr in;
    in.op = Op::Rfaa;
    lx_.expect_punct("(");
    in.loc = expect_loc_autodecl();
    lx_.expect_punct(",");
    in.loc2 = expect_loc(LocKind::Plain);
    lx_.expect_punct(",");
    in.a = parse_val();
    parse_wid_and_close(in);
    return in;
  }

  Instr parse_bcast() {
    lx_.eat_ident("bcast");
    Instr in;
    in.op = Op::BrlBcast;
    lx_.expect_punct("(");
    in.loc = expect_loc(LocKind::SVar);
    lx_.expect_punct(",");
    in.wid = test_.add_wid(lx_.expect_ident());
    if (lx_.eat_punct(",")) in.nodes = parse_nodeset();
    lx_.expect_punct(")");
    return in;
  }

  Instr parse_poll() {
    lx_.eat_ident("poll");
    Instr in;
    in.op = Op::Poll;
    lx_.expect_punct("(");
    in.node = static_cast<int>(lx_.expect_int());
    lx_.expect_punct(")");
    return in;
  }

  Instr parse_gfence() {
    lx_.eat_ident("gfence");
    Instr in;
    in.op = Op::GFence;
    lx_.expect_punct("(");
    in.nodes = parse_nodeset();
    lx_.expect_punct(")");
    return in;
  }

  std::vector<int> parse_nodeset() {
    std::vector<int> ns;
    bool braced = lx_.eat_punct("{");
    ns.push_back(static_cast<int>(lx_.expect_int()));
    while (lx_.eat_punct(",")) ns.push_back(static_cast<int>(lx_.expect_int()));
    if (braced) lx_.expect_punct("}");
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    return ns;
  }

  void parse_wid_and_close(Instr& in) {
    if (lx_.eat_punct(",")) in.wid = test_.add_wid(lx_.expect_ident());
    lx_.expect_punct(")");
    if (lx_.eat_punct("->")) in.reg = reg_for(lx_.expect_ident(), true);
  }

  Stmt simple_instr(Op op) {
    lx_.take();
    Instr in;
    in.op = op;
    return instr_stmt(in);
  }

  Stmt wid_instr(Op op) {
    lx_.take();
    Instr in;
    in.op = op;
    lx_.expect_punct("(");
    in.wid = test_.add_wid(lx_.expect_ident());
    lx_.expect_punct(")");
    return instr_stmt(in);
  }

  Stmt node_instr(Op op) {
    lx_.take();
    Instr in;
    in.op = op;
    lx_.expect_punct("(");
    in.node = static_cast<int>(lx_.expect_int());
    lx_.expect_punct(")");
    return instr_stmt(in);
  }

  Stmt loc_val_instr(Op op, LocKind kind) {
    lx_.take();
    Instr in;
    in.op = op;
    lx_.expect_punct("(");
    in.loc = expect_loc(kind);
    lx_.expect_punct(",");
    in.a = parse_val();
    lx_.expect_punct(")");
    return instr_stmt(in);
  }

  Stmt lock_instr(Op op, LocKind kind) {
    lx_.take();
    Instr in;
    in.op = op;
    lx_.expect_punct("(");
    in.loc = expect_loc(kind);
    lx_.expect_punct(")");
    return instr_stmt(in);
  }

  Stmt instr_stmt(Instr in) {
    Stmt s;
    s.kind = Stmt::Kind::Instr;
    s.instr = in;
    return s;
  }

  int expect_loc(LocKind kind) {
    std::string n = lx_.expect_ident();
    int l = test_.find_loc(n);
    if (l < 0) lx_.fail("undeclared location '" + n + "'");
    if (test_.locations[l].kind != kind) lx_.fail("location '" + n + "' has the wrong kind");
    return l;
  }

  // Destination of get/rcas/rfaa: a plain location, auto-declared on the
  // thread's node when missing (matches the `b := x^2` figures).
  int expect_loc_autodecl() {
    std::string n = lx_.expect_ident();
    int l = test_.find_loc(n);
    if (l >= 0) {
      if (test_.locations[l].kind != LocKind::Plain)
        lx_.fail("location '" + n + "' has the wrong kind");
      return l;
    }
    Location loc;
    loc.name = n;
    loc.node = cur_node_;
    return test_.add_loc(loc);
  }

  ValExpr parse_val() {
    if (lx_.peek().kind == Tok::Int || (lx_.peek().kind == Tok::Punct && lx_.peek().s == "-"))
      return ValExpr::literal(lx_.expect_int());
    std::string n = lx_.expect_ident();
    int r = test_.find_reg(n, cur_thread_);
    if (r < 0) lx_.fail("unknown register '" + n + "'");
    return parse_val_tail(r);
  }

  ValExpr parse_val_tail(int reg) {
    Val add = 0;
    if (lx_.eat_punct("+"))
      add = lx_.expect_int();
    else if (lx_.peek().kind == Tok::Punct && lx_.peek().s == "-") {
      // minus only binds here when followed by an integer literal
      lx_.take();
      add = -lx_.expect_int();
    }
    return ValExpr::of_reg(reg, add);
  }

  int reg_for(const std::string& n, bool define) {
    if (test_.find_loc(n) >= 0) lx_.fail("'" + n + "' is a location, not a register");
    int r = test_.find_reg(n, cur_thread_);
    if (r >= 0) return r;
    if (!define) lx_.fail("unknown register '" + n + "'");
    return test_.add_reg(n, cur_thread_);
  }

  void parse_assert() {
    lx_.eat_ident("assert");
    Assertion as;
    if (lx_.eat_ident("allowed"))
      as.expect_allowed = true;
    else if (lx_.eat_ident("forbidden"))
      as.expect_allowed = false;
    else
      lx_.fail("expected allowed/forbidden");
    as.expr = parse_or();
    as.text = render_bool(as.expr);
    test_.assertions.push_back(std::move(as));
  }

  BoolExpr parse_or() {
    BoolExpr e = parse_and();
    while (lx_.eat_punct("||")) {
      BoolExpr o;
      o.kind = BoolExpr::Kind::Or;
      o.kids.push_back(std::move(e));
      o.kids.push_back(parse_and());
      e = std::move(o);
    }
    return e;
  }

  BoolExpr parse_and() {
    BoolExpr e = parse_atom();
    while (lx_.eat_punct("&&")) {
      BoolExpr a;
      a.kind = BoolExpr::Kind::And;
      a.kids.push_back(std::move(e));
      a.kids.push_back(parse_atom());
      e = std::move(a);
    }
    return e;
  }

  BoolExpr parse_atom() {
    if (lx_.eat_punct("(")) {
      BoolExpr e = parse_or();
      lx_.expect_punct(")");
      return e;
    }
    if (lx_.eat_punct("!")) {
      BoolExpr n;
      n.kind = BoolExpr::Kind::Not;
      n.kids.push_back(parse_atom());
      return n;
    }
    BoolExpr c;
    c.kind = BoolExpr::Kind::Cmp;
    std::string n = lx_.expect_ident();
    int loc = test_.find_loc(n);
    if (loc >= 0) {
      c.loc = loc;
      if (lx_.eat_punct("@")) c.svar_node = static_cast<int>(lx_.expect_int());
      if (test_.locations[loc].kind == LocKind::SVar && c.svar_node == 0)
        lx_.fail("shared variable '" + n + "' needs a node qualifier in assertions");
    } else {
      c.reg = test_.find_reg(n, -1);
      if (c.reg < 0) lx_.fail("assertion over unknown name '" + n + "'");
      for (std::size_t i = c.reg + 1; i < test_.registers.size(); ++i)
        if (test_.registers[i].name == n)
          lx_.fail("register '" + n + "' is ambiguous across threads in assertion");
    }
    if (lx_.eat_punct("=="))
      c.eq = true;
    else if (lx_.eat_punct("!="))
      c.eq = false;
    else
      lx_.fail("expected == or !=");
    c.value = lx_.expect_int();
    return c;
  }

  std::string render_bool(const BoolExpr& e) const {
    switch (e.kind) {
      case BoolExpr::Kind::Cmp: {
        std::string s = e.reg >= 0 ? test_.registers[e.reg].name : test_.locations[e.loc].name;
        if (e.svar_node > 0) s += "@" + std::to_string(e.svar_node);
        return s + (e.eq ? " == " : " != ") + std::to_string(e.value);
      }
      case BoolExpr::Kind::And:
        return "(" + render_bool(e.kids[0]) + " && " + render_bool(e.kids[1]) + ")";
      case BoolExpr::Kind::Or:
        return "(" + render_bool(e.kids[0]) + " || " + render_bool(e.kids[1]) + ")";
      case BoolExpr::Kind::Not:
        return "!" + render_bool(e.kids[0]);
    }
    return "";
  }

  // Dialect inference + dialect/addressing validation.
  void finalize() {
    bool saw_wait = false, saw_tso = false, saw_lib = false;
    for (std::size_t ti = 0; ti < test_.threads.size(); ++ti)
      scan_body(test_.threads[ti].body, static_cast<int>(ti), saw_wait, saw_tso, saw_lib);
    Dialect inferred = saw_tso ? Dialect::Tso : saw_lib ? Dialect::Library : Dialect::Wait;
    if (saw_tso && (saw_wait || saw_lib))
      throw ParseError("tso-dialect operations mixed with wait/library operations", 0, 0);
    if (declared_dialect_) {
      if (*declared_dialect_ == Dialect::Wait && inferred != Dialect::Wait)
        throw ParseError("dialect mismatch: test declares 'model wait'", 0, 0);
      if (*declared_dialect_ == Dialect::Tso && inferred != Dialect::Tso && has_any_op_)
        throw ParseError("dialect mismatch: test declares 'model tso'", 0, 0);
      test_.dialect = *declared_dialect_;
    } else {
      test_.dialect = inferred;
    }
  }

  void scan_body(const Body& b, int thread, bool& w, bool& t, bool& l) {
    for (const Stmt& s : b) {
      if (s.kind == Stmt::Kind::Instr) {
        has_any_op_ = true;
        const Instr& in = s.instr;
        switch (in.op) {
          case Op::Wait:
            w = true;
            break;
          case Op::Put:
          case Op::Get:
          case Op::Rcas:
          case Op::Rfaa:
            (in.wid >= 0 ? w : t) = true;
            check_addressing(in, thread);
            break;
          case Op::Poll:
          case Op::SetAdd:
          case Op::SetRemove:
          case Op::SetIsEmpty:
            t = true;
            break;
          case Op::GFence:
          case Op::BrlWrite:
          case Op::BrlRead:
          case Op::BrlBcast:
          case Op::BrlWait:
          case Op::AcqWl:
          case Op::RelWl:
          case Op::AcqSl:
          case Op::RelSl:
          case Op::AcqNl:
          case Op::RelNl:
          case Op::ScWrite:
          case Op::ScRead:
          case Op::ScCas:
          case Op::ScFaa:
            l = true;
            break;
          case Op::CpuWrite:
          case Op::CpuRead:
          case Op::CpuCas:
            check_addressing(in, thread);
            break;
          default:
            break;
        }
      }
      scan_body(s.a, thread, w, t, l);
      scan_body(s.b, thread, w, t, l);
    }
  }

  void check_addressing(const Instr& in, int thread) {
    int tnode = test_.threads[thread].node;
    auto local = [&](int loc, const char* what) {
      if (loc >= 0 && test_.locations[loc].node != tnode)
        throw ParseError(std::string(what) + " '" + test_.locations[loc].name +
                             "' is not on thread's node",
                         0, 0);
    };
    switch (in.op) {
      case Op::CpuWrite:
      case Op::CpuRead:
      case Op::CpuCas:
        local(in.loc, "CPU-accessed location");
        break;
      case Op::Put:
        local(in.loc2, "put source");
        break;
      case Op::Get:
      case Op::Rcas:
      case Op::Rfaa:
        local(in.loc, "result location");
        break;
      default:
        break;
    }
  }

  Lexer lx_;
  LitmusTest test_;
  int cur_thread_ = -1;
  int cur_node_ = 1;
  bool has_any_op_ = false;
  std::optional<Dialect> declared_dialect_;
};

}  // namespace detail

/// Parses one litmus test. Throws ParseError with line/column on bad input.
inline LitmusTest parse_litmus(const std::string& text, const std::string& name = "test") {
  return detail::Parser(text, name).run();
}

// ---------------------------------------------------------------------------
// Pretty-printer. parse(pretty(t)) reproduces t up to register/wid numbering.
// ---------------------------------------------------------------------------

namespace detail {

class Printer {
 public:
  explicit Printer(const LitmusTest& t) : t_(t) {}

  std::string run() {
    os_ << "nodes " << t_.num_nodes << "\n";
    os_ << "model "
        << (t_.dialect == Dialect::Wait    ? "wait"
            : t_.dialect == Dialect::Tso   ? "tso"
                                           : "library")
        << "\n";
    for (const Location& l : t_.locations) {
      if (l.aux && l.kind != LocKind::Set) continue;  // re-derived, not surface syntax
      switch (l.kind) {
        case LocKind::Plain:
          os_ << "loc " << l.name << "@" << l.node;
          break;
        case LocKind::SVar:
          os_ << "svar " << l.name;
          break;
        case LocKind::Sc:
          os_ << "scloc " << l.name << "@" << l.node;
          break;
        case LocKind::Set:
          os_ << "set " << l.name << "@" << l.node;
          break;
        case LocKind::LockWl:
          os_ << "lock " << l.name << "@" << l.node << " wl";
          break;
        case LocKind::LockSl:
          os_ << "lock " << l.name << "@" << l.node << " sl";
          break;
        case LocKind::LockNl:
          os_ << "lock " << l.name << "@" << l.node << " nl";
          break;
      }
      if (l.init != 0 && !is_lock_kind(l.kind)) os_ << " = " << l.init;
      os_ << "\n";
    }
    for (std::size_t ti = 0; ti < t_.threads.size(); ++ti) {
      const Thread& th = t_.threads[ti];
      os_ << "thread " << th.name << "@" << th.node << " {\n";
      print_body(th.body, 1);
      os_ << "}\n";
    }
    for (const Assertion& a : t_.assertions)
      os_ << "assert " << (a.expect_allowed ? "allowed " : "forbidden ") << a.text << "\n";
    return os_.str();
  }

 private:
  void indent(int d) {
    for (int i = 0; i < d; ++i) os_ << "  ";
  }

  void print_body(const Body& b, int d) {
    for (const Stmt& s : b) print_stmt(s, d);
  }

  void print_stmt(const Stmt& s, int d) {
    indent(d);
    switch (s.kind) {
      case Stmt::Kind::Break:
        os_ << "break;\n";
        return;
      case Stmt::Kind::Choice:
        os_ << "choice {\n";
        print_body(s.a, d + 1);
        indent(d);
        os_ << "} or {\n";
        print_body(s.b, d + 1);
        indent(d);
        os_ << "}\n";
        return;
      case Stmt::Kind::Loop:
        os_ << (s.star ? "loop {\n" : "spin {\n");
        print_body(s.a, d + 1);
        indent(d);
        os_ << "}\n";
        return;
      case Stmt::Kind::If:
        os_ << "if " << val(s.cond.lhs) << (s.cond.eq ? " == " : " != ") << val(s.cond.rhs)
            << " {\n";
        print_body(s.a, d + 1);
        indent(d);
        os_ << "}";
        if (!s.b.empty()) {
          os_ << " else {\n";
          print_body(s.b, d + 1);
          indent(d);
          os_ << "}";
        }
        os_ << "\n";
        return;
      case Stmt::Kind::Instr:
        print_instr(s.instr);
        return;
    }
  }

  std::string val(const ValExpr& v) const {
    if (!v.is_reg) return std::to_string(v.lit);
    std::string s = t_.registers[v.reg].name;
    if (v.lit > 0) s += " + " + std::to_string(v.lit);
    if (v.lit < 0) s += " - " + std::to_string(-v.lit);
    return s;
  }

  std::string loc(int l) const { return t_.locations[l].name; }
  std::string wid(int w) const { return t_.wids[w]; }
  std::string reg(int r) const { return t_.registers[r].name; }

  void id_suffix(const Instr& in) {
    if (in.reg >= 0) os_ << " -> " << reg(in.reg);
  }

  void print_instr(const Instr& in) {
    switch (in.op) {
      case Op::CpuWrite:
        os_ << loc(in.loc) << " := " << val(in.a);
        break;
      case Op::CpuRead:
        os_ << reg(in.reg) << " := " << loc(in.loc);
        break;
      case Op::CpuCas:
        os_ << reg(in.reg) << " := cas(" << loc(in.loc) << ", " << val(in.a) << ", "
            << val(in.b) << ")";
        break;
      case Op::Mfence:
        os_ << "mfence";
        break;
      case Op::Put:
        os_ << "put(" << loc(in.loc) << ", " << (in.src_is_lit ? val(in.a) : loc(in.loc2));
        if (in.wid >= 0) os_ << ", " << wid(in.wid);
        os_ << ")";
        id_suffix(in);
        break;
      case Op::Get:
        os_ << "get(" << loc(in.loc) << ", " << loc(in.loc2);
        if (in.wid >= 0) os_ << ", " << wid(in.wid);
        os_ << ")";
        id_suffix(in);
        break;
      case Op::Wait:
        os_ << "wait(" << wid(in.wid) << ")";
        break;
      case Op::Rfence:
        os_ << "rfence(" << in.node << ")";
        break;
      case Op::Rcas:
        os_ << "rcas(" << loc(in.loc) << ", " << loc(in.loc2) << ", " << val(in.a) << ", "
            << val(in.b);
        if (in.wid >= 0) os_ << ", " << wid(in.wid);
        os_ << ")";
        id_suffix(in);
        break;
      case Op::Rfaa:
        os_ << "rfaa(" << loc(in.loc) << ", " << loc(in.loc2) << ", " << val(in.a);
        if (in.wid >= 0) os_ << ", " << wid(in.wid);
        os_ << ")";
        id_suffix(in);
        break;
      case Op::Poll:
        if (in.reg >= 0) os_ << reg(in.reg) << " := ";
        os_ << "poll(" << in.node << ")";
        break;
      case Op::GFence:
        os_ << "gfence(" << nodeset(in.nodes) << ")";
        break;
      case Op::BrlWrite:
        os_ << "brlwrite(" << loc(in.loc) << ", " << val(in.a) << ")";
        break;
      case Op::BrlRead:
        os_ << reg(in.reg) << " := brlread(" << loc(in.loc) << ")";
        break;
      case Op::BrlBcast:
        os_ << "bcast(" << loc(in.loc) << ", " << wid(in.wid);
        if (!in.nodes.empty()) os_ << ", " << nodeset(in.nodes);
        os_ << ")";
        break;
      case Op::BrlWait:
        os_ << "brlwait(" << wid(in.wid) << ")";
        break;
      case Op::AcqWl:
        os_ << "acq_wl(" << loc(in.loc) << ")";
        break;
      case Op::RelWl:
        os_ << "rel_wl(" << loc(in.loc) << ")";
        break;
      case Op::AcqSl:
        os_ << "acq_sl(" << loc(in.loc) << ")";
        break;
      case Op::RelSl:
        os_ << "rel_sl(" << loc(in.loc) << ")";
        break;
      case Op::AcqNl:
        os_ << "acq_nl(" << loc(in.loc) << ")";
        break;
      case Op::RelNl:
        os_ << "rel_nl(" << loc(in.loc) << ")";
        break;
      case Op::ScWrite:
        os_ << "scwrite(" << loc(in.loc) << ", " << val(in.a) << ")";
        break;
      case Op::ScRead:
        os_ << reg(in.reg) << " := scread(" << loc(in.loc) << ")";
        break;
      case Op::ScCas:
        os_ << reg(in.reg) << " := sccas(" << loc(in.loc) << ", " << val(in.a) << ", "
            << val(in.b) << ")";
        break;
      case Op::ScFaa:
        os_ << reg(in.reg) << " := scfaa(" << loc(in.loc) << ", " << val(in.a) << ")";
        break;
      case Op::SetAdd:
        os_ << "setadd(" << loc(in.loc) << ", " << val(in.a) << ")";
        break;
      case Op::SetRemove:
        os_ << "setremove(" << loc(in.loc) << ", " << val(in.a) << ")";
        break;
      case Op::SetIsEmpty:
        os_ << reg(in.reg) << " := setisempty(" << loc(in.loc) << ")";
        break;
    }
    os_ << ";\n";
  }

  std::string nodeset(const std::vector<int>& ns) const {
    std::string s = "{";
    for (std::size_t i = 0; i < ns.size(); ++i) {
      if (i) s += ", ";
      s += std::to_string(ns[i]);
    }
    return s + "}";
  }

  const LitmusTest& t_;
  std::ostringstream os_;
};

}  // namespace detail

inline std::string pretty_print(const LitmusTest& t) { return detail::Printer(t).run(); }

}  // namespace rdmalit

#endif  // RDMALIT_PARSER_HPP_
