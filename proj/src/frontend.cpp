/*
 * Copyright 2026 The stencil-forge authors
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
#include "sf/frontend.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace sf {
namespace {

struct Token {
  enum class Kind { Ident, Int, Float, Sym, End } kind;
  std::string text;
  long long ival = 0;
  double fval = 0;
  int line = 0, col = 0;
};

class Lexer {
public:
  explicit Lexer(const std::string &src) : src_(src) { advance(); }

  const Token &peek() const { return tok_; }
  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

private:
  void advance() {
    skip_ws();
    tok_ = Token{Token::Kind::End, "", 0, 0, line_, col_};
    if (pos_ >= src_.size()) return;
    char c = src_[pos_];
    tok_.line = line_;
    tok_.col = col_;
    if (std::isalpha((unsigned char)c) || c == '_') {
      std::string s;
      while (pos_ < src_.size() &&
             (std::isalnum((unsigned char)src_[pos_]) || src_[pos_] == '_'))
        s += take();
      tok_.kind = Token::Kind::Ident;
      tok_.text = s;
      return;
    }
    if (std::isdigit((unsigned char)c)) {
      std::string s;
      bool isfloat = false;
      while (pos_ < src_.size() && std::isdigit((unsigned char)src_[pos_]))
        s += take();
      if (pos_ + 1 < src_.size() && src_[pos_] == '.' &&
          src_[pos_ + 1] != '.') { // "1..N" keeps the range token intact
        isfloat = true;
        s += take();
        while (pos_ < src_.size() && std::isdigit((unsigned char)src_[pos_]))
          s += take();
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        isfloat = true;
        s += take();
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
          s += take();
        while (pos_ < src_.size() && std::isdigit((unsigned char)src_[pos_]))
          s += take();
      }
      if (isfloat) {
        tok_.kind = Token::Kind::Float;
        tok_.fval = std::stod(s);
      } else {
        tok_.kind = Token::Kind::Int;
        tok_.ival = std::stoll(s);
      }
      tok_.text = s;
      return;
    }
    if (c == '.' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '.') {
      take();
      take();
      tok_.kind = Token::Kind::Sym;
      tok_.text = "..";
      return;
    }
    tok_.kind = Token::Kind::Sym;
    tok_.text = std::string(1, take());
  }

  void skip_ws() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#' || (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/')) {
        while (pos_ < src_.size() && src_[pos_] != '\n') take();
      } else if (std::isspace((unsigned char)c)) {
        take();
      } else {
        break;
      }
    }
  }

  char take() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  const std::string &src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

class Parser {
public:
  Parser(const std::string &src, const std::string &name)
      : lex_(src), name_(name) {}

  StencilProgram run() {
    StencilProgram p;
    p.name = name_;
    bool saw_loop = false;
    while (lex_.peek().kind != Token::Kind::End) {
      const Token &t = lex_.peek();
      if (t.kind != Token::Kind::Ident)
        err(t, "expected declaration or loop");
      if (t.text == "param") {
        parse_param(p);
      } else if (t.text == "array") {
        parse_array(p);
      } else if (t.text == "loop") {
        if (saw_loop)
          fail(ErrCode::NonCanonicalNest,
               pos(t) + " more than one top-level loop nest");
        saw_loop = true;
        parse_loop(p, 0);
      } else {
        err(t, "unexpected '" + t.text + "'");
      }
    }
    if (!saw_loop)
      fail(ErrCode::NonCanonicalNest, "program has no loop nest");
    if (p.loops.size() > 3)
      fail(ErrCode::NonCanonicalNest,
           "loop nest depth " + std::to_string(p.loops.size()) + " exceeds 3");
    return p;
  }

private:
  [[noreturn]] void err(const Token &t, const std::string &msg) {
    fail(ErrCode::ParseError, pos(t) + " " + msg);
  }

  std::string pos(const Token &t) {
    return std::to_string(t.line) + ":" + std::to_string(t.col);
  }

  Token expect_sym(const std::string &s) {
    Token t = lex_.next();
    if (t.kind != Token::Kind::Sym || t.text != s)
      err(t, "expected '" + s + "'");
    return t;
  }

  Token expect_ident() {
    Token t = lex_.next();
    if (t.kind != Token::Kind::Ident) err(t, "expected identifier");
    return t;
  }

  bool peek_sym(const std::string &s) {
    return lex_.peek().kind == Token::Kind::Sym && lex_.peek().text == s;
  }

  void check_fresh(const Token &t) {
    if (params_.count(t.text) || arrays_.count(t.text) ||
        loop_vars_.count(t.text))
      err(t, "duplicate symbol '" + t.text + "'");
  }

  void parse_param(StencilProgram &p) {
    lex_.next();
    Token id = expect_ident();
    check_fresh(id);
    Param pr{id.text, std::nullopt};
    if (peek_sym("=")) {
      lex_.next();
      Token v = lex_.next();
      if (v.kind != Token::Kind::Int) err(v, "expected integer default");
      pr.value = v.ival;
    }
    params_.insert(id.text);
    p.params.push_back(pr);
  }

  void parse_array(StencilProgram &p) {
    lex_.next();
    Token id = expect_ident();
    check_fresh(id);
    Token ty = expect_ident();
    if (ty.text != "float") err(ty, "only float arrays are supported");
    ArrayInfo info;
    while (peek_sym("[")) {
      lex_.next();
      info.extents.push_back(parse_affine(/*allow_loop_vars=*/false));
      expect_sym("]");
    }
    if (info.extents.empty()) err(id, "array needs at least one dimension");
    arrays_.insert(id.text);
    p.arrays.emplace_back(id.text, info);
  }

  void parse_loop(StencilProgram &p, size_t depth) {
    Token kw = lex_.next(); // 'loop'
    if (depth >= 3)
      fail(ErrCode::NonCanonicalNest, pos(kw) + " loop nest deeper than 3");
    Token id = expect_ident();
    check_fresh(id);
    expect_sym("=");
    AffineExpr lo = parse_affine(false);
    expect_sym("..");
    AffineExpr hi = parse_affine(false);
    long long step = 1;
    if (lex_.peek().kind == Token::Kind::Ident && lex_.peek().text == "step") {
      lex_.next();
      Token s = lex_.next();
      if (s.kind != Token::Kind::Int || s.ival < 1)
        err(s, "step must be a positive integer");
      step = s.ival;
    }
    loop_vars_.insert(id.text);
    p.loops.push_back(LoopHeader{id.text, lo, hi, step});
    expect_sym("{");
    bool nested = false, stmts = false;
    while (!peek_sym("}")) {
      const Token &t = lex_.peek();
      if (t.kind == Token::Kind::Ident && t.text == "loop") {
        if (nested || stmts)
          fail(ErrCode::NonCanonicalNest,
               pos(t) + " loop nest is not perfectly nested");
        nested = true;
        parse_loop(p, depth + 1);
      } else if (t.kind == Token::Kind::Ident && t.text == "let") {
        if (nested)
          fail(ErrCode::NonCanonicalNest,
               pos(t) + " statement after nested loop");
        stmts = true;
        parse_let();
      } else if (t.kind == Token::Kind::Ident) {
        if (nested)
          fail(ErrCode::NonCanonicalNest,
               pos(t) + " statement after nested loop");
        stmts = true;
        parse_assign(p);
      } else {
        err(t, "unexpected token '" + t.text + "'");
      }
    }
    expect_sym("}");
    if (!nested && !stmts)
      fail(ErrCode::NonCanonicalNest, pos(kw) + " empty loop body");
    lets_.clear(); // scalar temporaries do not outlive one body
  }

  void parse_let() {
    lex_.next();
    Token id = expect_ident();
    if (params_.count(id.text) || arrays_.count(id.text) || loop_vars_.count(id.text))
      err(id, "let shadows a declared symbol");
    expect_sym("=");
    Statement scratch;
    ExprPtr e = parse_expr(scratch);
    expect_sym(";");
    lets_[id.text] = {e, scratch.reads};
  }

  void parse_assign(StencilProgram &p) {
    Token id = expect_ident();
    if (!arrays_.count(id.text)) err(id, "write target '" + id.text + "' is not an array");
    Statement st;
    st.write.array = id.text;
    st.write.mode = AccessMode::Write;
    st.write.indices = parse_subscripts();
    expect_sym("=");
    st.rhs = parse_expr(st);
    expect_sym(";");
    p.statements.push_back(std::move(st));
  }

  std::vector<AffineExpr> parse_subscripts() {
    expect_sym("[");
    std::vector<AffineExpr> idx;
    idx.push_back(parse_affine(true));
    while (peek_sym(",")) {
      lex_.next();
      idx.push_back(parse_affine(true));
    }
    expect_sym("]");
    return idx;
  }

  // affine := term (('+'|'-') term)*
  AffineExpr parse_affine(bool allow_loop_vars) {
    AffineExpr acc = parse_affine_term(allow_loop_vars);
    while (peek_sym("+") || peek_sym("-")) {
      bool plus = lex_.next().text == "+";
      AffineExpr t = parse_affine_term(allow_loop_vars);
      acc = plus ? acc + t : acc - t;
    }
    return acc;
  }

  // term := factor ('*' factor)* with at most one non-constant factor
  AffineExpr parse_affine_term(bool allow_loop_vars) {
    AffineExpr acc = parse_affine_factor(allow_loop_vars);
    while (peek_sym("*")) {
      Token star = lex_.next();
      AffineExpr f = parse_affine_factor(allow_loop_vars);
      if (acc.is_constant())
        acc = f * acc.constant;
      else if (f.is_constant())
        acc = acc * f.constant;
      else
        fail(ErrCode::NonAffine,
             pos(star) + " product of two non-constant expressions");
    }
    return acc;
  }

  AffineExpr parse_affine_factor(bool allow_loop_vars) {
    Token t = lex_.next();
    if (t.kind == Token::Kind::Int) return AffineExpr::constant_of(t.ival);
    if (t.kind == Token::Kind::Float)
      fail(ErrCode::NonAffine, pos(t) + " float literal in index expression");
    if (t.kind == Token::Kind::Ident) {
      if (loop_vars_.count(t.text)) {
        if (!allow_loop_vars)
          fail(ErrCode::NonCanonicalNest,
               pos(t) + " loop bound depends on loop variable '" + t.text +
                   "' (non-rectangular domain)");
        return AffineExpr::var(t.text);
      }
      if (params_.count(t.text)) return AffineExpr::param(t.text);
      err(t, "unknown symbol '" + t.text + "' in index expression");
    }
    if (t.kind == Token::Kind::Sym && t.text == "(") {
      AffineExpr e = parse_affine(allow_loop_vars);
      expect_sym(")");
      return e;
    }
    if (t.kind == Token::Kind::Sym && t.text == "-")
      return -parse_affine_factor(allow_loop_vars);
    if (t.kind == Token::Kind::Sym && t.text == "/")
      fail(ErrCode::NonAffine, pos(t) + " division in index expression");
    err(t, "expected index expression");
  }

  // float-valued body expression
  ExprPtr parse_expr(Statement &st) {
    ExprPtr acc = parse_mul(st);
    while (peek_sym("+") || peek_sym("-")) {
      bool plus = lex_.next().text == "+";
      acc = Expr::binary(plus ? Expr::Op::Add : Expr::Op::Sub, acc, parse_mul(st));
    }
    return acc;
  }

  ExprPtr parse_mul(Statement &st) {
    ExprPtr acc = parse_unary(st);
    while (peek_sym("*") || peek_sym("/")) {
      bool mul = lex_.next().text == "*";
      acc = Expr::binary(mul ? Expr::Op::Mul : Expr::Op::Div, acc, parse_unary(st));
    }
    return acc;
  }

  ExprPtr parse_unary(Statement &st) {
    if (peek_sym("-")) {
      lex_.next();
      return Expr::neg(parse_unary(st));
    }
    return parse_primary(st);
  }

  ExprPtr parse_primary(Statement &st) {
    Token t = lex_.next();
    if (t.kind == Token::Kind::Float) return Expr::lit(t.fval);
    if (t.kind == Token::Kind::Int) return Expr::lit(double(t.ival));
    if (t.kind == Token::Kind::Sym && t.text == "(") {
      ExprPtr e = parse_expr(st);
      expect_sym(")");
      return e;
    }
    if (t.kind == Token::Kind::Ident) {
      if (arrays_.count(t.text)) {
        AccessRelation a;
        a.array = t.text;
        a.mode = AccessMode::Read;
        a.indices = parse_subscripts();
        st.reads.push_back(a);
        return Expr::read(int(st.reads.size()) - 1);
      }
      auto it = lets_.find(t.text);
      if (it != lets_.end()) return inline_let(it->second, st);
      err(t, "unknown scalar '" + t.text + "' (temporaries must be assigned before use)");
    }
    err(t, "expected expression");
  }

  struct LetDef {
    ExprPtr expr;
    std::vector<AccessRelation> reads;
  };

  // Re-bases the let's read indices into the consuming statement.
  ExprPtr inline_let(const LetDef &def, Statement &st) {
    int base = int(st.reads.size());
    for (auto &r : def.reads) st.reads.push_back(r);
    std::function<ExprPtr(const ExprPtr &)> clone = [&](const ExprPtr &e) -> ExprPtr {
      switch (e->op) {
      case Expr::Op::Const: return e;
      case Expr::Op::Read: return Expr::read(e->read_index + base);
      case Expr::Op::Neg: return Expr::neg(clone(e->a));
      default: return Expr::binary(e->op, clone(e->a), clone(e->b));
      }
    };
    return clone(def.expr);
  }

  Lexer lex_;
  std::string name_;
  std::set<std::string> params_, arrays_, loop_vars_;
  std::map<std::string, LetDef> lets_;
};

} // namespace

StencilProgram parse(const std::string &src, const std::string &name) {
  StencilProgram p = Parser(src, name).run();
  // rank checks for every access
  auto rank_of = [&](const std::string &id) -> size_t {
    for (auto &[n, info] : p.arrays)
      if (n == id) return info.rank();
    fail(ErrCode::ParseError, "unknown array " + id);
  };
  for (auto &st : p.statements) {
    if (st.write.indices.size() != rank_of(st.write.array))
      fail(ErrCode::ParseError, "subscript rank mismatch on " + st.write.array);
    for (auto &r : st.reads)
      if (r.indices.size() != rank_of(r.array))
        fail(ErrCode::ParseError, "subscript rank mismatch on " + r.array);
  }
  return p;
}

StencilProgram parse_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) fail(ErrCode::ParseError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string stem = path;
  if (auto p = stem.find_last_of('/'); p != std::string::npos) stem = stem.substr(p + 1);
  if (auto p = stem.find_last_of('.'); p != std::string::npos) stem = stem.substr(0, p);
  for (auto &c : stem)
    if (!std::isalnum((unsigned char)c)) c = '_';
  return parse(ss.str(), stem);
}

std::string pretty(const StencilProgram &p) {
  std::ostringstream os;
  for (auto &pr : p.params) {
    os << "param " << pr.name;
    if (pr.value) os << " = " << *pr.value;
    os << "\n";
  }
  for (auto &[name, info] : p.arrays) {
    os << "array " << name << " float";
    for (auto &e : info.extents) os << "[" << e.str() << "]";
    os << "\n";
  }
  std::string indent;
  for (size_t d = 0; d < p.loops.size(); ++d) {
    const LoopHeader &l = p.loops[d];
    os << indent << "loop " << l.var << " = " << l.lo.str() << " .. "
       << l.hi.str() << " step " << l.step << " {\n";
    indent += "  ";
  }
  auto acc = [](const AccessRelation &a) { return a.str(); };
  for (auto &st : p.statements)
    os << indent << st.write.str() << " = " << expr_str(st.rhs, st, acc) << ";\n";
  for (size_t d = p.loops.size(); d-- > 0;) {
    indent = std::string(d * 2, ' ');
    os << indent << "}\n";
  }
  return os.str();
}

Scop extract_scop(const StencilProgram &p) {
  Scop s;
  s.name = p.name;
  s.params = p.params;
  s.arrays = p.arrays;
  for (auto &l : p.loops) {
    s.iter_vars.push_back(l.var);
    s.domain.dims.push_back(BoxDim{l.lo, l.hi, l.step});
  }
  s.statements = p.statements;
  // identity schedule: S[i1..id] -> O[i1..id]
  for (auto &v : s.iter_vars)
    s.schedule.dims.push_back(AffineExpr::var(v));
  return s;
}

} // namespace sf
