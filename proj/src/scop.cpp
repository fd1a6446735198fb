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
#include "sf/scop.hpp"

#include <charconv>
#include <sstream>

namespace sf {

std::string AccessRelation::str() const {
  std::string s = array + "[";
  for (size_t i = 0; i < indices.size(); ++i) {
    if (i) s += ",";
    s += indices[i].str();
  }
  return s + "]";
}

ExprPtr Expr::lit(double v) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Const;
  e->value = v;
  return e;
}

ExprPtr Expr::read(int index) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Read;
  e->read_index = index;
  return e;
}

ExprPtr Expr::binary(Op o, ExprPtr l, ExprPtr r) {
  auto e = std::make_shared<Expr>();
  e->op = o;
  e->a = std::move(l);
  e->b = std::move(r);
  return e;
}

ExprPtr Expr::neg(ExprPtr x) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Neg;
  e->a = std::move(x);
  return e;
}

const ArrayInfo &Scop::array(const std::string &id) const {
  for (auto &[n, info] : arrays)
    if (n == id) return info;
  fail(ErrCode::Internal, "unknown array " + id);
}

Binding Scop::bind_params(const Binding &overrides) const {
  Binding b;
  for (auto &p : params) {
    auto it = overrides.find(p.name);
    if (it != overrides.end())
      b[p.name] = it->second;
    else if (p.value)
      b[p.name] = *p.value;
    else
      fail(ErrCode::UnboundParameter, "parameter " + p.name + " has no value");
  }
  return b;
}

std::vector<std::pair<int, const AccessRelation *>> Scop::all_accesses() const {
  std::vector<std::pair<int, const AccessRelation *>> out;
  for (size_t s = 0; s < statements.size(); ++s) {
    out.emplace_back(int(s), &statements[s].write);
    for (auto &r : statements[s].reads) out.emplace_back(int(s), &r);
  }
  return out;
}

static void render(const ExprPtr &e, const Statement &stmt,
                   const std::function<std::string(const AccessRelation &)> &acc,
                   std::ostringstream &os, int parent_prec) {
  auto prec = [](Expr::Op op) {
    switch (op) {
    case Expr::Op::Add:
    case Expr::Op::Sub: return 1;
    case Expr::Op::Mul:
    case Expr::Op::Div: return 2;
    default: return 3;
    }
  };
  int p = prec(e->op);
  bool paren = p < parent_prec;
  if (paren) os << "(";
  switch (e->op) {
  case Expr::Op::Const: {
    // shortest text that parses back to the same double
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, e->value);
    std::string s(buf, res.ptr);
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
      s += ".0";
    os << s;
    break;
  }
  case Expr::Op::Read: os << acc(stmt.reads[size_t(e->read_index)]); break;
  case Expr::Op::Neg:
    os << "-";
    render(e->a, stmt, acc, os, 3);
    break;
  case Expr::Op::Add:
  case Expr::Op::Sub:
  case Expr::Op::Mul:
  case Expr::Op::Div: {
    const char *sym = e->op == Expr::Op::Add   ? " + "
                      : e->op == Expr::Op::Sub ? " - "
                      : e->op == Expr::Op::Mul ? " * "
                                               : " / ";
    render(e->a, stmt, acc, os, p);
    os << sym;
    // right operand of - and / binds tighter
    render(e->b, stmt, acc, os,
           (e->op == Expr::Op::Sub || e->op == Expr::Op::Div) ? p + 1 : p);
    break;
  }
  }
  if (paren) os << ")";
}

std::string expr_str(const ExprPtr &e, const Statement &stmt,
                     const std::function<std::string(const AccessRelation &)> &acc) {
  std::ostringstream os;
  render(e, stmt, acc, os, 0);
  return os.str();
}

} // namespace sf
