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
#include "sf/affine.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace sf {

const char *err_name(ErrCode c) {
  switch (c) {
  case ErrCode::EmptyBox: return "EmptyBox";
  case ErrCode::RankMismatch: return "RankMismatch";
  case ErrCode::UnboundedImage: return "UnboundedImage";
  case ErrCode::UnboundParameter: return "UnboundParameter";
  case ErrCode::ParseError: return "ParseError";
  case ErrCode::NonAffine: return "NonAffine";
  case ErrCode::NonCanonicalNest: return "NonCanonicalNest";
  case ErrCode::NonConstantDependence: return "NonConstantDependence";
  case ErrCode::NoLegalTiling: return "NoLegalTiling";
  case ErrCode::UnburstableShip: return "UnburstableShip";
  case ErrCode::SentinelLeak: return "SentinelLeak";
  case ErrCode::OutOfFootprint: return "OutOfFootprint";
  case ErrCode::Internal: return "Internal";
  }
  return "Unknown";
}

long long floor_div(long long a, long long b) {
  long long q = a / b, r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return q;
}

long long ceil_div(long long a, long long b) { return -floor_div(-a, b); }

long long gcd_ll(long long a, long long b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b) {
    long long t = a % b;
    a = b;
    b = t;
  }
  return a;
}

AffineExpr AffineExpr::constant_of(long long v) {
  AffineExpr e;
  e.constant = v;
  return e;
}

AffineExpr AffineExpr::var(const std::string &name, long long c) {
  AffineExpr e;
  if (c != 0) e.coeffs[name] = c;
  return e;
}

AffineExpr AffineExpr::param(const std::string &name, long long c) {
  AffineExpr e;
  if (c != 0) e.param_coeffs[name] = c;
  return e;
}

void AffineExpr::prune() {
  for (auto it = coeffs.begin(); it != coeffs.end();)
    it = it->second == 0 ? coeffs.erase(it) : std::next(it);
  for (auto it = param_coeffs.begin(); it != param_coeffs.end();)
    it = it->second == 0 ? param_coeffs.erase(it) : std::next(it);
}

AffineExpr AffineExpr::operator+(const AffineExpr &o) const {
  AffineExpr r = *this;
  for (auto &[k, v] : o.coeffs) r.coeffs[k] += v;
  for (auto &[k, v] : o.param_coeffs) r.param_coeffs[k] += v;
  r.constant += o.constant;
  r.prune();
  return r;
}

AffineExpr AffineExpr::operator-(const AffineExpr &o) const {
  return *this + (o * -1);
}

AffineExpr AffineExpr::operator*(long long k) const {
  AffineExpr r;
  if (k == 0) return r;
  r = *this;
  for (auto &[_, v] : r.coeffs) v *= k;
  for (auto &[_, v] : r.param_coeffs) v *= k;
  r.constant *= k;
  return r;
}

AffineExpr AffineExpr::operator+(long long k) const {
  AffineExpr r = *this;
  r.constant += k;
  return r;
}

bool AffineExpr::operator==(const AffineExpr &o) const {
  return coeffs == o.coeffs && param_coeffs == o.param_coeffs &&
         constant == o.constant;
}

bool AffineExpr::is_constant() const {
  return coeffs.empty() && param_coeffs.empty();
}

bool AffineExpr::has_vars() const { return !coeffs.empty(); }

long long AffineExpr::coeff(const std::string &v) const {
  auto it = coeffs.find(v);
  return it == coeffs.end() ? 0 : it->second;
}

long long AffineExpr::param_coeff(const std::string &p) const {
  auto it = param_coeffs.find(p);
  return it == param_coeffs.end() ? 0 : it->second;
}

std::set<std::string> AffineExpr::vars() const {
  std::set<std::string> s;
  for (auto &[k, _] : coeffs) s.insert(k);
  return s;
}

long long AffineExpr::eval(const Binding &b) const {
  long long acc = constant;
  for (auto &[k, v] : coeffs) {
    auto it = b.find(k);
    if (it == b.end()) fail(ErrCode::UnboundParameter, "unbound symbol " + k);
    acc += v * it->second;
  }
  for (auto &[k, v] : param_coeffs) {
    auto it = b.find(k);
    if (it == b.end()) fail(ErrCode::UnboundParameter, "unbound parameter " + k);
    acc += v * it->second;
  }
  return acc;
}

AffineExpr AffineExpr::subst_var(const std::string &v, const AffineExpr &e) const {
  long long c = coeff(v);
  if (c == 0) return *this;
  AffineExpr r = *this;
  r.coeffs.erase(v);
  return r + e * c;
}

std::string AffineExpr::str() const {
  // positive terms first so bounds render as "N - ti - 2", not "-ti + N - 2"
  std::vector<std::pair<std::string, long long>> terms;
  for (auto &[k, v] : coeffs) terms.emplace_back(k, v);
  for (auto &[k, v] : param_coeffs) terms.emplace_back(k, v);
  std::stable_partition(terms.begin(), terms.end(),
                        [](auto &t) { return t.second > 0; });
  std::ostringstream os;
  bool first = true;
  for (auto &[name, c] : terms) {
    if (first) {
      if (c == -1)
        os << "-";
      else if (c != 1)
        os << c << "*";
      os << name;
      first = false;
      continue;
    }
    os << (c < 0 ? " - " : " + ");
    long long a = c < 0 ? -c : c;
    if (a != 1) os << a << "*";
    os << name;
  }
  if (first) {
    os << constant;
  } else if (constant != 0) {
    os << (constant < 0 ? " - " : " + ")
       << (constant < 0 ? -constant : constant);
  }
  return os.str();
}

MinExpr MinExpr::operator+(const AffineExpr &e) const {
  MinExpr r = *this;
  for (auto &t : r.terms) t = t + e;
  return r;
}

MinExpr MinExpr::operator+(long long k) const {
  MinExpr r = *this;
  for (auto &t : r.terms) t = t + k;
  return r;
}

MinExpr MinExpr::operator-(const AffineExpr &e) const {
  MinExpr r = *this;
  for (auto &t : r.terms) t = t - e;
  return r;
}

long long MinExpr::eval(const Binding &b) const {
  if (terms.empty()) fail(ErrCode::Internal, "empty MinExpr");
  long long m = terms.front().eval(b);
  for (size_t i = 1; i < terms.size(); ++i)
    m = std::min(m, terms[i].eval(b));
  return m;
}

void MinExpr::add_term(const AffineExpr &e) {
  for (auto &t : terms) {
    AffineExpr d = e - t;
    if (d.is_constant()) {
      // same linear part: keep the smaller constant
      if (d.constant < 0) t = e;
      return;
    }
  }
  terms.push_back(e);
}

std::string MinExpr::str() const {
  if (terms.size() == 1) return terms.front().str();
  std::string s = "min(";
  for (size_t i = 0; i < terms.size(); ++i) {
    if (i) s += ", ";
    s += terms[i].str();
  }
  return s + ")";
}

} // namespace sf
