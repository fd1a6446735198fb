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
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "sf/error.hpp"

namespace sf {

/// Symbol -> value environment. Holds both loop indices and size parameters.
using Binding = std::map<std::string, long long>;

/// Integer-linear expression over loop-index symbols and size parameters.
/// No division or modulo; equality is decidable by coefficient comparison.
struct AffineExpr {
  std::map<std::string, long long> coeffs;       // loop-index symbols
  std::map<std::string, long long> param_coeffs; // size parameters
  long long constant = 0;

  static AffineExpr constant_of(long long v);
  static AffineExpr var(const std::string &name, long long c = 1);
  static AffineExpr param(const std::string &name, long long c = 1);

  AffineExpr operator+(const AffineExpr &o) const;
  AffineExpr operator-(const AffineExpr &o) const;
  AffineExpr operator*(long long k) const;
  AffineExpr operator-() const { return *this * -1; }
  AffineExpr operator+(long long k) const;
  AffineExpr operator-(long long k) const { return *this + (-k); }
  bool operator==(const AffineExpr &o) const;

  bool is_constant() const;       // no symbols at all
  bool has_vars() const;          // any loop-index symbol
  long long coeff(const std::string &v) const;
  long long param_coeff(const std::string &p) const;
  std::set<std::string> vars() const;

  /// Evaluates under a binding; throws UnboundParameter for missing symbols.
  long long eval(const Binding &b) const;

  /// Substitutes a loop-index symbol by an expression.
  AffineExpr subst_var(const std::string &v, const AffineExpr &e) const;

  std::string str() const;

private:
  void prune();
};

/// Minimum over a set of affine terms. Loop upper bounds and trimmed ship
/// extents are expressions of this shape (a plain AffineExpr is the
/// single-term case).
struct MinExpr {
  std::vector<AffineExpr> terms;

  static MinExpr of(const AffineExpr &e) { return MinExpr{{e}}; }
  bool is_single() const { return terms.size() == 1; }
  const AffineExpr &single() const { return terms.front(); }

  MinExpr operator+(const AffineExpr &e) const;
  MinExpr operator+(long long k) const;
  MinExpr operator-(const AffineExpr &e) const;
  MinExpr operator-(long long k) const { return *this + (-k); }

  long long eval(const Binding &b) const;
  void add_term(const AffineExpr &e); // drops terms dominated by a constant gap
  std::string str() const;
  bool operator==(const MinExpr &o) const { return terms == o.terms; }
};

long long floor_div(long long a, long long b);
long long ceil_div(long long a, long long b);
long long gcd_ll(long long a, long long b);

} // namespace sf
