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

#include <memory>
#include <optional>

#include "sf/box.hpp"

namespace sf {

enum class AccessMode { Read, Write };

/// One array access: array id plus one affine index expression per array
/// dimension (outermost first).
struct AccessRelation {
  std::string array;
  std::vector<AffineExpr> indices;
  AccessMode mode = AccessMode::Read;
  std::string str() const;
};

struct ArrayInfo {
  std::vector<AffineExpr> extents; // per dimension, affine in parameters
  size_t rank() const { return extents.size(); }
};

/// Right-hand-side expression tree. Reads refer into the owning statement's
/// read list by position.
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;
struct Expr {
  enum class Op { Const, Read, Add, Sub, Mul, Div, Neg };
  Op op = Op::Const;
  double value = 0.0;
  int read_index = -1;
  ExprPtr a, b;

  static ExprPtr lit(double v);
  static ExprPtr read(int index);
  static ExprPtr binary(Op o, ExprPtr l, ExprPtr r);
  static ExprPtr neg(ExprPtr x);
};

/// One assignment in the innermost body: write = rhs over reads.
struct Statement {
  AccessRelation write;
  std::vector<AccessRelation> reads;
  ExprPtr rhs;
};

struct Param {
  std::string name;
  std::optional<long long> value; // optional default binding
};

struct ModConstraint {
  AffineExpr expr;
  long long modulus;
};

/// lo <= mid < hi
struct RangeConstraint {
  AffineExpr lo, mid, hi;
};

/// Lexicographic execution order: output dims over domain (and tile-origin)
/// symbols, restricted by the mod/range constraints produced by tiling.
struct Schedule {
  std::vector<AffineExpr> dims;
  std::vector<ModConstraint> mods;
  std::vector<RangeConstraint> ranges;
};

struct Scop {
  std::string name;
  std::vector<Param> params;
  std::vector<std::string> iter_vars; // outermost first
  Box domain;                         // shared by all statements
  std::vector<std::pair<std::string, ArrayInfo>> arrays;
  std::vector<Statement> statements;
  Schedule schedule;

  size_t depth() const { return iter_vars.size(); }
  const ArrayInfo &array(const std::string &id) const;
  /// Default parameter values merged with overrides; throws when a parameter
  /// stays unbound.
  Binding bind_params(const Binding &overrides = {}) const;
  /// Collects (statement, access) pairs; write first per statement.
  std::vector<std::pair<int, const AccessRelation *>> all_accesses() const;
};

std::string expr_str(const ExprPtr &e, const Statement &stmt,
                     const std::function<std::string(const AccessRelation &)> &acc);

} // namespace sf
