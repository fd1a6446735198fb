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

#include "sf/scop.hpp"

namespace sf {

/// (SZ, p, delta): tile sizes per dimension, intra-tile loop permutation,
/// and the shift vector. After the normalization shifts, delta_x^o is the
/// negated lower bound of loop x and delta_x^i is symbolically -ti.
struct TilingSpec {
  std::vector<long long> sizes;
  std::vector<int> perm; // perm[s] = original dimension at intra position s
  struct Delta {
    long long outer = 0;
    bool inner_neg_ti = false; // NEG_TI
  };
  std::vector<Delta> delta;
};

/// Per-dimension tiling state. `tile_var` is the inter-tile loop symbol.
struct TileDim {
  std::string var;      // original loop symbol (also the shifted intra symbol)
  std::string tile_var; // ti, tj, ...
  AffineExpr lb, ub;    // original inclusive bounds (lb constant)
  long long size = 0;
  long long stride = 1;
};

struct TiledScop {
  Scop scop;
  TilingSpec spec;
  std::vector<TileDim> dims;
  bool outer_shifted = false;
  bool inner_shifted = false;
  bool padded = false;
  Schedule schedule2;

  size_t depth() const { return dims.size(); }
  int intra_dim(size_t pos) const { return spec.perm[pos]; }
  int innermost_dim() const { return spec.perm[depth() - 1]; }

  /// First inter-tile origin of dimension x (constant after shift_outer).
  long long first_tile_start(int x) const;
  /// Inter-tile origins of dimension x under a binding.
  std::vector<long long> tile_starts(int x, const Binding &b) const;

  /// Schedule position of a domain point (2d-dimensional vector).
  std::vector<long long> schedule_point(const std::vector<long long> &iter) const;

  /// Full tile window of dimension x anchored at its tile variable.
  BoxDim full_tile_dim(int x) const;
  /// Iteration box of one full tile over the original loop symbols,
  /// anchored at the tile variables (kept symbolic).
  NamedBox full_tile_box() const;
  /// Names of all tile variables.
  std::set<std::string> tile_var_set() const;
};

/// Normal-form tiling T(SZ, p, 0): inter-tile loops outermost in original
/// order, intra-tile loops permuted by p. Requires SZ_x divisible by the
/// loop stride.
TiledScop tile(const Scop &s, const std::vector<long long> &sizes,
               const std::vector<int> &perm);

/// delta^o := -lb. First tile becomes full; intra lower bounds become ti.
TiledScop shift_outer(const TiledScop &t);

/// delta^i := -ti. Intra loops run from 0; body indices rewritten i -> i+ti.
TiledScop shift_inner(const TiledScop &t);

/// Pads the innermost (post-permutation) intra loop to a constant trip
/// count; padded points are tracked by predicate, not materialized.
TiledScop pad_innermost(const TiledScop &t);

TiledScop apply_standard_tiling(const Scop &s, const std::vector<long long> &sizes,
                                const std::vector<int> &perm, bool pad = true);

/// Constant-distance dependence between two accesses of one array.
struct Dep {
  std::string array;
  int a_stmt, a_access; // -1 access index = the write
  int b_stmt, b_access;
  bool constant = true;
  std::vector<long long> distance; // iteration-space distance (b - a)
};

struct DependenceInfo {
  std::vector<Dep> deps;
  bool any_nonconstant = false;
  bool any_carried = false; // some constant distance != 0
  /// True when accesses a and b (flat indices) are linked by a dependence.
  std::vector<std::pair<int, int>> access_pairs; // flat indices into Scop::all_accesses
  /// Accesses involved in a dependence without a constant distance,
  /// including writes that alias themselves across iterations (reductions);
  /// caching them would let padded iterations corrupt live cells.
  std::set<int> nonconstant_members;
};

DependenceInfo analyze_dependences(const Scop &s);

/// All intra-tile permutations that keep every dependence legal under the
/// tiled schedule. Carried constant dependences rule out tiling entirely;
/// non-constant distances conservatively permit only the identity.
std::vector<std::vector<int>> legal_permutations(const Scop &s,
                                                 const std::vector<long long> &sizes);

/// Per-tile (points_in_window, valid_points) along dimension x, in tile order.
std::vector<std::pair<long long, long long>>
tile_iteration_counts(const TiledScop &t, int x, const Binding &b);

} // namespace sf
