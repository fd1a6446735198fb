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

#include "sf/tiler.hpp"

#include "json.hpp"

namespace sf {

enum class BufferKind { Full, Chunk, Line, Nc };
const char *kind_name(BufferKind k);

/// One fused access group and its buffer choice. Extents are bounding-box
/// slot counts before halo padding; cost is their product.
struct BufferPlan {
  std::string array;
  std::vector<int> accesses; // flat indices into Scop::all_accesses order
  BufferKind kind = BufferKind::Nc;
  std::vector<long long> extents;
  long long cost = 0;
  Box bbox;                       // symbolic; lo per dim is the anchor
  std::vector<AffineExpr> anchor; // DDR coordinates of the buffer origin
  int chunk_dim = -1;             // slab dimension for chunk buffers
  bool has_read = false, has_write = false;
  int write_access = -1; // flat index of the write when there is exactly one
  bool prefill = false;  // buffer is filled from DDR before compute
  long long halo_left = 0;
  long long padded_innermost_extent = 0;
  int width = 1; // effective burst width after halo feasibility
  std::string buffer_name;
  std::vector<std::string> diagnostics;

  bool cached() const { return kind != BufferKind::Nc; }
  /// Declared buffer shape: full extents with the innermost padded;
  /// line buffers collapse to one dimension.
  std::vector<long long> declared_shape() const;
};

struct PermutationChoice {
  std::vector<int> perm;
  std::vector<BufferPlan> plans;
  long long total_cost = 0;
};

/// Bounding box of an access over a partially fixed tile: fix_level 0 ranges
/// the whole tile, 1 fixes the outermost intra-tile index, d-1 fixes all but
/// the innermost. Fixed indices stay symbolic in the result.
Box working_set(const AccessRelation &a, const TiledScop &t, int fix_level);

/// Buffer kind + extents for one fused group under the tiling permutation.
/// Nc is the fallback for anything without a statically sized box.
BufferPlan classify_group(const std::vector<int> &accesses, const TiledScop &t);

struct FuseResult {
  enum class Outcome { Fused, Separate, AllNc } outcome;
  BufferPlan fused; // valid for Fused and AllNc
};

/// Fusion rule for two groups on one array: dependent overlapping groups
/// share a buffer (or become nc); dependence-free overlapping groups fuse
/// when the union is cheaper or both sides cost the same.
FuseResult fuse(const BufferPlan &a, const BufferPlan &b, bool dependent,
                const TiledScop &t);

std::vector<BufferPlan> build_plans(const TiledScop &t, const DependenceInfo &deps);

/// Evaluates every legal permutation; result sorted by evaluation order.
std::vector<PermutationChoice> evaluate_permutations(const Scop &s,
                                                     const std::vector<long long> &sizes);

/// Smallest total cost; ties broken by buffer speed (line < chunk < full),
/// then lexicographic permutation order. Throws NoLegalTiling.
PermutationChoice select_permutation(const Scop &s, const std::vector<long long> &sizes);

/// Rounds the innermost extent up for port width w and computes how many
/// halo elements sit left of the buffer. Falls back to width 1 when the
/// anchor residue varies across tiles.
BufferPlan add_halo(const BufferPlan &plan, int w, const TiledScop &t,
                    const Binding &binding);

nlohmann::json plan_report(const Scop &s, const std::vector<long long> &sizes,
                           const std::vector<PermutationChoice> &all,
                           const PermutationChoice &chosen);

} // namespace sf
