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

#include <functional>
#include <optional>
#include <vector>

#include "sf/affine.hpp"

namespace sf {

/// One dimension of a rectangular strided integer set.
/// Membership: lo <= x <= hi and (x - lo) mod stride == 0.
/// Empty dimensions are represented as lo = hi + 1.
/// Domain boxes keep lo/hi in parameters only; analysis boxes (working sets,
/// tile windows) may reference enclosing loop symbols kept symbolic.
struct BoxDim {
  AffineExpr lo, hi;
  long long stride = 1;
};

struct Box {
  std::vector<BoxDim> dims;
  size_t rank() const { return dims.size(); }
  static Box empty_box(size_t rank);
};

/// Slot count of a dimension, counting the unused lattice gaps:
/// (hi - lo) + stride. For stride 1 this is the plain point count.
AffineExpr extent_slots(const BoxDim &d);

/// True when constants alone prove the box empty (no binding needed).
bool definitely_empty(const Box &b);
bool is_empty(const Box &b, const Binding &bind);

/// Per-dimension minimum corner. Throws EmptyBox.
std::vector<long long> lexmin_box(const Box &b, const Binding &bind);
/// Per-dimension maximum lattice corner. Throws EmptyBox.
std::vector<long long> lexmax_box(const Box &b, const Binding &bind);

/// Iteration set with named dimensions (loop variables, outermost first).
struct NamedBox {
  std::vector<std::string> vars;
  Box box;
};

/// Bounding box of { indices(x) : x in iter }. Variables of `indices` that
/// are not ranged by `iter` must be listed in `symbolic_ok` (they stay
/// symbolic in the result); anything else raises UnboundedImage.
Box image(const std::vector<AffineExpr> &indices, const NamedBox &iter,
          const std::set<std::string> &symbolic_ok = {});

struct IntersectResult {
  Box box;
  /// Set when unequal strides forced a conservative unstrided intersection.
  bool approximate = false;
};

/// Per-dimension interval intersection. Exact when strides divide one
/// another and offsets are comparable; approximate otherwise.
IntersectResult intersect(const Box &a, const Box &b);

/// Smallest box covering both operands (bounding box, not exact union).
Box union_bbox(const Box &a, const Box &b);

void for_each_point(const Box &b, const Binding &bind,
                    const std::function<void(const std::vector<long long> &)> &fn);
bool contains_point(const Box &b, const std::vector<long long> &p,
                    const Binding &bind);
long long point_count(const Box &b, const Binding &bind);

} // namespace sf
