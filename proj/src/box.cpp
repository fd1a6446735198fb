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
#include "sf/box.hpp"

#include <algorithm>

namespace sf {

Box Box::empty_box(size_t rank) {
  Box b;
  b.dims.resize(rank);
  for (auto &d : b.dims) {
    d.lo = AffineExpr::constant_of(0);
    d.hi = AffineExpr::constant_of(-1);
    d.stride = 1;
  }
  return b;
}

AffineExpr extent_slots(const BoxDim &d) {
  return d.hi - d.lo + d.stride;
}

bool definitely_empty(const Box &b) {
  for (auto &d : b.dims) {
    AffineExpr diff = d.hi - d.lo;
    if (diff.is_constant() && diff.constant < 0) return true;
  }
  return false;
}

bool is_empty(const Box &b, const Binding &bind) {
  for (auto &d : b.dims)
    if (d.hi.eval(bind) < d.lo.eval(bind)) return true;
  return false;
}

std::vector<long long> lexmin_box(const Box &b, const Binding &bind) {
  std::vector<long long> r;
  for (auto &d : b.dims) {
    long long lo = d.lo.eval(bind), hi = d.hi.eval(bind);
    if (hi < lo) fail(ErrCode::EmptyBox, "lexmin of empty box");
    r.push_back(lo);
  }
  return r;
}

std::vector<long long> lexmax_box(const Box &b, const Binding &bind) {
  std::vector<long long> r;
  for (auto &d : b.dims) {
    long long lo = d.lo.eval(bind), hi = d.hi.eval(bind);
    if (hi < lo) fail(ErrCode::EmptyBox, "lexmax of empty box");
    r.push_back(lo + floor_div(hi - lo, d.stride) * d.stride);
  }
  return r;
}

Box image(const std::vector<AffineExpr> &indices, const NamedBox &iter,
          const std::set<std::string> &symbolic_ok) {
  if (definitely_empty(iter.box)) return Box::empty_box(indices.size());
  Box out;
  for (const AffineExpr &e : indices) {
    // free part: parameters, constant, and symbols kept symbolic
    AffineExpr free_part;
    free_part.param_coeffs = e.param_coeffs;
    free_part.constant = e.constant;
    AffineExpr lo_sum, hi_sum;
    long long stride = 0;
    for (auto &[v, c] : e.coeffs) {
      auto it = std::find(iter.vars.begin(), iter.vars.end(), v);
      if (it == iter.vars.end()) {
        if (!symbolic_ok.count(v))
          fail(ErrCode::UnboundedImage, "variable " + v + " not ranged");
        free_part.coeffs[v] += c;
        continue;
      }
      const BoxDim &d = iter.box.dims[size_t(it - iter.vars.begin())];
      AffineExpr top = d.hi;
      if (d.stride != 1) {
        AffineExpr span = d.hi - d.lo;
        if (!span.is_constant())
          fail(ErrCode::UnboundedImage,
               "strided dimension with symbolic span for " + v);
        top = d.lo + floor_div(span.constant, d.stride) * d.stride;
      }
      lo_sum = lo_sum + (c > 0 ? d.lo : top) * c;
      hi_sum = hi_sum + (c > 0 ? top : d.lo) * c;
      stride = gcd_ll(stride, c * d.stride);
    }
    out.dims.push_back(BoxDim{free_part + lo_sum, free_part + hi_sum,
                              stride == 0 ? 1 : stride});
  }
  return out;
}

IntersectResult intersect(const Box &a, const Box &b) {
  if (a.rank() != b.rank())
    fail(ErrCode::RankMismatch, "intersect of boxes with different rank");
  IntersectResult res;
  for (size_t i = 0; i < a.rank(); ++i) {
    const BoxDim &x = a.dims[i], &y = b.dims[i];
    AffineExpr dlo = y.lo - x.lo, dhi = y.hi - x.hi;
    if (!dlo.is_constant() || !dhi.is_constant())
      fail(ErrCode::Internal, "intersect with non-comparable bounds");
    BoxDim d;
    d.lo = dlo.constant > 0 ? y.lo : x.lo;
    d.hi = dhi.constant < 0 ? y.hi : x.hi;
    long long sa = x.stride, sb = y.stride;
    if (sa == sb && sa == 1) {
      d.stride = 1;
    } else if (sb % sa == 0 || sa % sb == 0) {
      // exact when the fine lattice contains the coarse one
      const BoxDim &fine = sa <= sb ? x : y;
      const BoxDim &coarse = sa <= sb ? y : x;
      AffineExpr off = coarse.lo - fine.lo;
      if (!off.is_constant()) {
        d.stride = 1;
        res.approximate = true;
      } else if (off.constant % std::min(sa, sb) != 0) {
        // lattices never meet
        d.lo = AffineExpr::constant_of(0);
        d.hi = AffineExpr::constant_of(-1);
        d.stride = 1;
      } else {
        d.stride = std::max(sa, sb);
        // snap the lower bound up onto the coarse lattice
        AffineExpr delta = d.lo - coarse.lo;
        if (!delta.is_constant()) {
          d.stride = 1;
          res.approximate = true;
        } else if (long long rem = delta.constant % d.stride; rem != 0) {
          if (rem < 0) rem += d.stride;
          d.lo = d.lo + (d.stride - rem);
        }
      }
    } else {
      d.stride = 1;
      res.approximate = true;
    }
    res.box.dims.push_back(d);
  }
  return res;
}

Box union_bbox(const Box &a, const Box &b) {
  if (a.rank() != b.rank())
    fail(ErrCode::RankMismatch, "union_bbox of boxes with different rank");
  if (definitely_empty(a)) return b;
  if (definitely_empty(b)) return a;
  Box r;
  for (size_t i = 0; i < a.rank(); ++i) {
    const BoxDim &x = a.dims[i], &y = b.dims[i];
    AffineExpr dlo = y.lo - x.lo, dhi = y.hi - x.hi;
    if (!dlo.is_constant() || !dhi.is_constant())
      fail(ErrCode::Internal, "union_bbox with non-comparable bounds");
    BoxDim d;
    d.lo = dlo.constant < 0 ? y.lo : x.lo;
    d.hi = dhi.constant > 0 ? y.hi : x.hi;
    d.stride = gcd_ll(gcd_ll(x.stride, y.stride), dlo.constant);
    if (d.stride == 0) d.stride = x.stride;
    r.dims.push_back(d);
  }
  return r;
}

void for_each_point(const Box &b, const Binding &bind,
                    const std::function<void(const std::vector<long long> &)> &fn) {
  size_t n = b.rank();
  std::vector<long long> lo(n), hi(n), pt(n);
  for (size_t i = 0; i < n; ++i) {
    lo[i] = b.dims[i].lo.eval(bind);
    hi[i] = b.dims[i].hi.eval(bind);
    if (hi[i] < lo[i]) return;
  }
  std::function<void(size_t)> rec = [&](size_t d) {
    if (d == n) {
      fn(pt);
      return;
    }
    for (long long x = lo[d]; x <= hi[d]; x += b.dims[d].stride) {
      pt[d] = x;
      rec(d + 1);
    }
  };
  rec(0);
}

bool contains_point(const Box &b, const std::vector<long long> &p,
                    const Binding &bind) {
  if (p.size() != b.rank()) return false;
  for (size_t i = 0; i < b.rank(); ++i) {
    long long lo = b.dims[i].lo.eval(bind), hi = b.dims[i].hi.eval(bind);
    if (p[i] < lo || p[i] > hi) return false;
    if ((p[i] - lo) % b.dims[i].stride != 0) return false;
  }
  return true;
}

long long point_count(const Box &b, const Binding &bind) {
  long long n = 1;
  for (auto &d : b.dims) {
    long long lo = d.lo.eval(bind), hi = d.hi.eval(bind);
    if (hi < lo) return 0;
    n *= floor_div(hi - lo, d.stride) + 1;
  }
  return n;
}

} // namespace sf
