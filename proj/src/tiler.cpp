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
#include "sf/tiler.hpp"

#include <algorithm>
#include <numeric>

namespace sf {

long long TiledScop::first_tile_start(int x) const {
  const TileDim &d = dims[size_t(x)];
  long long lb = d.lb.constant;
  return outer_shifted ? lb : d.size * floor_div(lb, d.size);
}

std::vector<long long> TiledScop::tile_starts(int x, const Binding &b) const {
  const TileDim &d = dims[size_t(x)];
  long long ub = d.ub.eval(b);
  std::vector<long long> starts;
  for (long long t = first_tile_start(x); t <= ub; t += d.size)
    starts.push_back(t);
  return starts;
}

std::vector<long long>
TiledScop::schedule_point(const std::vector<long long> &iter) const {
  std::vector<long long> out;
  std::vector<long long> torigin(depth());
  for (size_t x = 0; x < depth(); ++x) {
    long long lb = dims[x].lb.constant, sz = dims[x].size;
    torigin[x] = outer_shifted ? lb + sz * floor_div(iter[x] - lb, sz)
                               : sz * floor_div(iter[x], sz);
    out.push_back(torigin[x]);
  }
  for (size_t s = 0; s < depth(); ++s) {
    int x = spec.perm[s];
    out.push_back(iter[size_t(x)] - (inner_shifted ? torigin[size_t(x)] : 0));
  }
  return out;
}

BoxDim TiledScop::full_tile_dim(int x) const {
  const TileDim &d = dims[size_t(x)];
  if (inner_shifted)
    return BoxDim{AffineExpr::constant_of(0),
                  AffineExpr::constant_of(d.size - 1), d.stride};
  AffineExpr t = AffineExpr::var(d.tile_var);
  return BoxDim{t, t + (d.size - 1), d.stride};
}

NamedBox TiledScop::full_tile_box() const {
  NamedBox nb;
  for (size_t x = 0; x < depth(); ++x) {
    nb.vars.push_back(dims[x].var);
    nb.box.dims.push_back(full_tile_dim(int(x)));
  }
  return nb;
}

std::set<std::string> TiledScop::tile_var_set() const {
  std::set<std::string> s;
  for (auto &d : dims) s.insert(d.tile_var);
  return s;
}

static Schedule build_schedule(const TiledScop &t) {
  Schedule sc;
  for (auto &d : t.dims) sc.dims.push_back(AffineExpr::var(d.tile_var));
  for (size_t s = 0; s < t.depth(); ++s) {
    const TileDim &d = t.dims[size_t(t.spec.perm[s])];
    AffineExpr e = AffineExpr::var(d.var);
    if (t.inner_shifted) e = e - AffineExpr::var(d.tile_var);
    sc.dims.push_back(e);
  }
  for (size_t x = 0; x < t.depth(); ++x) {
    const TileDim &d = t.dims[x];
    sc.mods.push_back(
        ModConstraint{AffineExpr::var(d.tile_var) + t.spec.delta[x].outer,
                      d.size});
    sc.ranges.push_back(RangeConstraint{AffineExpr::var(d.tile_var),
                                        AffineExpr::var(d.var),
                                        AffineExpr::var(d.tile_var) + d.size});
  }
  return sc;
}

TiledScop tile(const Scop &s, const std::vector<long long> &sizes,
               const std::vector<int> &perm) {
  size_t d = s.depth();
  if (sizes.size() != d || perm.size() != d)
    fail(ErrCode::Internal, "tiling spec rank mismatch");
  std::vector<bool> seen(d, false);
  for (int x : perm) {
    if (x < 0 || size_t(x) >= d || seen[size_t(x)])
      fail(ErrCode::Internal, "permutation is not a bijection");
    seen[size_t(x)] = true;
  }
  TiledScop t;
  t.scop = s;
  t.spec.sizes = sizes;
  t.spec.perm = perm;
  t.spec.delta.resize(d);
  for (size_t x = 0; x < d; ++x) {
    const BoxDim &dom = s.domain.dims[x];
    if (!dom.lo.is_constant())
      fail(ErrCode::NonCanonicalNest,
           "tiling requires a constant lower bound on loop " + s.iter_vars[x]);
    if (sizes[x] < 1) fail(ErrCode::Internal, "tile size must be >= 1");
    if (sizes[x] % dom.stride != 0)
      fail(ErrCode::Internal, "tile size of loop " + s.iter_vars[x] +
                                  " must be a multiple of its stride");
    TileDim td;
    td.var = s.iter_vars[x];
    td.tile_var = "t" + s.iter_vars[x];
    td.lb = dom.lo;
    td.ub = dom.hi;
    td.size = sizes[x];
    td.stride = dom.stride;
    t.dims.push_back(td);
  }
  t.schedule2 = build_schedule(t);
  return t;
}

TiledScop shift_outer(const TiledScop &in) {
  TiledScop t = in;
  t.outer_shifted = true;
  for (size_t x = 0; x < t.depth(); ++x)
    t.spec.delta[x].outer = -t.dims[x].lb.constant;
  t.schedule2 = build_schedule(t);
  return t;
}

TiledScop shift_inner(const TiledScop &in) {
  if (!in.outer_shifted)
    fail(ErrCode::Internal, "shift_inner requires shift_outer first");
  TiledScop t = in;
  t.inner_shifted = true;
  for (auto &d : t.spec.delta) d.inner_neg_ti = true;
  // Rewrite body indices i -> i + ti; the loop symbol now counts from 0.
  for (auto &st : t.scop.statements) {
    auto shift_access = [&](AccessRelation &a) {
      for (auto &e : a.indices)
        for (auto &d : t.dims)
          e = e.subst_var(d.var,
                          AffineExpr::var(d.var) + AffineExpr::var(d.tile_var));
    };
    shift_access(st.write);
    for (auto &r : st.reads) shift_access(r);
  }
  t.schedule2 = build_schedule(t);
  return t;
}

TiledScop pad_innermost(const TiledScop &in) {
  if (!in.inner_shifted)
    fail(ErrCode::Internal, "pad_innermost requires both shifts");
  TiledScop t = in;
  t.padded = true;
  return t;
}

TiledScop apply_standard_tiling(const Scop &s, const std::vector<long long> &sizes,
                                const std::vector<int> &perm, bool pad) {
  TiledScop t = shift_inner(shift_outer(tile(s, sizes, perm)));
  return pad ? pad_innermost(t) : t;
}

// ---------------------------------------------------------------------------
// Dependence analysis: constant distance vectors.

namespace {

struct Frac {
  long long n = 0, d = 1;
  void norm() {
    if (d < 0) { n = -n; d = -d; }
    long long g = gcd_ll(n, d);
    if (g > 1) { n /= g; d /= g; }
    if (n == 0) d = 1;
  }
  Frac operator-(const Frac &o) const { return mk(n * o.d - o.n * d, d * o.d); }
  Frac operator*(const Frac &o) const { return mk(n * o.n, d * o.d); }
  Frac operator/(const Frac &o) const { return mk(n * o.d, d * o.n); }
  bool zero() const { return n == 0; }
  static Frac mk(long long a, long long b) {
    Frac f{a, b};
    f.norm();
    return f;
  }
};

enum class SolveKind { NoSolution, Unique, Underdetermined };

// Solves M x = rhs over rationals. M is rows x cols.
SolveKind solve_linear(std::vector<std::vector<long long>> M,
                       std::vector<long long> rhs,
                       std::vector<long long> &out) {
  size_t rows = M.size(), cols = rows ? M[0].size() : 0;
  std::vector<std::vector<Frac>> A(rows, std::vector<Frac>(cols + 1));
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < cols; ++c) A[r][c] = Frac::mk(M[r][c], 1);
    A[r][cols] = Frac::mk(rhs[r], 1);
  }
  std::vector<int> pivot_of_col(cols, -1);
  size_t prow = 0;
  for (size_t c = 0; c < cols && prow < rows; ++c) {
    size_t sel = prow;
    while (sel < rows && A[sel][c].zero()) ++sel;
    if (sel == rows) continue;
    std::swap(A[sel], A[prow]);
    Frac inv = Frac::mk(A[prow][c].d, A[prow][c].n);
    for (size_t k = c; k <= cols; ++k) A[prow][k] = A[prow][k] * inv;
    for (size_t r = 0; r < rows; ++r) {
      if (r == prow || A[r][c].zero()) continue;
      Frac f = A[r][c];
      for (size_t k = c; k <= cols; ++k) A[r][k] = A[r][k] - f * A[prow][k];
    }
    pivot_of_col[c] = int(prow);
    ++prow;
  }
  for (size_t r = prow; r < rows; ++r)
    if (!A[r][cols].zero()) return SolveKind::NoSolution;
  for (size_t c = 0; c < cols; ++c)
    if (pivot_of_col[c] < 0) return SolveKind::Underdetermined;
  out.assign(cols, 0);
  for (size_t c = 0; c < cols; ++c) {
    Frac v = A[size_t(pivot_of_col[c])][cols];
    if (v.d != 1) return SolveKind::NoSolution; // lattice never meets
    out[c] = v.n;
  }
  return SolveKind::Unique;
}

} // namespace

DependenceInfo analyze_dependences(const Scop &s) {
  DependenceInfo info;
  auto flat = s.all_accesses();
  // writes that reach the same cell from several iterations (rank-deficient
  // index maps, e.g. reductions) depend on themselves non-constantly
  for (size_t ia = 0; ia < flat.size(); ++ia) {
    const AccessRelation &w = *flat[ia].second;
    if (w.mode != AccessMode::Write) continue;
    size_t rank = w.indices.size(), d = s.depth();
    std::vector<std::vector<long long>> M(rank, std::vector<long long>(d, 0));
    std::vector<long long> rhs(rank, 0), sol;
    for (size_t m = 0; m < rank; ++m)
      for (size_t x = 0; x < d; ++x)
        M[m][x] = w.indices[m].coeff(s.iter_vars[x]);
    if (solve_linear(M, rhs, sol) == SolveKind::Underdetermined) {
      Dep dep;
      dep.array = w.array;
      dep.a_stmt = dep.b_stmt = flat[ia].first;
      dep.a_access = dep.b_access = int(ia);
      dep.constant = false;
      info.any_nonconstant = true;
      info.nonconstant_members.insert(int(ia));
      info.deps.push_back(dep);
    }
  }
  for (size_t ia = 0; ia < flat.size(); ++ia) {
    for (size_t ib = ia + 1; ib < flat.size(); ++ib) {
      const AccessRelation &a = *flat[ia].second;
      const AccessRelation &b = *flat[ib].second;
      if (a.array != b.array) continue;
      if (a.mode != AccessMode::Write && b.mode != AccessMode::Write) continue;
      // identical linear parts?
      bool same_linear = a.indices.size() == b.indices.size();
      bool same_params = true;
      for (size_t m = 0; same_linear && m < a.indices.size(); ++m) {
        if (a.indices[m].coeffs != b.indices[m].coeffs) same_linear = false;
        if (a.indices[m].param_coeffs != b.indices[m].param_coeffs)
          same_params = false;
      }
      Dep dep;
      dep.array = a.array;
      dep.a_stmt = flat[ia].first;
      dep.b_stmt = flat[ib].first;
      dep.a_access = int(ia);
      dep.b_access = int(ib);
      if (!same_linear || !same_params) {
        dep.constant = false;
        info.any_nonconstant = true;
        info.nonconstant_members.insert(int(ia));
        info.nonconstant_members.insert(int(ib));
        info.deps.push_back(dep);
        info.access_pairs.emplace_back(int(ia), int(ib));
        continue;
      }
      // L (J - I) = cA - cB over iteration variables
      size_t rank = a.indices.size(), d = s.depth();
      std::vector<std::vector<long long>> M(rank, std::vector<long long>(d, 0));
      std::vector<long long> rhs(rank, 0);
      for (size_t m = 0; m < rank; ++m) {
        for (size_t x = 0; x < d; ++x)
          M[m][x] = a.indices[m].coeff(s.iter_vars[x]);
        rhs[m] = a.indices[m].constant - b.indices[m].constant;
      }
      std::vector<long long> dist;
      switch (solve_linear(M, rhs, dist)) {
      case SolveKind::NoSolution:
        continue; // the two accesses never touch the same cell
      case SolveKind::Underdetermined:
        dep.constant = false;
        info.any_nonconstant = true;
        info.nonconstant_members.insert(int(ia));
        info.nonconstant_members.insert(int(ib));
        break;
      case SolveKind::Unique:
        dep.distance = dist;
        if (std::any_of(dist.begin(), dist.end(),
                        [](long long v) { return v != 0; }))
          info.any_carried = true;
        break;
      }
      info.deps.push_back(dep);
      info.access_pairs.emplace_back(int(ia), int(ib));
    }
  }
  return info;
}

std::vector<std::vector<int>> legal_permutations(const Scop &s,
                                                 const std::vector<long long> &sizes) {
  (void)sizes;
  DependenceInfo info = analyze_dependences(s);
  std::vector<std::vector<int>> out;
  if (info.any_carried) return out; // tiling itself is illegal
  size_t d = s.depth();
  std::vector<int> idperm(d);
  std::iota(idperm.begin(), idperm.end(), 0);
  if (info.any_nonconstant) {
    out.push_back(idperm);
    return out;
  }
  std::vector<int> p = idperm;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

std::vector<std::pair<long long, long long>>
tile_iteration_counts(const TiledScop &t, int x, const Binding &b) {
  const TileDim &d = t.dims[size_t(x)];
  long long lb = d.lb.constant, ub = d.ub.eval(b);
  bool innermost = t.spec.perm.back() == x;
  std::vector<std::pair<long long, long long>> out;
  for (long long start : t.tile_starts(x, b)) {
    long long wlo = t.outer_shifted ? start : std::max(lb, start);
    long long whi = std::min(ub, start + d.size - 1);
    if (t.padded && innermost) whi = start + d.size - 1;
    long long total = whi < wlo ? 0 : floor_div(whi - wlo, d.stride) + 1;
    long long vhi = std::min(ub, whi);
    long long valid = vhi < wlo ? 0 : floor_div(vhi - wlo, d.stride) + 1;
    out.emplace_back(total, valid);
  }
  return out;
}

} // namespace sf
