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
#include "sf/planner.hpp"

#include <algorithm>
#include <numeric>

namespace sf {

const char *kind_name(BufferKind k) {
  switch (k) {
  case BufferKind::Full: return "full";
  case BufferKind::Chunk: return "chunk";
  case BufferKind::Line: return "line";
  case BufferKind::Nc: return "nc";
  }
  return "?";
}

std::vector<long long> BufferPlan::declared_shape() const {
  std::vector<long long> shape = extents;
  if (shape.empty()) return shape;
  shape.back() = padded_innermost_extent ? padded_innermost_extent : shape.back();
  if (kind == BufferKind::Line) return {shape.back()};
  return shape;
}

Box working_set(const AccessRelation &a, const TiledScop &t, int fix_level) {
  NamedBox tile = t.full_tile_box();
  NamedBox ranged;
  std::set<std::string> symbolic = t.tile_var_set();
  for (size_t s = 0; s < t.depth(); ++s) {
    int x = t.spec.perm[s];
    bool fixed = fix_level > 0 && int(s) < fix_level;
    if (fixed) {
      symbolic.insert(t.dims[size_t(x)].var);
    } else {
      // keep original dimension order; ranged/fixed split is what matters
    }
  }
  for (size_t x = 0; x < t.depth(); ++x) {
    if (symbolic.count(t.dims[x].var)) continue;
    ranged.vars.push_back(tile.vars[x]);
    ranged.box.dims.push_back(tile.box.dims[x]);
  }
  return image(a.indices, ranged, symbolic);
}

namespace {

bool static_extents(const Box &b, std::vector<long long> &out) {
  out.clear();
  for (auto &d : b.dims) {
    AffineExpr e = extent_slots(d);
    if (!e.is_constant()) return false;
    out.push_back(e.constant);
  }
  return true;
}

/// Loop-variable part of an index expression restricted to intra-tile vars.
std::map<std::string, long long> intra_part(const AffineExpr &e,
                                            const TiledScop &t) {
  std::map<std::string, long long> r;
  for (auto &d : t.dims) {
    long long c = e.coeff(d.var);
    if (c != 0) r[d.var] = c;
  }
  return r;
}

const AccessRelation *flat_access(const TiledScop &t, int flat) {
  auto all = t.scop.all_accesses();
  return all[size_t(flat)].second;
}

} // namespace

BufferPlan classify_group(const std::vector<int> &accesses, const TiledScop &t) {
  BufferPlan plan;
  auto all = t.scop.all_accesses();
  plan.accesses = accesses;
  plan.array = all[size_t(accesses.front())].second->array;
  int writes = 0;
  for (int f : accesses) {
    const AccessRelation *a = all[size_t(f)].second;
    if (a->mode == AccessMode::Write) {
      plan.has_write = true;
      ++writes;
      plan.write_access = f;
    } else {
      plan.has_read = true;
    }
  }
  if (writes > 1) plan.write_access = -1;

  size_t d = t.depth();
  int sub_level = d >= 2 ? 1 : 0;
  auto box_at = [&](int level) {
    Box u;
    bool first = true;
    for (int f : accesses) {
      Box b = working_set(*flat_access(t, f), t, level);
      u = first ? b : union_bbox(u, b);
      first = false;
    }
    return u;
  };

  Box full_box, sub_box;
  std::vector<long long> full_ext, sub_ext;
  bool representable = true;
  try {
    full_box = box_at(0);
    sub_box = box_at(sub_level);
  } catch (const Error &) {
    representable = false;
  }
  if (!representable || !static_extents(full_box, full_ext) ||
      !static_extents(sub_box, sub_ext)) {
    plan.kind = BufferKind::Nc;
    plan.cost = 0;
    return plan;
  }

  const std::string &v_last = t.dims[size_t(t.innermost_dim())].var;
  const std::string &v_first = t.dims[size_t(t.spec.perm[0])].var;
  size_t rank = full_box.rank();

  // burst-fillable: every access's innermost array index moves one-to-one
  // with the innermost intra-tile loop, and no other dimension touches it
  bool burstable = true;
  for (int f : accesses) {
    const AccessRelation *a = flat_access(t, f);
    auto last = intra_part(a->indices.back(), t);
    if (!(last.size() == 1 && last.count(v_last) && last[v_last] == 1))
      burstable = false;
    for (size_t m = 0; m + 1 < rank; ++m)
      if (a->indices[m].coeff(v_last) != 0) burstable = false;
  }

  bool line_shape = true;
  for (size_t m = 0; m + 1 < rank; ++m)
    if (sub_ext[m] != 1) line_shape = false;

  if (burstable && line_shape) {
    plan.kind = BufferKind::Line;
    plan.bbox = sub_box;
    plan.extents = sub_ext;
  } else if (d >= 2 && rank == d && burstable) {
    // chunk: slab dimension 0 slides with the outermost intra-tile loop,
    // middle dimensions follow the middle loops in order
    bool chunkable = true;
    long long slide = 0;
    for (int f : accesses) {
      const AccessRelation *a = flat_access(t, f);
      auto dim0 = intra_part(a->indices[0], t);
      if (!(dim0.size() == 1 && dim0.count(v_first) && dim0[v_first] >= 1))
        chunkable = false;
      else if (slide == 0)
        slide = dim0[v_first];
      else if (slide != dim0[v_first])
        chunkable = false;
      for (size_t m = 1; m < rank; ++m) {
        auto p = intra_part(a->indices[m], t);
        if (a->indices[m].coeff(v_first) != 0) chunkable = false;
        // middle dims: only the matching middle loop may drive them
        if (m + 1 < rank) {
          const std::string &vm = t.dims[size_t(t.spec.perm[m])].var;
          for (auto &[var, c] : p)
            if (var != vm) chunkable = false;
        }
      }
    }
    if (chunkable && slide == 1) {
      plan.kind = BufferKind::Chunk;
      plan.chunk_dim = 0;
      plan.bbox = sub_box;
      plan.extents = sub_ext;
    } else {
      plan.kind = BufferKind::Full;
      plan.bbox = full_box;
      plan.extents = full_ext;
    }
  } else {
    plan.kind = BufferKind::Full;
    plan.bbox = full_box;
    plan.extents = full_ext;
  }

  plan.anchor.clear();
  for (auto &dim : plan.bbox.dims) plan.anchor.push_back(dim.lo);
  plan.cost = 1;
  for (long long e : plan.extents) plan.cost *= e;
  plan.padded_innermost_extent = plan.extents.back();
  plan.prefill = plan.has_read || (plan.has_write && plan.write_access < 0);
  if (plan.has_write && !plan.prefill) {
    // strided writes leave lattice gaps inside the flush region; those
    // slots must hold original values
    const AccessRelation *w = flat_access(t, plan.write_access);
    for (auto &dim : working_set(*w, t, 0).dims)
      if (dim.stride > 1) plan.prefill = true;
  }
  return plan;
}

namespace {

/// Provably empty tile-working-set intersection. Anything unprovable counts
/// as overlapping (approximate non-empty is safe for fusion/nc logic).
bool provably_disjoint(const BufferPlan &a, const BufferPlan &b,
                       const TiledScop &t) {
  auto all = t.scop.all_accesses();
  try {
    Box wa, wb;
    bool fa = true, fb = true;
    for (int f : a.accesses) {
      Box w = working_set(*all[size_t(f)].second, t, 0);
      wa = fa ? w : union_bbox(wa, w);
      fa = false;
    }
    for (int f : b.accesses) {
      Box w = working_set(*all[size_t(f)].second, t, 0);
      wb = fb ? w : union_bbox(wb, w);
      fb = false;
    }
    return definitely_empty(intersect(wa, wb).box);
  } catch (const Error &) {
    return false;
  }
}

} // namespace

FuseResult fuse(const BufferPlan &a, const BufferPlan &b, bool dependent,
                const TiledScop &t) {
  bool disjoint = provably_disjoint(a, b, t);
  std::vector<int> merged = a.accesses;
  merged.insert(merged.end(), b.accesses.begin(), b.accesses.end());
  std::sort(merged.begin(), merged.end());
  if (dependent) {
    if (disjoint) {
      // separate caches would break the dependence; no caching at all
      BufferPlan nc = classify_group(merged, t);
      nc.kind = BufferKind::Nc;
      nc.extents.clear();
      nc.cost = 0;
      return {FuseResult::Outcome::AllNc, nc};
    }
    BufferPlan u = classify_group(merged, t);
    return {u.cached() ? FuseResult::Outcome::Fused : FuseResult::Outcome::AllNc, u};
  }
  if (disjoint || !a.cached() || !b.cached())
    return {FuseResult::Outcome::Separate, {}};
  BufferPlan u = classify_group(merged, t);
  if (!u.cached()) return {FuseResult::Outcome::Separate, {}};
  // Sharing is free when the union keeps the buffer speed class: the fused
  // chunk shifts its overlap locally instead of re-reading it. A slower
  // union must pay for itself in size.
  auto rank = [](BufferKind k) {
    return k == BufferKind::Line ? 0 : k == BufferKind::Chunk ? 1 : 2;
  };
  if (rank(u.kind) <= std::max(rank(a.kind), rank(b.kind)))
    return {FuseResult::Outcome::Fused, u};
  // equal size still wins: the shared buffer reuses its overlap
  if (u.cost <= a.cost + b.cost) return {FuseResult::Outcome::Fused, u};
  return {FuseResult::Outcome::Separate, {}};
}

std::vector<BufferPlan> build_plans(const TiledScop &t, const DependenceInfo &deps) {
  auto all = t.scop.all_accesses();
  size_t n = all.size();
  // union-find over the dependence graph
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[size_t(x)] != x) x = parent[size_t(x)] = parent[size_t(parent[size_t(x)])];
    return x;
  };
  for (auto &[x, y] : deps.access_pairs) parent[size_t(find(x))] = find(y);

  std::map<int, std::vector<int>> components;
  for (size_t i = 0; i < n; ++i) components[find(int(i))].push_back(int(i));

  auto force_nc = [&](BufferPlan &p) {
    p.kind = BufferKind::Nc;
    p.extents.clear();
    p.cost = 0;
  };
  auto touches_nonconstant = [&](const std::vector<int> &members) {
    for (int m : members)
      if (deps.nonconstant_members.count(m)) return true;
    return false;
  };
  std::vector<BufferPlan> plans;
  for (auto &[root, members] : components) {
    if (members.size() == 1) {
      BufferPlan p = classify_group(members, t);
      // a write that aliases itself across iterations cannot be cached:
      // padded iterations would modify live cells
      if (touches_nonconstant(members) && p.cached()) force_nc(p);
      plans.push_back(std::move(p));
      continue;
    }
    // dependence set: nc as soon as any pair's working sets are disjoint
    bool any_disjoint = false;
    for (size_t i = 0; i < members.size() && !any_disjoint; ++i)
      for (size_t j = i + 1; j < members.size() && !any_disjoint; ++j) {
        BufferPlan pa = classify_group({members[i]}, t);
        BufferPlan pb = classify_group({members[j]}, t);
        if (provably_disjoint(pa, pb, t)) any_disjoint = true;
      }
    BufferPlan u = classify_group(members, t);
    if (any_disjoint || touches_nonconstant(members) || !u.cached()) force_nc(u);
    plans.push_back(u);
  }

  // Reuse-driven fusion among dependence-free groups of one array: the
  // whole transitive-overlap component shares one buffer when the union
  // keeps the buffer speed class or shrinks the total footprint. Partial
  // fusion inside a component is not attempted.
  auto rank = [](BufferKind k) {
    return k == BufferKind::Line ? 0 : k == BufferKind::Chunk ? 1 : 2;
  };
  for (size_t i = 0; i < plans.size(); ++i) {
    if (!plans[i].cached() || plans[i].has_write) continue;
    std::vector<size_t> comp{i};
    for (size_t j = i + 1; j < plans.size(); ++j) {
      if (plans[j].array != plans[i].array) continue;
      if (!plans[j].cached() || plans[j].has_write) continue;
      bool overlaps = false;
      for (size_t m : comp)
        if (!provably_disjoint(plans[m], plans[j], t)) overlaps = true;
      if (overlaps) comp.push_back(j);
    }
    if (comp.size() < 2) continue;
    std::vector<int> all_accs;
    long long cost_sum = 0;
    int max_rank = 0;
    for (size_t m : comp) {
      all_accs.insert(all_accs.end(), plans[m].accesses.begin(),
                      plans[m].accesses.end());
      cost_sum += plans[m].cost;
      max_rank = std::max(max_rank, rank(plans[m].kind));
    }
    std::sort(all_accs.begin(), all_accs.end());
    BufferPlan u = classify_group(all_accs, t);
    if (!u.cached()) continue;
    if (rank(u.kind) <= max_rank || u.cost <= cost_sum) {
      plans[i] = u;
      for (size_t m = comp.size(); m-- > 1;)
        plans.erase(plans.begin() + long(comp[m]));
    }
  }

  std::sort(plans.begin(), plans.end(), [](const BufferPlan &a, const BufferPlan &b) {
    return a.accesses.front() < b.accesses.front();
  });
  // stable buffer names: array name + "_buf", disambiguated
  std::map<std::string, int> uses;
  for (auto &p : plans) {
    int k = uses[p.array]++;
    p.buffer_name = p.array + "_buf" + (k ? std::to_string(k) : "");
  }
  return plans;
}

std::vector<PermutationChoice>
evaluate_permutations(const Scop &s, const std::vector<long long> &sizes) {
  auto perms = legal_permutations(s, sizes);
  DependenceInfo deps = analyze_dependences(s);
  std::vector<PermutationChoice> out;
  for (auto &p : perms) {
    TiledScop t = apply_standard_tiling(s, sizes, p);
    PermutationChoice c;
    c.perm = p;
    c.plans = build_plans(t, deps);
    c.total_cost = 0;
    for (auto &pl : c.plans) c.total_cost += pl.cost;
    out.push_back(std::move(c));
  }
  return out;
}

PermutationChoice select_permutation(const Scop &s,
                                     const std::vector<long long> &sizes) {
  auto all = evaluate_permutations(s, sizes);
  if (all.empty())
    fail(ErrCode::NoLegalTiling, "data dependences prevent loop tiling for " + s.name);
  auto speed = [](const PermutationChoice &c) {
    int nc = 0, full = 0, chunk = 0;
    for (auto &p : c.plans) {
      nc += p.kind == BufferKind::Nc;
      full += p.kind == BufferKind::Full;
      chunk += p.kind == BufferKind::Chunk;
    }
    return std::tuple<int, int, int>(nc, full, chunk);
  };
  size_t best = 0;
  for (size_t i = 1; i < all.size(); ++i) {
    if (all[i].total_cost < all[best].total_cost ||
        (all[i].total_cost == all[best].total_cost &&
         speed(all[i]) < speed(all[best])))
      best = i;
  }
  return all[best];
}

BufferPlan add_halo(const BufferPlan &plan, int w, const TiledScop &t,
                    const Binding &binding) {
  if (!plan.cached())
    fail(ErrCode::Internal, "add_halo on an nc plan");
  BufferPlan out = plan;
  out.width = w;
  out.halo_left = 0;
  out.padded_innermost_extent = out.extents.back();
  if (w == 1) return out;

  const ArrayInfo &info = t.scop.array(plan.array);
  std::vector<long long> stride(info.rank(), 1);
  for (size_t m = info.rank(); m-- > 1;)
    stride[m - 1] = stride[m] * info.extents[m].eval(binding);

  // linear DDR offset of the tile's first copied element
  AffineExpr offset;
  for (size_t m = 0; m < plan.anchor.size(); ++m)
    offset = offset + plan.anchor[m] * stride[m];

  // the residue must not vary from tile to tile
  bool varies = false;
  for (size_t x = 0; x < t.depth(); ++x) {
    long long c = offset.coeff(t.dims[x].tile_var);
    if ((c * t.dims[x].size) % w != 0) varies = true;
  }
  if (varies) {
    out.width = 1;
    out.diagnostics.push_back("anchor residue varies across tiles; port width 1");
    return out;
  }

  Binding b = binding;
  for (size_t x = 0; x < t.depth(); ++x) {
    b[t.dims[x].tile_var] = t.first_tile_start(int(x));
    b[t.dims[x].var] = 0; // chunk anchors reference the outermost intra index
  }
  long long res = offset.eval(b) % w;
  if (res < 0) res += w;
  out.halo_left = res;
  long long need = out.extents.back() + out.halo_left;
  out.padded_innermost_extent = ceil_div(need, w) * w;
  return out;
}

nlohmann::json plan_report(const Scop &s, const std::vector<long long> &sizes,
                           const std::vector<PermutationChoice> &all,
                           const PermutationChoice &chosen) {
  nlohmann::json j;
  j["stencil"] = s.name;
  j["tile_sizes"] = sizes;
  auto perm_names = [&](const std::vector<int> &p) {
    std::vector<std::string> v;
    for (int x : p) v.push_back(s.iter_vars[size_t(x)]);
    return v;
  };
  auto plan_json = [&](const BufferPlan &p) {
    nlohmann::json pj;
    pj["array"] = p.array;
    pj["kind"] = kind_name(p.kind);
    pj["extents"] = p.extents;
    pj["cost"] = p.cost;
    pj["accesses"] = nlohmann::json::array();
    auto flat = s.all_accesses();
    for (int f : p.accesses) pj["accesses"].push_back(flat[size_t(f)].second->str());
    if (p.halo_left || p.width > 1) {
      pj["halo_left"] = p.halo_left;
      pj["padded_innermost_extent"] = p.padded_innermost_extent;
      pj["port_width"] = p.width;
      pj["declared"] = p.declared_shape();
    }
    if (!p.diagnostics.empty()) pj["diagnostics"] = p.diagnostics;
    return pj;
  };
  j["permutations"] = nlohmann::json::array();
  for (auto &c : all) {
    nlohmann::json cj;
    cj["perm"] = perm_names(c.perm);
    cj["total_cost"] = c.total_cost;
    cj["groups"] = nlohmann::json::array();
    for (auto &p : c.plans) cj["groups"].push_back(plan_json(p));
    j["permutations"].push_back(cj);
  }
  nlohmann::json ch;
  ch["perm"] = perm_names(chosen.perm);
  ch["total_cost"] = chosen.total_cost;
  ch["groups"] = nlohmann::json::array();
  for (auto &p : chosen.plans) ch["groups"].push_back(plan_json(p));
  j["chosen"] = ch;
  return j;
}

} // namespace sf
