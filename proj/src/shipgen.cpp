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
#include "sf/shipgen.hpp"

#include <algorithm>

namespace sf {

const BufferPlan *TileProgram::plan_of_buffer(const std::string &buffer) const {
  for (auto &p : plans)
    if (p.buffer_name == buffer) return &p;
  return nullptr;
}

namespace {

std::vector<long long> shape_strides(const std::vector<long long> &shape) {
  std::vector<long long> s(shape.size(), 1);
  for (size_t m = shape.size(); m-- > 1;) s[m - 1] = s[m] * shape[m];
  return s;
}

int plan_index_of_flat(const std::vector<BufferPlan> &plans, int flat) {
  for (size_t i = 0; i < plans.size(); ++i)
    for (int f : plans[i].accesses)
      if (f == flat) return int(i);
  return -1;
}

} // namespace

static void apply_ship_widths(TileProgram &tp, const Binding &binding);

std::vector<TileStmt> redirect(const TiledScop &t,
                               const std::vector<BufferPlan> &plans) {
  std::vector<TileStmt> out;
  int flat = 0;
  for (auto &st : t.scop.statements) {
    TileStmt ts;
    ts.rhs = st.rhs;
    auto retarget = [&](const AccessRelation &a, int f) {
      TileStmt::TargetedAccess ta;
      int pi = plan_index_of_flat(plans, f);
      const BufferPlan *p = pi >= 0 ? &plans[size_t(pi)] : nullptr;
      if (!p || !p->cached()) {
        ta.target = ShipTarget{false, a.array};
        ta.indices = a.indices;
        return ta;
      }
      ta.target = ShipTarget{true, p->buffer_name};
      size_t rank = a.indices.size();
      for (size_t m = 0; m < rank; ++m) {
        AffineExpr idx = a.indices[m] - p->anchor[m];
        if (m + 1 == rank) idx = idx + p->halo_left;
        ta.indices.push_back(idx);
      }
      if (p->kind == BufferKind::Line) {
        // leading slots collapse; only the moving dimension remains
        ta.indices.erase(ta.indices.begin(), ta.indices.end() - 1);
      }
      return ta;
    };
    ts.write = retarget(st.write, flat++);
    for (auto &r : st.reads) ts.reads.push_back(retarget(r, flat++));
    out.push_back(std::move(ts));
  }
  return out;
}

namespace {

struct ShipBuilder {
  const TiledScop &t;
  const std::vector<BufferPlan> &plans;
  const ShipConfig &cfg;
  int next_id = 0;

  size_t d() const { return t.depth(); }
  const std::string &intra_var(size_t pos) const {
    return t.dims[size_t(t.spec.perm[pos])].var;
  }
  long long intra_size(size_t pos) const {
    return t.dims[size_t(t.spec.perm[pos])].size;
  }

  ShipOp base_op(ShipOp::Role role, int pi) {
    ShipOp op;
    op.role = role;
    op.plan_index = pi;
    op.id = next_id++;
    op.width = plans[size_t(pi)].width;
    return op;
  }

  /// Segment extents covering buffer dims [from .. r-1], innermost padded.
  std::vector<MinExpr> decl_segs(const BufferPlan &p, size_t from) const {
    std::vector<MinExpr> segs;
    for (size_t m = from; m < p.extents.size(); ++m) {
      long long e = (m + 1 == p.extents.size()) ? p.padded_innermost_extent
                                                : p.extents[m];
      segs.push_back(MinExpr::of(AffineExpr::constant_of(e)));
    }
    return segs;
  }

  /// Anchor vector with the leading intra symbol pinned to a value.
  std::vector<AffineExpr> anchor_at(const BufferPlan &p, long long v1val) const {
    std::vector<AffineExpr> a = p.anchor;
    const std::string &v1 = intra_var(0);
    for (auto &e : a) e = e.subst_var(v1, AffineExpr::constant_of(v1val));
    return a;
  }

  /// DDR-side source offsets: anchor with the halo displacement on the
  /// innermost dimension.
  std::vector<AffineExpr> fill_src(const std::vector<AffineExpr> &anchor,
                                   const BufferPlan &p) const {
    std::vector<AffineExpr> src = anchor;
    src.back() = src.back() - p.halo_left;
    return src;
  }

  Node ship_node(ShipOp op, const std::string &note) {
    op.note = note;
    Node n;
    n.kind = Node::Kind::Ship;
    n.ship = std::move(op);
    return n;
  }

  // -- full buffers ---------------------------------------------------------

  Node full_fill(int pi) {
    const BufferPlan &p = plans[size_t(pi)];
    ShipOp op = base_op(ShipOp::Role::Fill, pi);
    op.src = ShipTarget{false, p.array};
    op.dst = ShipTarget{true, p.buffer_name};
    op.src_off = fill_src(p.anchor, p);
    op.dst_off.assign(p.extents.size(), AffineExpr{});
    op.di = int(p.extents.size());
    op.reps = 1;
    op.seg_extents = decl_segs(p, 0);
    return ship_node(op, "fill " + p.buffer_name);
  }

  /// Flush of the (untrimmed) write image; guard_padded_writes clips it.
  /// Intra symbols below `scope_levels` stay live loop variables.
  Node image_flush(int pi, size_t scope_levels, bool line) {
    const BufferPlan &p = plans[size_t(pi)];
    const AccessRelation &w = write_access(p);
    ShipOp op = base_op(ShipOp::Role::Flush, pi);
    op.src = ShipTarget{true, p.buffer_name};
    op.dst = ShipTarget{false, p.array};
    size_t rank = w.indices.size();
    std::vector<AffineExpr> lo(rank);
    for (size_t m = 0; m < rank; ++m) lo[m] = write_lo(w.indices[m], scope_levels);
    op.dst_off = lo;
    if (line) {
      op.src_off = {lo.back() - p.anchor.back() + p.halo_left};
    } else {
      for (size_t m = 0; m < rank; ++m) {
        AffineExpr s = lo[m] - p.anchor[m];
        if (m + 1 == rank) s = s + p.halo_left;
        op.src_off.push_back(s);
      }
    }
    op.di = line ? 1 : int(rank);
    op.reps = 1;
    for (size_t m = rank - size_t(op.di); m < rank; ++m) {
      long long span = write_span(w.indices[m], scope_levels);
      op.seg_extents.push_back(MinExpr::of(AffineExpr::constant_of(span)));
    }
    op.edged = true;
    return ship_node(op, "flush " + p.buffer_name);
  }

  const AccessRelation &write_access(const BufferPlan &p) const {
    auto all = t.scop.all_accesses();
    return *all[size_t(p.write_access)].second;
  }

  /// Lower corner of a write index over the full tile window; intra symbols
  /// below `scope_levels` stay live.
  AffineExpr write_lo(const AffineExpr &e, size_t scope_levels) const {
    AffineExpr r = e;
    for (size_t s = scope_levels; s < d(); ++s)
      r = r.subst_var(intra_var(s), AffineExpr::constant_of(0));
    return r;
  }

  long long write_span(const AffineExpr &e, size_t scope_levels) const {
    long long span = 0;
    for (size_t s = scope_levels; s < d(); ++s) {
      long long c = e.coeff(intra_var(s));
      if (c < 0)
        fail(ErrCode::Internal, "write with negative index coefficient");
      long long sz = intra_size(s), stride = t.dims[size_t(t.spec.perm[s])].stride;
      span += c * (sz - stride);
    }
    return span + 1;
  }

  // -- chunk buffers --------------------------------------------------------

  bool dim_driven_by(const BufferPlan &p, size_t m, const std::string &v) const {
    auto all = t.scop.all_accesses();
    for (int f : p.accesses)
      if (all[size_t(f)].second->indices[m].coeff(v) == 1) return true;
    return false;
  }

  std::vector<Node> chunk_initial_fill(int pi) {
    const BufferPlan &p = plans[size_t(pi)];
    std::vector<Node> out;
    long long pre = p.extents[0] - 1;
    if (pre <= 0 || !p.prefill) return out;
    ShipOp op = base_op(ShipOp::Role::Fill, pi);
    op.src = ShipTarget{false, p.array};
    op.dst = ShipTarget{true, p.buffer_name};
    op.src_off = fill_src(anchor_at(p, 0), p);
    op.dst_off.assign(p.extents.size(), AffineExpr{});
    op.di = int(p.extents.size()) - 1;
    op.reps = pre;
    op.seg_extents = decl_segs(p, 1);
    out.push_back(ship_node(op, "fill first " + std::to_string(pre) +
                                    " slabs of " + p.buffer_name));
    return out;
  }

  /// Incremental fills of the incoming slab, one per loop level.
  /// Returns ships keyed by the intra level they live at.
  std::map<size_t, std::vector<Node>> chunk_incremental_fills(int pi) {
    const BufferPlan &p = plans[size_t(pi)];
    std::map<size_t, std::vector<Node>> out;
    if (!p.prefill) return out;
    size_t r = p.extents.size();
    long long slab = p.extents[0] - 1; // incoming slab index
    std::vector<AffineExpr> base = p.anchor;
    base[0] = base[0] + slab;

    if (d() == 2) {
      ShipOp op = base_op(ShipOp::Role::Fill, pi);
      op.src = ShipTarget{false, p.array};
      op.dst = ShipTarget{true, p.buffer_name};
      op.src_off = fill_src(base, p);
      op.dst_off = {AffineExpr::constant_of(slab), AffineExpr{}};
      op.di = 1;
      op.reps = 1;
      op.seg_extents = decl_segs(p, r - 1);
      out[0].push_back(ship_node(op, "fill incoming slab of " + p.buffer_name));
      return out;
    }

    // d == 3, rank 3
    bool driven = dim_driven_by(p, 1, intra_var(1));
    long long lead = driven ? p.extents[1] - intra_size(1) : p.extents[1];
    if (lead > 0) {
      ShipOp op = base_op(ShipOp::Role::Fill, pi);
      op.src = ShipTarget{false, p.array};
      op.dst = ShipTarget{true, p.buffer_name};
      op.src_off = fill_src(base, p);
      op.dst_off = {AffineExpr::constant_of(slab), AffineExpr{}, AffineExpr{}};
      op.di = 1;
      op.reps = lead;
      op.seg_extents = decl_segs(p, r - 1);
      out[0].push_back(ship_node(op, "fill first " + std::to_string(lead) +
                                         " rows of incoming slab of " +
                                         p.buffer_name));
    }
    if (driven) {
      AffineExpr row = AffineExpr::var(intra_var(1)) + lead;
      ShipOp op = base_op(ShipOp::Role::Fill, pi);
      op.src = ShipTarget{false, p.array};
      op.dst = ShipTarget{true, p.buffer_name};
      std::vector<AffineExpr> src = base;
      src[1] = base[1] + row;
      op.src_off = fill_src(src, p);
      op.dst_off = {AffineExpr::constant_of(slab), row, AffineExpr{}};
      op.di = 1;
      op.reps = 1;
      op.seg_extents = decl_segs(p, r - 1);
      out[1].push_back(ship_node(op, "fill next row of " + p.buffer_name));
    }
    return out;
  }

  Node chunk_shift(int pi) {
    const BufferPlan &p = plans[size_t(pi)];
    ShipOp op = base_op(ShipOp::Role::Shift, pi);
    op.src = ShipTarget{true, p.buffer_name};
    op.dst = ShipTarget{true, p.buffer_name};
    size_t r = p.extents.size();
    op.src_off.assign(r, AffineExpr{});
    op.src_off[0] = AffineExpr::constant_of(1);
    op.dst_off.assign(r, AffineExpr{});
    op.di = int(r) - 1;
    op.reps = p.extents[0] - 1;
    op.seg_extents = decl_segs(p, 1);
    return ship_node(op, "shift " + p.buffer_name + " slabs down by 1");
  }

  /// Per-tick flush of the slab the write just completed.
  Node chunk_flush(int pi) {
    const BufferPlan &p = plans[size_t(pi)];
    const AccessRelation &w = write_access(p);
    ShipOp op = base_op(ShipOp::Role::Flush, pi);
    op.src = ShipTarget{true, p.buffer_name};
    op.dst = ShipTarget{false, p.array};
    size_t rank = w.indices.size();
    std::vector<AffineExpr> lo(rank);
    lo[0] = w.indices[0]; // lives under the v1 loop
    for (size_t m = 1; m < rank; ++m) lo[m] = write_lo(w.indices[m], 1);
    op.dst_off = lo;
    for (size_t m = 0; m < rank; ++m) {
      AffineExpr s = lo[m] - p.anchor[m];
      if (m + 1 == rank) s = s + p.halo_left;
      op.src_off.push_back(s);
    }
    op.di = int(rank) - 1;
    op.reps = 1;
    for (size_t m = 1; m < rank; ++m)
      op.seg_extents.push_back(
          MinExpr::of(AffineExpr::constant_of(write_span(w.indices[m], 1))));
    op.edged = true;
    return ship_node(op, "flush written slab of " + p.buffer_name);
  }

  // -- line buffers ---------------------------------------------------------

  Node line_fill(int pi) {
    const BufferPlan &p = plans[size_t(pi)];
    ShipOp op = base_op(ShipOp::Role::Fill, pi);
    op.src = ShipTarget{false, p.array};
    op.dst = ShipTarget{true, p.buffer_name};
    op.src_off = fill_src(p.anchor, p);
    op.dst_off = {AffineExpr{}};
    op.di = 1;
    op.reps = 1;
    op.seg_extents = {MinExpr::of(
        AffineExpr::constant_of(p.padded_innermost_extent))};
    return ship_node(op, "fill line " + p.buffer_name);
  }
};

} // namespace

TileProgram plan_ships(const TiledScop &t, const std::vector<BufferPlan> &plans,
                       const ShipConfig &cfg) {
  TileProgram tp;
  tp.tiled = t;
  if (!cfg.pad_innermost) tp.tiled.padded = false;
  tp.plans = plans;
  tp.name = t.scop.name;
  tp.width = cfg.width;
  tp.stmts = redirect(t, plans);

  size_t d = t.depth();
  ShipBuilder sb{t, plans, cfg};

  std::vector<Node> tile_fills, tile_flushes;
  std::vector<std::vector<Node>> pre(d), post(d);

  for (size_t pi = 0; pi < plans.size(); ++pi) {
    const BufferPlan &p = plans[pi];
    if (!p.cached()) continue;
    switch (p.kind) {
    case BufferKind::Full:
      if (p.prefill) tile_fills.push_back(sb.full_fill(int(pi)));
      if (p.has_write) tile_flushes.push_back(sb.image_flush(int(pi), 0, false));
      break;
    case BufferKind::Chunk: {
      auto init = sb.chunk_initial_fill(int(pi));
      tile_fills.insert(tile_fills.end(), init.begin(), init.end());
      for (auto &[level, ships] : sb.chunk_incremental_fills(int(pi)))
        pre[level].insert(pre[level].end(), ships.begin(), ships.end());
      if (p.has_write) post[0].push_back(sb.chunk_flush(int(pi)));
      if (p.extents[0] > 1) post[0].push_back(sb.chunk_shift(int(pi)));
      break;
    }
    case BufferKind::Line: {
      size_t level = d >= 2 ? d - 2 : 0;
      if (d == 1) {
        if (p.prefill) tile_fills.push_back(sb.line_fill(int(pi)));
        if (p.has_write) tile_flushes.push_back(sb.image_flush(int(pi), 0, true));
      } else {
        if (p.prefill) pre[level].push_back(sb.line_fill(int(pi)));
        if (p.has_write) post[level].push_back(sb.image_flush(int(pi), d - 1, true));
      }
      break;
    }
    case BufferKind::Nc: break;
    }
  }

  // innermost intra loop body: the statements
  std::vector<Node> stmt_nodes;
  for (size_t s = 0; s < tp.stmts.size(); ++s) {
    Node n;
    n.kind = Node::Kind::Stmt;
    n.stmt_index = int(s);
    stmt_nodes.push_back(n);
  }

  // intra loops, innermost first
  Node current;
  for (size_t pos = d; pos-- > 0;) {
    const TileDim &dim = t.dims[size_t(t.spec.perm[pos])];
    Node loop;
    loop.kind = Node::Kind::Loop;
    loop.var = dim.var;
    loop.lo = AffineExpr::constant_of(0);
    loop.step = dim.stride;
    bool innermost = pos + 1 == d;
    if (innermost && tp.tiled.padded) {
      loop.hi = MinExpr::of(AffineExpr::constant_of(dim.size - 1));
      loop.padded = true;
    } else {
      MinExpr hi = MinExpr::of(AffineExpr::constant_of(dim.size - 1));
      hi.add_term(dim.ub - AffineExpr::var(dim.tile_var));
      loop.hi = hi;
    }
    loop.pipeline = (d >= 2) ? pos == d - 2 : true;
    std::vector<Node> body = pre[pos];
    if (innermost) {
      body.insert(body.end(), stmt_nodes.begin(), stmt_nodes.end());
    } else {
      body.push_back(std::move(current));
    }
    body.insert(body.end(), post[pos].begin(), post[pos].end());
    loop.body = std::move(body);
    current = std::move(loop);
  }

  // inter-tile loops, innermost first
  std::vector<Node> inner_body;
  inner_body.insert(inner_body.end(), tile_fills.begin(), tile_fills.end());
  inner_body.push_back(std::move(current));
  inner_body.insert(inner_body.end(), tile_flushes.begin(), tile_flushes.end());
  for (size_t x = d; x-- > 0;) {
    const TileDim &dim = t.dims[x];
    Node loop;
    loop.kind = Node::Kind::Loop;
    loop.var = dim.tile_var;
    loop.lo = AffineExpr::constant_of(t.first_tile_start(int(x)));
    loop.hi = MinExpr::of(dim.ub);
    loop.step = dim.size;
    loop.intertile = true;
    loop.body = std::move(inner_body);
    inner_body.clear();
    inner_body.push_back(std::move(loop));
  }
  tp.roots = std::move(inner_body);

  tp = guard_padded_writes(std::move(tp));

  // per-ship burst feasibility: a wide ship must advance by multiples of w
  if (cfg.width > 1) apply_ship_widths(tp, cfg.binding);
  return tp;
}

namespace {

void clip_ship(const TileProgram &tp, ShipOp &op,
               const std::set<std::string> &live_intra) {
  if (op.role != ShipOp::Role::Flush) return;
  const BufferPlan &p = tp.plans[size_t(op.plan_index)];
  auto all = tp.scop().all_accesses();
  const AccessRelation &w = *all[size_t(p.write_access)].second;
  const TiledScop &t = tp.tiled;
  size_t rank = w.indices.size();
  size_t from = rank - size_t(op.di);
  for (size_t m = from; m < rank; ++m) {
    const AffineExpr &e = w.indices[m];
    // lower corner with live loop symbols kept
    AffineExpr lo = e;
    MinExpr hi = MinExpr::of(e);
    for (size_t s = 0; s < t.depth(); ++s) {
      const TileDim &dim = t.dims[size_t(t.spec.perm[s])];
      if (live_intra.count(dim.var)) continue;
      long long c = e.coeff(dim.var);
      if (c == 0) continue;
      if (c < 0) fail(ErrCode::Internal, "flush trim with negative coefficient");
      lo = lo.subst_var(dim.var, AffineExpr::constant_of(0));
      MinExpr widened;
      MinExpr vmax = MinExpr::of(AffineExpr::constant_of(dim.size - dim.stride));
      vmax.add_term(dim.ub - AffineExpr::var(dim.tile_var));
      for (const AffineExpr &term : hi.terms)
        for (const AffineExpr &vterm : vmax.terms)
          widened.add_term(term.subst_var(dim.var, AffineExpr{}) + vterm * c);
      hi = widened;
    }
    op.seg_extents[m - from] = hi - lo + 1;
  }
}

void walk_guard(TileProgram &tp, std::vector<Node> &nodes,
                std::set<std::string> &live_intra) {
  for (Node &n : nodes) {
    switch (n.kind) {
    case Node::Kind::Loop: {
      bool intra = !n.intertile;
      if (intra) live_intra.insert(n.var);
      walk_guard(tp, n.body, live_intra);
      if (intra) live_intra.erase(n.var);
      break;
    }
    case Node::Kind::Ship:
      clip_ship(tp, n.ship, live_intra);
      break;
    case Node::Kind::Stmt: {
      TileStmt &st = tp.stmts[size_t(n.stmt_index)];
      if (!st.write.target.is_buffer && tp.tiled.padded) {
        st.guarded = true;
        st.guard_le.clear();
        const TiledScop &t = tp.tiled;
        const TileDim &dim = t.dims[size_t(t.innermost_dim())];
        st.guard_le.emplace_back(
            AffineExpr::var(dim.var) + AffineExpr::var(dim.tile_var), dim.ub);
      }
      break;
    }
    }
  }
}

} // namespace

TileProgram guard_padded_writes(TileProgram tp) {
  std::set<std::string> live;
  walk_guard(tp, tp.roots, live);
  return tp;
}

namespace {

long long loop_step_of(const TiledScop &t, const std::string &var) {
  for (auto &d : t.dims) {
    if (d.var == var) return d.stride;
    if (d.tile_var == var) return d.size;
  }
  return 0;
}

void width_walk(TileProgram &tp, std::vector<Node> &nodes, const Binding &b) {
  for (Node &n : nodes) {
    if (n.kind == Node::Kind::Loop) {
      width_walk(tp, n.body, b);
      continue;
    }
    if (n.kind != Node::Kind::Ship) continue;
    ShipOp &op = n.ship;
    if (op.width <= 1 || op.edged) continue;
    if (op.src.is_buffer && op.dst.is_buffer) continue; // local shift
    bool src_ddr = !op.src.is_buffer;
    const std::vector<AffineExpr> &off = src_ddr ? op.src_off : op.dst_off;
    const std::string &arr = src_ddr ? op.src.name : op.dst.name;
    const ArrayInfo &info = tp.scop().array(arr);
    std::vector<long long> shape;
    for (auto &e : info.extents) shape.push_back(e.eval(b));
    auto strides = shape_strides(shape);
    AffineExpr linear;
    for (size_t m = 0; m < off.size(); ++m) linear = linear + off[m] * strides[m];
    long long w = op.width;
    bool ok = true;
    for (auto &[var, c] : linear.coeffs) {
      long long step = loop_step_of(tp.tiled, var);
      if (step == 0 || (c * step) % w != 0) ok = false;
    }
    // segment dims above the burst run and the repetition dim
    size_t rank = off.size();
    for (int k = 0; k + 1 < op.di; ++k)
      if (strides[rank - size_t(op.di) + size_t(k)] % w != 0) ok = false;
    if (op.reps > 1 && strides[rank - size_t(op.di) - 1] % w != 0) ok = false;
    if (!ok) {
      // degrade to a narrow port and drop the halo padding: a width-1
      // transfer ships exactly the bounding-box run
      const BufferPlan &plan = tp.plans[size_t(op.plan_index)];
      op.width = 1;
      if (op.role == ShipOp::Role::Fill && op.dst.is_buffer) {
        op.src_off.back() = op.src_off.back() + plan.halo_left;
        op.dst_off.back() = op.dst_off.back() + plan.halo_left;
        op.seg_extents.back() =
            MinExpr::of(AffineExpr::constant_of(plan.extents.back()));
      }
      tp.plans[size_t(op.plan_index)].diagnostics.push_back(
          "ship #" + std::to_string(op.id) +
          " cannot advance by multiples of the port width; degraded to width 1");
    }
  }
}

} // namespace

static void apply_ship_widths(TileProgram &tp, const Binding &binding) {
  Binding b = tp.scop().bind_params(binding);
  width_walk(tp, tp.roots, b);
}

std::vector<BurstInstance> expand_ship(const ShipOp &op, const Binding &env,
                                       const std::vector<long long> &src_shape,
                                       const std::vector<long long> &dst_shape) {
  auto sstr = shape_strides(src_shape);
  auto dstr = shape_strides(dst_shape);
  long long sbase = 0, dbase = 0;
  for (size_t m = 0; m < op.src_off.size(); ++m)
    sbase += op.src_off[m].eval(env) * sstr[m];
  for (size_t m = 0; m < op.dst_off.size(); ++m)
    dbase += op.dst_off[m].eval(env) * dstr[m];
  long long len = op.seg_extents.back().eval(env);
  std::vector<BurstInstance> out;
  if (len <= 0) return out;
  std::vector<long long> counts;
  for (int k = 0; k + 1 < op.di; ++k) {
    long long c = op.seg_extents[size_t(k)].eval(env);
    if (c <= 0) return out;
    counts.push_back(c);
  }
  size_t srank = src_shape.size(), drank = dst_shape.size();
  if (op.reps > 1 && (srank <= size_t(op.di) || drank <= size_t(op.di)))
    fail(ErrCode::Internal, "repeated ship needs a dimension above its segment");
  long long srep = op.reps > 1 ? sstr[srank - size_t(op.di) - 1] : 0;
  long long drep = op.reps > 1 ? dstr[drank - size_t(op.di) - 1] : 0;
  std::vector<long long> idx(counts.size(), 0);
  for (long long r = 0; r < op.reps; ++r) {
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      long long soff = sbase + r * srep, doff = dbase + r * drep;
      for (size_t k = 0; k < idx.size(); ++k) {
        soff += idx[k] * sstr[srank - size_t(op.di) + k];
        doff += idx[k] * dstr[drank - size_t(op.di) + k];
      }
      out.push_back(BurstInstance{soff, doff, len});
      size_t k = idx.size();
      while (k > 0) {
        if (++idx[k - 1] < counts[k - 1]) break;
        idx[k - 1] = 0;
        --k;
      }
      if (k == 0) break;
    }
  }
  return out;
}

} // namespace sf
