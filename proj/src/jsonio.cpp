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

namespace sf {

using nlohmann::json;

namespace {

json expr_json(const AffineExpr &e) {
  json j;
  j["coeffs"] = e.coeffs;
  j["params"] = e.param_coeffs;
  j["const"] = e.constant;
  j["text"] = e.str();
  return j;
}

AffineExpr expr_from(const json &j) {
  AffineExpr e;
  for (auto &[k, v] : j.at("coeffs").items()) e.coeffs[k] = v.get<long long>();
  for (auto &[k, v] : j.at("params").items())
    e.param_coeffs[k] = v.get<long long>();
  e.constant = j.at("const").get<long long>();
  return e;
}

json min_json(const MinExpr &e) {
  json j = json::array();
  for (auto &t : e.terms) j.push_back(expr_json(t));
  return j;
}

MinExpr min_from(const json &j) {
  MinExpr e;
  for (auto &t : j) e.terms.push_back(expr_from(t));
  return e;
}

json box_json(const Box &b) {
  json j = json::array();
  for (auto &d : b.dims)
    j.push_back({{"lo", expr_json(d.lo)},
                 {"hi", expr_json(d.hi)},
                 {"stride", d.stride}});
  return j;
}

Box box_from(const json &j) {
  Box b;
  for (auto &d : j)
    b.dims.push_back(BoxDim{expr_from(d.at("lo")), expr_from(d.at("hi")),
                            d.at("stride").get<long long>()});
  return b;
}

json rhs_json(const ExprPtr &e) {
  json j;
  switch (e->op) {
  case Expr::Op::Const:
    j["op"] = "const";
    j["value"] = e->value;
    break;
  case Expr::Op::Read:
    j["op"] = "read";
    j["index"] = e->read_index;
    break;
  case Expr::Op::Neg:
    j["op"] = "neg";
    j["a"] = rhs_json(e->a);
    break;
  default:
    j["op"] = e->op == Expr::Op::Add   ? "add"
              : e->op == Expr::Op::Sub ? "sub"
              : e->op == Expr::Op::Mul ? "mul"
                                       : "div";
    j["a"] = rhs_json(e->a);
    j["b"] = rhs_json(e->b);
  }
  return j;
}

ExprPtr rhs_from(const json &j) {
  std::string op = j.at("op");
  if (op == "const") return Expr::lit(j.at("value").get<double>());
  if (op == "read") return Expr::read(j.at("index").get<int>());
  if (op == "neg") return Expr::neg(rhs_from(j.at("a")));
  Expr::Op o = op == "add"   ? Expr::Op::Add
               : op == "sub" ? Expr::Op::Sub
               : op == "mul" ? Expr::Op::Mul
                             : Expr::Op::Div;
  return Expr::binary(o, rhs_from(j.at("a")), rhs_from(j.at("b")));
}

json access_json(const AccessRelation &a) {
  json j;
  j["array"] = a.array;
  j["mode"] = a.mode == AccessMode::Write ? "write" : "read";
  j["indices"] = json::array();
  for (auto &e : a.indices) j["indices"].push_back(expr_json(e));
  return j;
}

AccessRelation access_from(const json &j) {
  AccessRelation a;
  a.array = j.at("array");
  a.mode = j.at("mode") == "write" ? AccessMode::Write : AccessMode::Read;
  for (auto &e : j.at("indices")) a.indices.push_back(expr_from(e));
  return a;
}

json target_json(const ShipTarget &t) {
  return {{"buffer", t.is_buffer}, {"name", t.name}};
}

ShipTarget target_from(const json &j) {
  return ShipTarget{j.at("buffer").get<bool>(), j.at("name")};
}

json ship_json(const ShipOp &op) {
  json j;
  j["role"] = op.role == ShipOp::Role::Fill    ? "fill"
              : op.role == ShipOp::Role::Shift ? "shift"
                                               : "flush";
  j["src"] = target_json(op.src);
  j["dst"] = target_json(op.dst);
  j["src_off"] = json::array();
  for (auto &e : op.src_off) j["src_off"].push_back(expr_json(e));
  j["dst_off"] = json::array();
  for (auto &e : op.dst_off) j["dst_off"].push_back(expr_json(e));
  j["di"] = op.di;
  j["reps"] = op.reps;
  j["segments"] = json::array();
  for (auto &e : op.seg_extents) j["segments"].push_back(min_json(e));
  j["width"] = op.width;
  j["edged"] = op.edged;
  j["plan"] = op.plan_index;
  j["id"] = op.id;
  j["note"] = op.note;
  return j;
}

ShipOp ship_from(const json &j) {
  ShipOp op;
  std::string role = j.at("role");
  op.role = role == "fill"    ? ShipOp::Role::Fill
            : role == "shift" ? ShipOp::Role::Shift
                              : ShipOp::Role::Flush;
  op.src = target_from(j.at("src"));
  op.dst = target_from(j.at("dst"));
  for (auto &e : j.at("src_off")) op.src_off.push_back(expr_from(e));
  for (auto &e : j.at("dst_off")) op.dst_off.push_back(expr_from(e));
  op.di = j.at("di").get<int>();
  op.reps = j.at("reps").get<long long>();
  for (auto &e : j.at("segments")) op.seg_extents.push_back(min_from(e));
  op.width = j.at("width").get<int>();
  op.edged = j.at("edged").get<bool>();
  op.plan_index = j.at("plan").get<int>();
  op.id = j.at("id").get<int>();
  op.note = j.at("note").get<std::string>();
  return op;
}

json node_json(const Node &n) {
  json j;
  switch (n.kind) {
  case Node::Kind::Loop: {
    j["kind"] = "loop";
    j["var"] = n.var;
    j["lo"] = expr_json(n.lo);
    j["hi"] = min_json(n.hi);
    j["step"] = n.step;
    j["padded"] = n.padded;
    j["pipeline"] = n.pipeline;
    j["intertile"] = n.intertile;
    j["body"] = json::array();
    for (auto &c : n.body) j["body"].push_back(node_json(c));
    break;
  }
  case Node::Kind::Ship:
    j["kind"] = "ship";
    j["ship"] = ship_json(n.ship);
    break;
  case Node::Kind::Stmt:
    j["kind"] = "stmt";
    j["stmt"] = n.stmt_index;
    break;
  }
  return j;
}

Node node_from(const json &j) {
  Node n;
  std::string kind = j.at("kind");
  if (kind == "loop") {
    n.kind = Node::Kind::Loop;
    n.var = j.at("var");
    n.lo = expr_from(j.at("lo"));
    n.hi = min_from(j.at("hi"));
    n.step = j.at("step").get<long long>();
    n.padded = j.at("padded").get<bool>();
    n.pipeline = j.at("pipeline").get<bool>();
    n.intertile = j.at("intertile").get<bool>();
    for (auto &c : j.at("body")) n.body.push_back(node_from(c));
  } else if (kind == "ship") {
    n.kind = Node::Kind::Ship;
    n.ship = ship_from(j.at("ship"));
  } else {
    n.kind = Node::Kind::Stmt;
    n.stmt_index = j.at("stmt").get<int>();
  }
  return n;
}

json targeted_json(const TileStmt::TargetedAccess &a) {
  json j;
  j["target"] = target_json(a.target);
  j["indices"] = json::array();
  for (auto &e : a.indices) j["indices"].push_back(expr_json(e));
  return j;
}

TileStmt::TargetedAccess targeted_from(const json &j) {
  TileStmt::TargetedAccess a;
  a.target = target_from(j.at("target"));
  for (auto &e : j.at("indices")) a.indices.push_back(expr_from(e));
  return a;
}

json plan_json_full(const BufferPlan &p) {
  json j;
  j["array"] = p.array;
  j["accesses"] = p.accesses;
  j["kind"] = kind_name(p.kind);
  j["extents"] = p.extents;
  j["cost"] = p.cost;
  j["bbox"] = box_json(p.bbox);
  j["anchor"] = json::array();
  for (auto &e : p.anchor) j["anchor"].push_back(expr_json(e));
  j["chunk_dim"] = p.chunk_dim;
  j["has_read"] = p.has_read;
  j["has_write"] = p.has_write;
  j["write_access"] = p.write_access;
  j["prefill"] = p.prefill;
  j["halo_left"] = p.halo_left;
  j["padded_innermost_extent"] = p.padded_innermost_extent;
  j["width"] = p.width;
  j["buffer"] = p.buffer_name;
  j["diagnostics"] = p.diagnostics;
  return j;
}

BufferPlan plan_from(const json &j) {
  BufferPlan p;
  p.array = j.at("array");
  p.accesses = j.at("accesses").get<std::vector<int>>();
  std::string k = j.at("kind");
  p.kind = k == "full"    ? BufferKind::Full
           : k == "chunk" ? BufferKind::Chunk
           : k == "line"  ? BufferKind::Line
                          : BufferKind::Nc;
  p.extents = j.at("extents").get<std::vector<long long>>();
  p.cost = j.at("cost").get<long long>();
  p.bbox = box_from(j.at("bbox"));
  for (auto &e : j.at("anchor")) p.anchor.push_back(expr_from(e));
  p.chunk_dim = j.at("chunk_dim").get<int>();
  p.has_read = j.at("has_read").get<bool>();
  p.has_write = j.at("has_write").get<bool>();
  p.write_access = j.at("write_access").get<int>();
  p.prefill = j.at("prefill").get<bool>();
  p.halo_left = j.at("halo_left").get<long long>();
  p.padded_innermost_extent = j.at("padded_innermost_extent").get<long long>();
  p.width = j.at("width").get<int>();
  p.buffer_name = j.at("buffer");
  p.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
  return p;
}

json scop_json(const Scop &s) {
  json j;
  j["name"] = s.name;
  j["params"] = json::array();
  for (auto &p : s.params) {
    json pj;
    pj["name"] = p.name;
    if (p.value) pj["value"] = *p.value;
    j["params"].push_back(pj);
  }
  j["iter_vars"] = s.iter_vars;
  j["domain"] = box_json(s.domain);
  j["arrays"] = json::array();
  for (auto &[name, info] : s.arrays) {
    json aj;
    aj["name"] = name;
    aj["extents"] = json::array();
    for (auto &e : info.extents) aj["extents"].push_back(expr_json(e));
    j["arrays"].push_back(aj);
  }
  j["statements"] = json::array();
  for (auto &st : s.statements) {
    json sj;
    sj["write"] = access_json(st.write);
    sj["reads"] = json::array();
    for (auto &r : st.reads) sj["reads"].push_back(access_json(r));
    sj["rhs"] = rhs_json(st.rhs);
    j["statements"].push_back(sj);
  }
  return j;
}

Scop scop_from(const json &j) {
  Scop s;
  s.name = j.at("name");
  for (auto &pj : j.at("params")) {
    Param p;
    p.name = pj.at("name");
    if (pj.contains("value")) p.value = pj.at("value").get<long long>();
    s.params.push_back(p);
  }
  s.iter_vars = j.at("iter_vars").get<std::vector<std::string>>();
  s.domain = box_from(j.at("domain"));
  for (auto &aj : j.at("arrays")) {
    ArrayInfo info;
    for (auto &e : aj.at("extents")) info.extents.push_back(expr_from(e));
    s.arrays.emplace_back(aj.at("name"), info);
  }
  for (auto &sj : j.at("statements")) {
    Statement st;
    st.write = access_from(sj.at("write"));
    for (auto &r : sj.at("reads")) st.reads.push_back(access_from(r));
    st.rhs = rhs_from(sj.at("rhs"));
    s.statements.push_back(st);
  }
  for (auto &v : s.iter_vars) s.schedule.dims.push_back(AffineExpr::var(v));
  return s;
}

json tiled_json(const TiledScop &t) {
  json j;
  j["scop"] = scop_json(t.scop);
  j["sizes"] = t.spec.sizes;
  j["perm"] = t.spec.perm;
  j["outer_shifted"] = t.outer_shifted;
  j["inner_shifted"] = t.inner_shifted;
  j["padded"] = t.padded;
  j["dims"] = json::array();
  for (auto &d : t.dims)
    j["dims"].push_back({{"var", d.var},
                         {"tile_var", d.tile_var},
                         {"lb", expr_json(d.lb)},
                         {"ub", expr_json(d.ub)},
                         {"size", d.size},
                         {"stride", d.stride}});
  return j;
}

TiledScop tiled_from(const json &j) {
  TiledScop t;
  t.scop = scop_from(j.at("scop"));
  t.spec.sizes = j.at("sizes").get<std::vector<long long>>();
  t.spec.perm = j.at("perm").get<std::vector<int>>();
  t.outer_shifted = j.at("outer_shifted").get<bool>();
  t.inner_shifted = j.at("inner_shifted").get<bool>();
  t.padded = j.at("padded").get<bool>();
  t.spec.delta.resize(t.spec.sizes.size());
  for (auto &d : j.at("dims")) {
    TileDim td;
    td.var = d.at("var");
    td.tile_var = d.at("tile_var");
    td.lb = expr_from(d.at("lb"));
    td.ub = expr_from(d.at("ub"));
    td.size = d.at("size").get<long long>();
    td.stride = d.at("stride").get<long long>();
    t.dims.push_back(td);
  }
  for (size_t x = 0; x < t.dims.size(); ++x) {
    t.spec.delta[x].outer = t.outer_shifted ? -t.dims[x].lb.constant : 0;
    t.spec.delta[x].inner_neg_ti = t.inner_shifted;
  }
  return t;
}

} // namespace

nlohmann::json tile_program_json(const TileProgram &tp) {
  json j;
  j["format"] = "stencil-forge tile program v1";
  j["name"] = tp.name;
  j["width"] = tp.width;
  j["tiled"] = tiled_json(tp.tiled);
  j["plans"] = json::array();
  for (auto &p : tp.plans) j["plans"].push_back(plan_json_full(p));
  j["stmts"] = json::array();
  for (auto &st : tp.stmts) {
    json sj;
    sj["write"] = targeted_json(st.write);
    sj["reads"] = json::array();
    for (auto &r : st.reads) sj["reads"].push_back(targeted_json(r));
    sj["rhs"] = rhs_json(st.rhs);
    sj["guarded"] = st.guarded;
    sj["guards"] = json::array();
    for (auto &[a, b] : st.guard_le)
      sj["guards"].push_back({{"le", expr_json(a)}, {"bound", expr_json(b)}});
    j["stmts"].push_back(sj);
  }
  j["tree"] = json::array();
  for (auto &n : tp.roots) j["tree"].push_back(node_json(n));
  return j;
}

TileProgram tile_program_from_json(const nlohmann::json &j) {
  TileProgram tp;
  tp.name = j.at("name");
  tp.width = j.at("width").get<int>();
  tp.tiled = tiled_from(j.at("tiled"));
  for (auto &p : j.at("plans")) tp.plans.push_back(plan_from(p));
  for (auto &sj : j.at("stmts")) {
    TileStmt st;
    st.write = targeted_from(sj.at("write"));
    for (auto &r : sj.at("reads")) st.reads.push_back(targeted_from(r));
    st.rhs = rhs_from(sj.at("rhs"));
    st.guarded = sj.at("guarded").get<bool>();
    for (auto &g : sj.at("guards"))
      st.guard_le.emplace_back(expr_from(g.at("le")), expr_from(g.at("bound")));
    tp.stmts.push_back(std::move(st));
  }
  for (auto &n : j.at("tree")) tp.roots.push_back(node_from(n));
  return tp;
}

} // namespace sf
