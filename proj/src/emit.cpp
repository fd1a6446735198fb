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
#include "sf/emit.hpp"

#include <cctype>
#include <sstream>

namespace sf {

namespace {

std::string min_str(const MinExpr &e) {
  if (e.is_single()) return e.single().str();
  std::string s;
  for (size_t i = 0; i + 1 < e.terms.size(); ++i) s += "SF_MIN(" + e.terms[i].str() + ", ";
  s += e.terms.back().str();
  s += std::string(e.terms.size() - 1, ')');
  return s;
}

struct Emitter {
  const TileProgram &tp;
  const EmitConfig &cfg;
  std::ostringstream os;
  int depth = 0;

  Emitter(const TileProgram &tp_, const EmitConfig &cfg_) : tp(tp_), cfg(cfg_) {}

  std::string ind() const { return std::string(size_t(depth) * 2, ' '); }

  void line(const std::string &s) { os << ind() << s << "\n"; }

  std::string linear_ddr(const std::string &array,
                         const std::vector<std::string> &idx) const {
    const ArrayInfo &info = tp.scop().array(array);
    std::string s;
    for (size_t m = 0; m < idx.size(); ++m) {
      if (m == 0) {
        s = "(" + idx[0] + ")";
      } else {
        s = "(" + s + " * (" + info.extents[m].str() + ") + (" + idx[m] + "))";
      }
    }
    return s;
  }

  std::string access_str(const TileStmt::TargetedAccess &a) const {
    if (a.target.is_buffer) {
      std::string s = a.target.name;
      for (auto &e : a.indices) s += "[" + e.str() + "]";
      return s;
    }
    std::vector<std::string> idx;
    for (auto &e : a.indices) idx.push_back(e.str());
    return a.target.name + "[" + linear_ddr(a.target.name, idx) + "]";
  }

  void emit_buffer_decls() {
    for (auto &p : tp.plans) {
      if (!p.cached()) continue;
      std::string s = "float " + p.buffer_name;
      for (long long e : p.declared_shape()) s += "[" + std::to_string(e) + "]";
      s += ";";
      if (p.halo_left)
        s += " /* halo_left=" + std::to_string(p.halo_left) + " */";
      line(s);
    }
    for (auto &p : tp.plans) {
      if (!p.cached()) continue;
      os << "#pragma HLS ARRAY_PARTITION variable=" << p.buffer_name
         << " complete\n";
    }
  }

  void emit_ship(const ShipOp &op) {
    // macro form as a comment, then the expansion
    std::ostringstream c;
    c << "/* " << (op.note.empty() ? "ship" : op.note) << ": ship("
      << op.src.name << ", [";
    for (size_t m = 0; m < op.src_off.size(); ++m)
      c << (m ? "," : "") << op.src_off[m].str();
    c << "], " << op.dst.name << ", [";
    for (size_t m = 0; m < op.dst_off.size(); ++m)
      c << (m ? "," : "") << op.dst_off[m].str();
    c << "], " << op.di << ", " << op.reps << ") */";
    line(c.str());

    std::vector<std::string> loop_vars;
    int opened = 0;
    if (op.reps > 1) {
      line("for (long r = 0; r < " + std::to_string(op.reps) + "; r++)");
      loop_vars.push_back("r");
      ++depth;
      ++opened;
    }
    for (int k = 0; k + 1 < op.di; ++k) {
      std::string v = "s" + std::to_string(k + 1);
      line("for (long " + v + " = 0; " + v + " < " +
           min_str(op.seg_extents[size_t(k)]) + "; " + v + "++)");
      loop_vars.push_back(v);
      ++depth;
      ++opened;
    }
    // offsets per side
    auto side_idx = [&](const std::vector<AffineExpr> &off, size_t rank) {
      std::vector<std::string> idx;
      for (size_t m = 0; m < rank; ++m) {
        std::string s = off[m].str();
        size_t seg_base = rank - size_t(op.di);
        if (op.reps > 1 && m + size_t(op.di) + 1 == rank) s += " + r";
        for (int k = 0; k + 1 < op.di; ++k)
          if (m == seg_base + size_t(k)) s += " + s" + std::to_string(k + 1);
        idx.push_back(s);
      }
      return idx;
    };
    auto side = [&](const ShipTarget &tgt, const std::vector<AffineExpr> &off) {
      auto idx = side_idx(off, off.size());
      if (tgt.is_buffer) {
        std::string s = "&" + tgt.name;
        for (auto &i : idx) s += "[" + i + "]";
        return s;
      }
      return "&" + tgt.name + "[" + linear_ddr(tgt.name, idx) + "]";
    };
    std::string len = min_str(op.seg_extents.back());
    if (op.edged && !op.dst.is_buffer) {
      // trimmed write-back: alignment recovered from the flat DDR offset
      std::string off = linear_ddr(op.dst.name, side_idx(op.dst_off, op.dst_off.size()));
      line("burstcpy_edged(" + op.dst.name + ", " + off + ", " +
           side(op.src, op.src_off) + ", " + len + ", " +
           std::to_string(op.width) + ");");
    } else {
      line("burstcpy(" + side(op.dst, op.dst_off) + ", " +
           side(op.src, op.src_off) + ", " + len + ", " +
           std::to_string(op.width) + ");");
    }
    depth -= opened;
  }

  void emit_nodes(const std::vector<Node> &nodes) {
    for (auto &n : nodes) emit_node(n);
  }

  void emit_node(const Node &n) {
    switch (n.kind) {
    case Node::Kind::Loop: {
      std::string head = "for (long " + n.var + " = " + n.lo.str() + "; " +
                         n.var + " <= " + min_str(n.hi) + "; " + n.var +
                         " += " + std::to_string(n.step) + ") {";
      if (n.padded) head += " /* padded loop */";
      line(head);
      ++depth;
      if (n.pipeline) os << "#pragma HLS PIPELINE\n";
      bool decls_here = n.intertile && !has_intertile_child(n);
      if (decls_here) emit_buffer_decls();
      emit_nodes(n.body);
      --depth;
      line("}");
      break;
    }
    case Node::Kind::Ship:
      emit_ship(n.ship);
      break;
    case Node::Kind::Stmt: {
      const TileStmt &st = tp.stmts[size_t(n.stmt_index)];
      // rebuild the rhs text against the redirected reads
      Statement shim;
      shim.rhs = st.rhs;
      for (auto &r : st.reads) {
        AccessRelation a;
        a.array = access_str(r);
        shim.reads.push_back(a);
      }
      std::string rhs = expr_str(st.rhs, shim,
                                 [](const AccessRelation &a) { return a.array; });
      std::string text = access_str(st.write) + " = " + rhs + ";";
      if (st.guarded) {
        std::string cond;
        for (size_t i = 0; i < st.guard_le.size(); ++i) {
          if (i) cond += " && ";
          cond += st.guard_le[i].first.str() + " <= " + st.guard_le[i].second.str();
        }
        text = "if (" + cond + ") { " + text + " }";
      }
      line(text);
      break;
    }
    }
  }

  static bool has_intertile_child(const Node &n) {
    for (auto &c : n.body)
      if (c.kind == Node::Kind::Loop && c.intertile) return true;
    return false;
  }
};

} // namespace

std::string emit_hls(const TileProgram &tp, const EmitConfig &cfg) {
  Emitter em{tp, cfg};
  std::ostringstream &os = em.os;
  const Scop &s = tp.scop();
  os << "/* " << tp.name << ": tiled stencil kernel (stencil-forge)\n";
  os << " * tile sizes (";
  for (size_t x = 0; x < tp.tiled.depth(); ++x)
    os << (x ? "," : "") << tp.tiled.dims[x].size;
  os << "), intra-tile order (";
  for (size_t p = 0; p < tp.tiled.depth(); ++p)
    os << (p ? "," : "")
       << tp.tiled.dims[size_t(tp.tiled.spec.perm[p])].var;
  os << "), port width " << cfg.width << ", " << cfg.frequency_mhz << " MHz\n";
  for (auto &p : tp.plans) {
    os << " * " << p.array << ": " << kind_name(p.kind);
    if (p.cached()) {
      os << " " << p.buffer_name << "[";
      auto shape = p.declared_shape();
      for (size_t m = 0; m < shape.size(); ++m) os << (m ? "," : "") << shape[m];
      os << "] halo_left=" << p.halo_left << " width=" << p.width;
    }
    os << "\n";
  }
  os << " * host note: allocate DDR arrays with slack past the logical end;\n";
  os << " * padded boundary tiles read (never write) up to one tile past it.\n";
  os << " */\n";
  os << "#include <string.h>\n\n";
  os << "#define SF_MIN(a, b) ((a) < (b) ? (a) : (b))\n\n";
  os << "/* w-wide port transfer; DDR address and length divisible by w */\n";
  os << "static void burstcpy(float *dst, const float *src, long n, int w) {\n";
  os << "  (void)w;\n";
  os << "  memcpy(dst, src, (size_t)n * sizeof(float));\n";
  os << "}\n\n";
  os << "/* trimmed write-back: scalar edges around an aligned wide middle */\n";
  os << "static void burstcpy_edged(float *base, long off, const float *src,\n";
  os << "                           long n, int w) {\n";
  os << "  long head = w > 1 ? (w - off % w) % w : 0;\n";
  os << "  if (head > n) head = n;\n";
  os << "  long mid = w > 1 ? ((n - head) / w) * w : n - head;\n";
  os << "  memcpy(base + off, src, (size_t)head * sizeof(float));\n";
  os << "  burstcpy(base + off + head, src + head, mid, w);\n";
  os << "  memcpy(base + off + head + mid, src + head + mid,\n";
  os << "         (size_t)(n - head - mid) * sizeof(float));\n";
  os << "}\n\n";
  // kernel signature
  std::string kernel = tp.name;
  if (!kernel.empty() && std::isdigit((unsigned char)kernel[0]))
    kernel = "sf_" + kernel;
  os << "void " << kernel << "_kernel(";
  bool first = true;
  for (auto &[name, info] : s.arrays) {
    (void)info;
    os << (first ? "" : ", ") << "float *" << name;
    first = false;
  }
  for (auto &p : s.params) os << (first ? "" : ", ") << "long " << p.name, first = false;
  os << ") {\n";
  if (cfg.dialect == "vitis") {
    int bundle = 0;
    for (auto &[name, info] : s.arrays) {
      (void)info;
      os << "#pragma HLS INTERFACE m_axi port=" << name << " bundle=gmem"
         << bundle++ << " /* port width " << cfg.width << " */\n";
    }
  }
  em.depth = 1;
  em.emit_nodes(tp.roots);
  os << "}\n";
  return os.str();
}

namespace {

struct CostWalker {
  const TileProgram &tp;
  const EmitConfig &cfg;
  CostReport &rep;
  Binding env;

  CostWalker(const TileProgram &tp_, const EmitConfig &cfg_, CostReport &rep_)
      : tp(tp_), cfg(cfg_), rep(rep_) {}

  void walk(const std::vector<Node> &nodes) {
    for (auto &n : nodes) node(n);
  }

  void node(const Node &n) {
    switch (n.kind) {
    case Node::Kind::Loop: {
      if (n.pipeline) {
        // one pipelined run of the (unrolled-innermost) sub-tile per entry
        const TileDim &inner =
            tp.tiled.dims[size_t(tp.tiled.innermost_dim())];
        rep.pipeline_starts += 1;
        rep.compute_cycles +=
            cfg.c_pipe + ceil_div(inner.size / inner.stride, cfg.ii);
      }
      bool innermost_intra =
          !n.intertile &&
          n.var == tp.tiled.dims[size_t(tp.tiled.innermost_dim())].var;
      if (innermost_intra) return; // body holds only statements
      long long lo = n.lo.eval(env), hi = n.hi.eval(env);
      for (long long v = lo; v <= hi; v += n.step) {
        env[n.var] = v;
        walk(n.body);
      }
      env.erase(n.var);
      break;
    }
    case Node::Kind::Ship: {
      const ShipOp &op = n.ship;
      long long len = op.seg_extents.back().eval(env);
      if (len <= 0) return;
      long long bursts = op.reps;
      for (int k = 0; k + 1 < op.di; ++k) {
        long long c = op.seg_extents[size_t(k)].eval(env);
        if (c <= 0) return;
        bursts *= c;
      }
      long long w = op.width;
      long long cycles = bursts * (cfg.c_setup + ceil_div(len, w));
      ShipCost &sc = rep.per_ship[op.id];
      sc.bursts += bursts;
      sc.elements += bursts * len;
      sc.cycles += cycles;
      if (sc.role.empty()) {
        sc.role = op.role == ShipOp::Role::Fill    ? "fill"
                  : op.role == ShipOp::Role::Shift ? "shift"
                                                   : "flush";
        sc.buffer = op.dst.is_buffer ? op.dst.name : op.src.name;
      }
      bool local = op.src.is_buffer && op.dst.is_buffer;
      auto &pt = rep.per_buffer[sc.buffer];
      if (local)
        pt.shift_elements += bursts * len;
      else if (op.role == ShipOp::Role::Flush)
        pt.flush_elements += bursts * len;
      else
        pt.fill_elements += bursts * len;
      rep.ship_cycles += cycles;
      break;
    }
    case Node::Kind::Stmt:
      break;
    }
  }
};

} // namespace

CostReport cost_model(const TileProgram &tp, const EmitConfig &cfg,
                      const Binding &binding) {
  CostReport rep;
  CostWalker w{tp, cfg, rep};
  w.env = tp.scop().bind_params(binding);
  w.walk(tp.roots);
  rep.total_cycles = rep.ship_cycles + rep.compute_cycles;
  return rep;
}

nlohmann::json CostReport::to_json(const TileProgram &tp,
                                   const EmitConfig &cfg) const {
  nlohmann::json j;
  j["note"] = "analytical model for ordering comparisons only";
  j["config"] = {{"port_width", cfg.width},
                 {"frequency_mhz", cfg.frequency_mhz},
                 {"c_setup", cfg.c_setup},
                 {"c_pipe", cfg.c_pipe},
                 {"ii", cfg.ii}};
  j["ship_cycles"] = ship_cycles;
  j["compute_cycles"] = compute_cycles;
  j["total_cycles"] = total_cycles;
  j["pipeline_starts"] = pipeline_starts;
  j["per_ship"] = nlohmann::json::array();
  for (auto &[id, sc] : per_ship)
    j["per_ship"].push_back({{"id", id},
                             {"role", sc.role},
                             {"buffer", sc.buffer},
                             {"bursts", sc.bursts},
                             {"elements", sc.elements},
                             {"cycles", sc.cycles}});
  j["per_buffer"] = nlohmann::json::object();
  for (auto &[name, pt] : per_buffer)
    j["per_buffer"][name] = {{"fill_elements", pt.fill_elements},
                             {"flush_elements", pt.flush_elements},
                             {"shift_elements", pt.shift_elements}};
  (void)tp;
  return j;
}

} // namespace sf
