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
#include "sf/vm.hpp"

#include <cstring>
#include <random>
#include <sstream>

namespace sf {

namespace {
constexpr uint64_t kSentinelBits = 0x7FF8DEAD5F171E01ull;

uint64_t fnv1a(const std::string &s) {
  uint64_t h = 1469598103934665603ull;
  for (char c : s) {
    h ^= uint64_t(uint8_t(c));
    h *= 1099511628211ull;
  }
  return h;
}
} // namespace

double Machine::sentinel() {
  double v;
  std::memcpy(&v, &kSentinelBits, sizeof v);
  return v;
}

bool Machine::is_sentinel(double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  return bits == kSentinelBits;
}

namespace {

std::vector<long long> shape_strides(const std::vector<long long> &shape) {
  std::vector<long long> s(shape.size(), 1);
  for (size_t m = shape.size(); m-- > 1;) s[m - 1] = s[m] * shape[m];
  return s;
}

/// Largest flat offset any access or fill can touch, over the padded tiles.
long long max_touched_offset(const std::string &array, const TileProgram &tp,
                             const Binding &b) {
  const TiledScop &t = tp.tiled;
  // concrete box covering every (padded) iteration, absolute indices
  NamedBox padded;
  for (size_t x = 0; x < t.depth(); ++x) {
    auto starts = t.tile_starts(int(x), b);
    long long first = starts.front();
    long long last = starts.back() + t.dims[x].size - 1;
    padded.vars.push_back(t.dims[x].var);
    padded.box.dims.push_back(BoxDim{AffineExpr::constant_of(first),
                                     AffineExpr::constant_of(last),
                                     t.dims[x].stride});
    // after shift_inner accesses read i + ti; bind tile vars to zero and
    // range the body symbol over absolute indices instead
    padded.vars.push_back(t.dims[x].tile_var);
    padded.box.dims.push_back(
        BoxDim{AffineExpr::constant_of(0), AffineExpr::constant_of(0), 1});
  }
  const ArrayInfo &info = tp.scop().array(array);
  std::vector<long long> shape;
  for (auto &e : info.extents) shape.push_back(e.eval(b));
  auto strides = shape_strides(shape);

  long long maxoff = 0;
  auto consider = [&](const std::vector<AffineExpr> &idx) {
    Box im = image(idx, padded, {});
    Binding bb = b;
    auto hi = lexmax_box(im, bb);
    long long off = 0;
    for (size_t m = 0; m < hi.size(); ++m) off += hi[m] * strides[m];
    maxoff = std::max(maxoff, off);
  };
  for (auto &[stmt, acc] : tp.scop().all_accesses())
    if (acc->array == array) consider(acc->indices);
  // halo'd fills read up to padded_innermost_extent past the shifted start
  for (auto &p : tp.plans) {
    if (!p.cached() || p.array != array) continue;
    std::vector<AffineExpr> corner = p.anchor;
    corner.back() =
        corner.back() - p.halo_left + (p.padded_innermost_extent - 1);
    // anchors range over tile vars; bound them by ranging the body symbols
    Box im = image(corner, padded, {});
    auto hi = lexmax_box(im, b);
    long long off = 0;
    for (size_t m = 0; m < hi.size(); ++m) off += hi[m] * strides[m];
    maxoff = std::max(maxoff, off);
  }
  return maxoff;
}

} // namespace

Machine make_machine(const Scop &s, const Binding &binding, uint64_t seed,
                     const TileProgram *tp) {
  Machine m;
  Binding b = s.bind_params(binding);
  for (auto &[name, info] : s.arrays) {
    MachineArray arr;
    for (auto &e : info.extents) arr.shape.push_back(e.eval(b));
    arr.logical = 1;
    for (long long e : arr.shape) arr.logical *= e;
    long long slack = 0;
    if (tp) slack = std::max(0LL, max_touched_offset(name, *tp, b) + 1 - arr.logical);
    arr.data.resize(size_t(arr.logical + slack));
    std::mt19937_64 rng(seed ^ fnv1a(name));
    for (long long i = 0; i < arr.logical; ++i)
      arr.data[size_t(i)] = double(rng() >> 11) * 0x1p-53 * 2.0 - 1.0;
    for (long long i = arr.logical; i < arr.logical + slack; ++i)
      arr.data[size_t(i)] = Machine::sentinel();
    m.ddr.emplace(name, std::move(arr));
  }
  if (tp) {
    for (auto &p : tp->plans) {
      if (!p.cached()) continue;
      auto shape = p.declared_shape();
      long long total = 1;
      for (long long e : shape) total *= e;
      m.buffers.emplace(p.buffer_name,
                        std::vector<double>(size_t(total), Machine::sentinel()));
    }
  }
  return m;
}

namespace {

struct Evaluator {
  Machine &m;

  /// Padded-context reads outside the array return the sentinel (hardware
  /// reads garbage there; trims and guards keep it from mattering).
  double ddr_read(const std::string &array, long long off, bool padded_context) {
    MachineArray &a = m.ddr.at(array);
    if (off < 0 || off >= (long long)a.data.size()) {
      if (padded_context) return Machine::sentinel();
      fail(ErrCode::OutOfFootprint,
           "read outside " + array + " at " + std::to_string(off));
    }
    if (!padded_context && off >= a.logical)
      fail(ErrCode::OutOfFootprint,
           "in-domain read ran past " + array + " at " + std::to_string(off));
    return a.data[size_t(off)];
  }

  void ddr_write(const std::string &array, long long off, double v) {
    MachineArray &a = m.ddr.at(array);
    if (off < 0 || off >= a.logical)
      fail(ErrCode::OutOfFootprint,
           "write outside " + array + " at " + std::to_string(off));
    if (Machine::is_sentinel(v))
      fail(ErrCode::SentinelLeak,
           "sentinel written to " + array + " at " + std::to_string(off));
    a.data[size_t(off)] = v;
  }
};

double eval_rhs(const ExprPtr &e, const std::vector<double> &reads) {
  switch (e->op) {
  case Expr::Op::Const: return e->value;
  case Expr::Op::Read: return reads[size_t(e->read_index)];
  case Expr::Op::Neg: return -eval_rhs(e->a, reads);
  case Expr::Op::Add: return eval_rhs(e->a, reads) + eval_rhs(e->b, reads);
  case Expr::Op::Sub: return eval_rhs(e->a, reads) - eval_rhs(e->b, reads);
  case Expr::Op::Mul: return eval_rhs(e->a, reads) * eval_rhs(e->b, reads);
  case Expr::Op::Div: return eval_rhs(e->a, reads) / eval_rhs(e->b, reads);
  }
  return 0;
}

} // namespace

void run_original(const Scop &s, const Binding &binding, Machine &m) {
  Binding b = s.bind_params(binding);
  std::map<std::string, std::vector<long long>> strides;
  for (auto &[name, arr] : m.ddr) strides[name] = shape_strides(arr.shape);
  Evaluator ev{m};
  Binding env = b;
  for_each_point(s.domain, b, [&](const std::vector<long long> &pt) {
    for (size_t x = 0; x < s.iter_vars.size(); ++x) env[s.iter_vars[x]] = pt[x];
    for (auto &st : s.statements) {
      std::vector<double> vals;
      for (auto &r : st.reads) {
        long long off = 0;
        auto &str = strides[r.array];
        for (size_t mth = 0; mth < r.indices.size(); ++mth)
          off += r.indices[mth].eval(env) * str[mth];
        vals.push_back(ev.ddr_read(r.array, off, /*allow_slack=*/false));
      }
      double v = eval_rhs(st.rhs, vals);
      long long woff = 0;
      auto &wstr = strides[st.write.array];
      for (size_t mth = 0; mth < st.write.indices.size(); ++mth)
        woff += st.write.indices[mth].eval(env) * wstr[mth];
      MachineArray &a = m.ddr.at(st.write.array);
      if (woff < 0 || woff >= a.logical)
        fail(ErrCode::OutOfFootprint, "original write outside " + st.write.array);
      a.data[size_t(woff)] = v;
    }
  });
}

namespace {

struct TransformRunner {
  const TileProgram &tp;
  Machine &m;
  Binding env;

  TransformRunner(const TileProgram &tp_, Machine &m_) : tp(tp_), m(m_) {}
  std::map<std::string, std::vector<long long>> ddr_strides;
  std::map<std::string, std::vector<long long>> buf_strides;
  std::map<std::string, std::vector<long long>> buf_shape;
  std::map<std::string, std::vector<long long>> ddr_shape;

  void run(const Binding &binding) {
    env = tp.scop().bind_params(binding);
    for (auto &[name, arr] : m.ddr) {
      ddr_strides[name] = shape_strides(arr.shape);
      ddr_shape[name] = arr.shape;
    }
    for (auto &p : tp.plans) {
      if (!p.cached()) continue;
      buf_shape[p.buffer_name] = p.declared_shape();
      buf_strides[p.buffer_name] = shape_strides(buf_shape[p.buffer_name]);
    }
    exec_nodes(tp.roots);
  }

  void exec_nodes(const std::vector<Node> &nodes) {
    for (auto &n : nodes) exec(n);
  }

  void exec(const Node &n) {
    switch (n.kind) {
    case Node::Kind::Loop: {
      long long lo = n.lo.eval(env), hi = n.hi.eval(env);
      for (long long v = lo; v <= hi; v += n.step) {
        env[n.var] = v;
        if (n.intertile || is_outer_intra(n.var)) {
          TraceRec mark;
          mark.kind = TraceRec::Kind::Mark;
          mark.array = n.var;
          mark.offset = v;
          m.trace.push_back(mark);
        }
        exec_nodes(n.body);
      }
      env.erase(n.var);
      break;
    }
    case Node::Kind::Ship: exec_ship(n.ship); break;
    case Node::Kind::Stmt: exec_stmt(tp.stmts[size_t(n.stmt_index)]); break;
    }
  }

  bool is_outer_intra(const std::string &var) const {
    return tp.tiled.depth() >= 2 &&
           var == tp.tiled.dims[size_t(tp.tiled.spec.perm[0])].var;
  }

  void record(TraceRec::Kind kind, const ShipOp &op, const std::string &arr,
              long long off, long long len, int width) {
    if (len <= 0) return;
    TraceRec r;
    r.kind = kind;
    r.role = op.role;
    r.ship_id = op.id;
    r.plan_index = op.plan_index;
    r.array = arr;
    r.offset = off;
    r.len = len;
    r.width = width;
    m.trace.push_back(r);
  }

  void exec_ship(const ShipOp &op) {
    const auto &sshape = op.src.is_buffer ? buf_shape.at(op.src.name)
                                          : ddr_shape.at(op.src.name);
    const auto &dshape = op.dst.is_buffer ? buf_shape.at(op.dst.name)
                                          : ddr_shape.at(op.dst.name);
    auto instances = expand_ship(op, env, sshape, dshape);
    for (auto &inst : instances) {
      if (op.src.is_buffer && op.dst.is_buffer) {
        auto &buf = m.buffers.at(op.src.name);
        auto &dst = m.buffers.at(op.dst.name);
        for (long long q = 0; q < inst.len; ++q)
          dst[size_t(inst.dst_off + q)] = buf[size_t(inst.src_off + q)];
        record(TraceRec::Kind::Local, op, "", inst.dst_off, inst.len, 1);
        continue;
      }
      if (!op.src.is_buffer) { // fill: DDR -> buffer
        Evaluator ev{m};
        auto &dst = m.buffers.at(op.dst.name);
        for (long long q = 0; q < inst.len; ++q)
          dst[size_t(inst.dst_off + q)] =
              ev.ddr_read(op.src.name, inst.src_off + q, /*allow_slack=*/true);
        record(op.width > 1 ? TraceRec::Kind::Wide : TraceRec::Kind::Scalar, op,
               op.src.name, inst.src_off, inst.len, op.width);
        continue;
      }
      // flush: buffer -> DDR
      Evaluator ev{m};
      auto &src = m.buffers.at(op.src.name);
      auto copy_piece = [&](long long from, long long count, bool wide) {
        if (count <= 0) return;
        for (long long q = 0; q < count; ++q)
          ev.ddr_write(op.dst.name, inst.dst_off + from + q,
                       src[size_t(inst.src_off + from + q)]);
        record(wide ? TraceRec::Kind::Wide : TraceRec::Kind::Scalar, op,
               op.dst.name, inst.dst_off + from, count, wide ? op.width : 1);
      };
      if (op.edged && op.width > 1) {
        long long w = op.width;
        long long head = (w - (inst.dst_off % w)) % w;
        head = std::min(head, inst.len);
        long long mid = ((inst.len - head) / w) * w;
        long long tail = inst.len - head - mid;
        copy_piece(0, head, false);
        copy_piece(head, mid, true);
        copy_piece(head + mid, tail, false);
      } else {
        copy_piece(0, inst.len, op.width > 1);
      }
    }
  }

  void exec_stmt(const TileStmt &st) {
    bool pass = true;
    for (auto &[lhs, rhs] : st.guard_le)
      if (lhs.eval(env) > rhs.eval(env)) pass = false;
    if (st.guarded && !pass) {
      ++m.guard_suppressed;
      return;
    }
    // validity: the innermost padded loop may run past the domain
    bool valid = true;
    const TiledScop &t = tp.tiled;
    if (tp.tiled.padded) {
      const TileDim &dim = t.dims[size_t(t.innermost_dim())];
      valid = env.at(dim.var) + env.at(dim.tile_var) <= dim.ub.eval(env);
    }
    if (!valid) ++m.padded_points_executed;

    Evaluator ev{m};
    std::vector<double> vals;
    for (auto &r : st.reads) {
      long long off = linear(r);
      double v;
      if (r.target.is_buffer) {
        auto &buf = m.buffers.at(r.target.name);
        if (off < 0 || off >= (long long)buf.size())
          fail(ErrCode::Internal, "buffer read out of range in " + r.target.name);
        v = buf[size_t(off)];
      } else {
        v = ev.ddr_read(r.target.name, off, /*allow_slack=*/!valid);
      }
      if (valid && Machine::is_sentinel(v))
        fail(ErrCode::Internal,
             "uncovered read: sentinel reached a valid iteration via " +
                 r.target.name);
      vals.push_back(v);
    }
    double v = eval_rhs(st.rhs, vals);
    long long woff = linear(st.write);
    if (st.write.target.is_buffer) {
      auto &buf = m.buffers.at(st.write.target.name);
      if (woff < 0 || woff >= (long long)buf.size())
        fail(ErrCode::Internal, "buffer write out of range in " + st.write.target.name);
      buf[size_t(woff)] = v;
    } else {
      ev.ddr_write(st.write.target.name, woff, v);
    }
  }

  long long linear(const TileStmt::TargetedAccess &a) {
    const auto &str = a.target.is_buffer ? buf_strides.at(a.target.name)
                                         : ddr_strides.at(a.target.name);
    long long off = 0;
    for (size_t mth = 0; mth < a.indices.size(); ++mth)
      off += a.indices[mth].eval(env) * str[mth];
    return off;
  }
};

} // namespace

void run_transformed(const TileProgram &tp, const Binding &binding, Machine &m) {
  TransformRunner r{tp, m};
  r.run(binding);
}

BurstReport check_bursts(const std::vector<TraceRec> &trace, int w) {
  BurstReport rep;
  for (auto &r : trace) {
    if (r.kind == TraceRec::Kind::Scalar) {
      ++rep.scalar_count;
      continue;
    }
    if (r.kind != TraceRec::Kind::Wide) continue;
    ++rep.wide_count;
    if (r.offset % w != 0)
      rep.violations.push_back("ship " + std::to_string(r.ship_id) + " on " +
                               r.array + ": offset " + std::to_string(r.offset) +
                               " not divisible by " + std::to_string(w));
    if (r.len % w != 0)
      rep.violations.push_back("ship " + std::to_string(r.ship_id) + " on " +
                               r.array + ": length " + std::to_string(r.len) +
                               " not divisible by " + std::to_string(w));
  }
  return rep;
}

std::string trace_dump(const std::vector<TraceRec> &trace) {
  std::ostringstream os;
  for (auto &r : trace) {
    if (r.kind == TraceRec::Kind::Mark) continue;
    const char *role = r.role == ShipOp::Role::Fill    ? "FILL"
                       : r.role == ShipOp::Role::Shift ? "SHIFT"
                                                       : "FLUSH";
    const char *kind = r.kind == TraceRec::Kind::Wide     ? "wide"
                       : r.kind == TraceRec::Kind::Scalar ? "scalar"
                                                          : "local";
    os << role << " " << kind << " " << r.offset << " " << r.len << "\n";
  }
  return os.str();
}

bool arrays_bit_equal(const Machine &a, const Machine &b, std::string *first_diff) {
  for (auto &[name, arr] : a.ddr) {
    auto it = b.ddr.find(name);
    if (it == b.ddr.end()) {
      if (first_diff) *first_diff = "missing array " + name;
      return false;
    }
    for (long long i = 0; i < arr.logical; ++i) {
      uint64_t x, y;
      std::memcpy(&x, &arr.data[size_t(i)], 8);
      std::memcpy(&y, &it->second.data[size_t(i)], 8);
      if (x != y) {
        if (first_diff)
          *first_diff = name + "[" + std::to_string(i) + "]: " +
                        std::to_string(arr.data[size_t(i)]) + " vs " +
                        std::to_string(it->second.data[size_t(i)]);
        return false;
      }
    }
  }
  return true;
}

} // namespace sf
