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

// Acceptance suite. Each criterion prints one pass/fail line; the full
// run doubles as the release gate (ctest -R acceptance).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cstdio>

#include "helpers.hpp"
#include "sf/verify.hpp"
#include "sf/vm.hpp"

using namespace sf;

namespace {

struct Criterion {
  int number;
  std::string what;
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string &msg) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += msg;
    }
  }

  ~Criterion() {
    std::printf("criterion %d: %s  %s%s%s\n", number, ok ? "PASS" : "FAIL",
                what.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
  }
};

const BufferPlan &plan_for(const std::vector<BufferPlan> &plans,
                           const std::string &array) {
  for (auto &p : plans)
    if (p.array == array) return p;
  static BufferPlan none;
  return none;
}

std::vector<long long> paper_sizes(size_t d) {
  return d == 1 ? std::vector<long long>{1024}
         : d == 2 ? std::vector<long long>{128, 128}
                  : std::vector<long long>{32, 32, 32};
}

MatrixReport &full_matrix() {
  static MatrixReport rep = [] {
    MatrixOptions mo;
    return run_matrix(sft::benchmark_paths(), mo);
  }();
  return rep;
}

double &matrix_seconds() {
  static double s = 0.0;
  return s;
}

} // namespace

TEST_CASE("criterion 1: permutation cost table") {
  Criterion c{1, "analyze reproduces the 36961 / 34946 totals and the winner"};
  auto t0 = std::chrono::steady_clock::now();
  Scop s = extract_scop(parse_file(sft::fixture("running_example.stencil")));
  auto all = evaluate_permutations(s, {32, 32, 32});
  PermutationChoice chosen = select_permutation(s, {32, 32, 32});
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const PermutationChoice *ikj = nullptr, *ijk = nullptr;
  for (auto &cand : all) {
    if (cand.perm == std::vector<int>{0, 2, 1}) ikj = &cand;
    if (cand.perm == std::vector<int>{0, 1, 2}) ijk = &cand;
  }
  c.expect(ikj && ijk, "both permutations evaluated");
  if (ikj) {
    c.expect(ikj->total_cost == 36961,
             "p=(i,k,j) total " + std::to_string(ikj->total_cost));
    c.expect(plan_for(ikj->plans, "A").kind == BufferKind::Full &&
                 plan_for(ikj->plans, "A").extents ==
                     std::vector<long long>{33, 33, 33},
             "A full [33,33,33] under (i,k,j)");
    c.expect(plan_for(ikj->plans, "V").kind == BufferKind::Chunk &&
                 plan_for(ikj->plans, "V").extents ==
                     std::vector<long long>{1, 32, 32},
             "V chunk [1,32,32] under (i,k,j)");
  }
  if (ijk) {
    c.expect(ijk->total_cost == 34946,
             "p=(i,j,k) total " + std::to_string(ijk->total_cost));
    c.expect(plan_for(ijk->plans, "A").kind == BufferKind::Chunk &&
                 plan_for(ijk->plans, "A").extents ==
                     std::vector<long long>{2, 33, 33},
             "A chunk [2,33,33] under (i,j,k)");
    c.expect(plan_for(ijk->plans, "V").kind == BufferKind::Full &&
                 plan_for(ijk->plans, "V").extents ==
                     std::vector<long long>{32, 32, 32},
             "V full [32,32,32] under (i,j,k)");
  }
  c.expect(chosen.perm == std::vector<int>{0, 1, 2}, "winner is (i,j,k)");
  c.expect(secs < 1.0, "analyze took " + std::to_string(secs) + "s");
  CHECK(c.ok);
}

TEST_CASE("criterion 2: halo reproduction") {
  Criterion c{2, "w=4 declares A as [2,33,36] with halo_left=3"};
  Scop s = extract_scop(parse_file(sft::fixture("running_example.stencil")));
  TiledScop t = apply_standard_tiling(s, {32, 32, 32}, {0, 1, 2});
  auto plans = build_plans(t, analyze_dependences(s));
  const BufferPlan &a = plan_for(plans, "A");
  c.expect(a.kind == BufferKind::Chunk, "A classifies as chunk");
  BufferPlan h = add_halo(a, 4, t, s.bind_params());
  c.expect(h.halo_left == 3, "halo_left " + std::to_string(h.halo_left));
  c.expect(h.declared_shape() == std::vector<long long>{2, 33, 36},
           "declared shape");
  CHECK(c.ok);
}

TEST_CASE("criterion 3: tiling table") {
  Criterion c{3, "first-tile iteration counts 31 / 32 / 32 / 32"};
  Scop s = extract_scop(parse_file(sft::fixture("fig2.stencil")));
  Binding b{{"N", 100}};
  TiledScop t3 = tile(s, {32}, {0});
  c.expect(tile_iteration_counts(t3, 0, b).front().first == 31,
           "normal form first tile");
  TiledScop t4 = shift_outer(t3);
  c.expect(tile_iteration_counts(t4, 0, b).front().first == 32,
           "outer-shifted first tile");
  TiledScop t5 = shift_inner(t4);
  c.expect(tile_iteration_counts(t5, 0, b).front().first == 32,
           "inner-shifted first tile");
  TiledScop t6 = pad_innermost(t5);
  auto counts = tile_iteration_counts(t6, 0, b);
  c.expect(counts.front().first == 32, "padded first tile");
  for (auto &[total, valid] : counts)
    c.expect(total == 32, "padded tile of " + std::to_string(total));
  CHECK(c.ok);
}

TEST_CASE("criterion 4: differential correctness matrix") {
  Criterion c{4, "10 benchmarks x legal perms x SZ x N x w bit-equal"};
  auto t0 = std::chrono::steady_clock::now();
  MatrixReport &rep = full_matrix();
  matrix_seconds() =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.expect(rep.cells.size() == 248,
           "expected 248 cells, got " + std::to_string(rep.cells.size()));
  long long fails = 0;
  for (auto &cell : rep.cells)
    if (!cell.equal) {
      ++fails;
      if (fails == 1)
        c.expect(false, cell.bench + " sz=" + std::to_string(cell.size_base) +
                            " rem=" + std::to_string(cell.remainder) +
                            " w=" + std::to_string(cell.width) + ": " + cell.note);
    }
  c.expect(fails == 0, std::to_string(fails) + " mismatching cells");
  c.expect(matrix_seconds() < 300.0,
           "matrix took " + std::to_string(matrix_seconds()) + "s");
  CHECK(c.ok);
}

TEST_CASE("criterion 5: burst alignment across the matrix") {
  Criterion c{5, "every wide DDR transfer at w=4 is offset- and length-aligned"};
  MatrixReport &rep = full_matrix();
  long long wide = 0;
  for (auto &cell : rep.cells) {
    if (cell.width != 4) continue;
    wide += cell.wide_count;
    c.expect(cell.bursts_ok, cell.bench + ": " + cell.note);
  }
  c.expect(wide > 0, "no wide transfers recorded");
  c.detail = std::to_string(wide) + " wide transfers checked";
  CHECK(c.ok);
}

TEST_CASE("criterion 6: chunk reuse ships less than a refill") {
  Criterion c{6, "steady-state A traffic per tick beats a full sub-tile refill"};
  DriverOptions o;
  o.sizes = {32, 32, 32};
  o.perm = {0, 1, 2};
  Compiled comp = compile_path(sft::fixture("running_example.stencil"), o);
  CellResult r = run_differential(comp, 42);
  c.expect(r.equal, "differential baseline");

  const BufferPlan *a = comp.tp.plan_of_buffer("A_buf");
  c.expect(a != nullptr, "A buffer plan exists");
  long long bbox2 = a->extents[1], bbox3 = a->extents[2];

  // measured DDR elements shipped for A between outer intra-tile ticks
  std::vector<long long> per_tick;
  long long cur = -1;
  for (auto &rec : r.transformed.trace) {
    if (rec.kind == TraceRec::Kind::Mark && rec.array == "i") {
      if (cur >= 0) per_tick.push_back(cur);
      cur = 0;
      continue;
    }
    if (cur < 0) continue;
    if (rec.kind == TraceRec::Kind::Mark) {
      per_tick.push_back(cur);
      cur = -1;
      continue;
    }
    if (rec.array == "A" && rec.role == ShipOp::Role::Fill) cur += rec.len;
  }
  if (cur >= 0) per_tick.push_back(cur);
  c.expect(per_tick.size() >= 2, "at least two ticks observed");
  long long steady = per_tick.size() >= 2 ? per_tick[1] : -1;
  c.expect(steady > 0 && steady < 2 * bbox2 * bbox3,
           "steady tick " + std::to_string(steady) + " vs refill " +
               std::to_string(2 * bbox2 * bbox3));

  // trace counts equal the cost report exactly
  EmitConfig ecfg;
  CostReport cost = cost_model(comp.tp, ecfg, comp.params);
  std::map<std::string, CostReport::PlanTotals> measured;
  for (auto &rec : r.transformed.trace) {
    if (rec.kind == TraceRec::Kind::Mark) continue;
    const BufferPlan &p = comp.tp.plans[size_t(rec.plan_index)];
    auto &t = measured[p.buffer_name];
    if (rec.kind == TraceRec::Kind::Local)
      t.shift_elements += rec.len;
    else if (rec.role == ShipOp::Role::Flush)
      t.flush_elements += rec.len;
    else
      t.fill_elements += rec.len;
  }
  for (auto &[name, want] : cost.per_buffer) {
    c.expect(measured[name].fill_elements == want.fill_elements,
             name + " fill elements");
    c.expect(measured[name].flush_elements == want.flush_elements,
             name + " flush elements");
    c.expect(measured[name].shift_elements == want.shift_elements,
             name + " shift elements");
  }
  CHECK(c.ok);
}

TEST_CASE("criterion 7: modeled trends") {
  Criterion c{7, "cycles fall with w and rise when tiles are halved"};
  for (auto &path : sft::benchmark_paths()) {
    Scop probe = extract_scop(parse_file(path));
    auto sizes = paper_sizes(probe.depth());
    long long prev = -1, w8 = -1, w16 = -1;
    for (int w : {1, 8, 16}) {
      DriverOptions o;
      o.sizes = sizes;
      o.width = w;
      Compiled comp = compile_path(path, o);
      EmitConfig cfg;
      cfg.width = w;
      long long total = cost_model(comp.tp, cfg, comp.params).total_cycles;
      if (prev >= 0)
        c.expect(total <= prev, probe.name + " not monotone at w=" +
                                    std::to_string(w));
      prev = total;
      if (w == 8) w8 = total;
      if (w == 16) w16 = total;
    }
    bool low_point = probe.name == "1d_jacobi" || probe.name == "2d_5p" ||
                     probe.name == "2d_fdtd0" || probe.name == "2d_fdtd1";
    if (low_point)
      c.expect(w16 < w8, probe.name + " should strictly improve at w=16");

    // halving every tile size must cost more
    auto half = sizes;
    for (auto &s : half) s /= 2;
    DriverOptions of, oh;
    of.sizes = sizes;
    oh.sizes = half;
    EmitConfig cfg;
    long long cf = cost_model(compile_path(path, of).tp, cfg, {}).total_cycles;
    long long ch = cost_model(compile_path(path, oh).tp, cfg, {}).total_cycles;
    c.expect(ch > cf, probe.name + " halved tiles should cost more");
  }
  CHECK(c.ok);
}

TEST_CASE("criterion 8: padding is a performance transform") {
  Criterion c{8, "without padding the innermost loop keeps a min bound and stays correct"};
  DriverOptions padded, plain;
  padded.sizes = plain.sizes = {32, 32, 32};
  plain.pad_innermost = false;
  Compiled cp = compile_path(sft::fixture("running_example.stencil"), padded);
  Compiled cu = compile_path(sft::fixture("running_example.stencil"), plain);
  EmitConfig cfg;
  std::string tp = emit_hls(cp.tp, cfg), tu = emit_hls(cu.tp, cfg);
  c.expect(tp != tu, "emitted text differs");
  c.expect(tp.find("for (long k = 0; k <= 31;") != std::string::npos,
           "padded loop has a constant bound");
  c.expect(tu.find("for (long k = 0; k <= SF_MIN(31, N - tk - 2);") !=
               std::string::npos,
           "unpadded loop carries a min bound");

  DriverOptions mini = plain;
  mini.sizes = {4, 4, 4};
  mini.params = {{"N", 13}};
  CellResult r = run_differential(
      compile_path(sft::fixture("running_example.stencil"), mini), 21);
  c.expect(r.equal, "unpadded program still bit-equal");
  CHECK(c.ok);
}

TEST_CASE("criterion 9: legality gates") {
  Criterion c{9, "seidel has no legal tiling; 2*j doubles the buffer extent"};
  Scop seidel = extract_scop(parse_file(sft::fixture("seidel1d.stencil")));
  c.expect(legal_permutations(seidel, {4}).empty(), "seidel NoLegalTiling");
  bool threw = false;
  try {
    select_permutation(seidel, {4});
  } catch (const Error &e) {
    threw = e.code == ErrCode::NoLegalTiling;
  }
  c.expect(threw, "select_permutation raises NoLegalTiling");

  Scop strided = extract_scop(parse_file(sft::fixture("strided2x.stencil")));
  PermutationChoice choice = select_permutation(strided, {4, 4});
  const BufferPlan &b = plan_for(choice.plans, "B");
  c.expect(b.extents.size() == 2 && b.extents[1] == 8,
           "B extent doubles to 8 slots");
  const BufferPlan &a = plan_for(choice.plans, "A");
  c.expect(a.extents.size() == 2 && a.extents[1] == 4, "A extent stays 4");
  c.expect(b.extents[1] == 2 * a.extents[1], "exact factor 2");
  CHECK(c.ok);
}
