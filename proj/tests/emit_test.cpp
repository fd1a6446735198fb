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
#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "sf/emit.hpp"
#include "sf/vm.hpp"

using namespace sf;

namespace {

std::string golden_path(const std::string &key) {
  return std::string(SF_SOURCE_DIR) + "/tests/golden/" + key;
}

void check_golden(const std::string &key, const std::string &text) {
  std::string path = golden_path(key);
  if (std::getenv("SF_GOLDEN_UPDATE")) {
    std::ofstream out(path);
    out << text;
    return;
  }
  std::ifstream in(path);
  std::string missing =
      "missing golden file " + path + " (regenerate with SF_GOLDEN_UPDATE=1)";
  REQUIRE_MESSAGE(in.good(), missing);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string mismatch = "golden mismatch for " + key;
  CHECK_MESSAGE(ss.str() == text, mismatch);
}

Compiled compile_fixture(const std::string &file, std::vector<long long> sz,
                         int w, Binding params = {}, bool pad = true) {
  DriverOptions o;
  o.sizes = std::move(sz);
  o.width = w;
  o.params = std::move(params);
  o.pad_innermost = pad;
  return compile_path(sft::fixture(file), o);
}

bool braces_balanced(const std::string &text) {
  long depth = 0;
  for (char c : text) {
    if (c == '{') ++depth;
    if (c == '}') --depth;
    if (depth < 0) return false;
  }
  return depth == 0;
}

bool cc_accepts(const std::string &text) {
  std::string dir = std::string(SF_BINARY_DIR) + "/emit_smoke";
  if (std::system(("mkdir -p " + dir).c_str()) != 0) return false;
  std::string path = dir + "/smoke.c";
  {
    std::ofstream out(path);
    out << text;
  }
  std::string cmd = "cc -fsyntax-only -Wno-unknown-pragmas " + path + " 2>" +
                    dir + "/cc.log";
  return std::system(cmd.c_str()) == 0;
}

} // namespace

TEST_CASE("golden: running example at paper tile sizes, w=1") {
  Compiled c = compile_fixture("running_example.stencil", {32, 32, 32}, 1);
  EmitConfig cfg;
  cfg.width = 1;
  std::string text = emit_hls(c.tp, cfg);
  check_golden("running_example_sz32_w1.c", text);
  CHECK(braces_balanced(text));
  CHECK(cc_accepts(text));
  // byte-identical on re-emission
  CHECK(emit_hls(c.tp, cfg) == text);
}

TEST_CASE("golden: running example with a w=4 halo") {
  Compiled c = compile_fixture("running_example.stencil", {32, 32, 32}, 4);
  EmitConfig cfg;
  cfg.width = 4;
  std::string text = emit_hls(c.tp, cfg);
  check_golden("running_example_sz32_w4.c", text);
  CHECK(text.find("float A_buf[2][33][36];") != std::string::npos);
  CHECK(cc_accepts(text));
}

TEST_CASE("golden: 2d-5p with a chunk and a line buffer, w=8") {
  Compiled c = compile_fixture("2d-5p.stencil", {128, 128}, 8);
  EmitConfig cfg;
  cfg.width = 8;
  std::string text = emit_hls(c.tp, cfg);
  check_golden("2d_5p_sz128_w8.c", text);
  CHECK(cc_accepts(text));
}

TEST_CASE("golden: 1d-jacobi with genuine wide bursts") {
  Compiled c = compile_fixture("1d-jacobi.stencil", {64}, 4);
  EmitConfig cfg;
  cfg.width = 4;
  std::string text = emit_hls(c.tp, cfg);
  check_golden("1d_jacobi_sz64_w4.c", text);
  CHECK(text.find(", 4);") != std::string::npos); // at least one wide burstcpy
  CHECK(cc_accepts(text));
}

TEST_CASE("emitted pragmas follow the buffer plan") {
  Compiled c = compile_fixture("running_example.stencil", {32, 32, 32}, 1);
  std::string text = emit_hls(c.tp, {});
  CHECK(text.find("#pragma HLS ARRAY_PARTITION variable=V_buf complete") !=
        std::string::npos);
  CHECK(text.find("#pragma HLS ARRAY_PARTITION variable=A_buf complete") !=
        std::string::npos);
  CHECK(text.find("#pragma HLS PIPELINE") != std::string::npos);
  CHECK(text.find("/* padded loop */") != std::string::npos);
  // pipeline sits on the second-innermost intra loop (the j loop)
  size_t jloop = text.find("for (long j = 0;");
  size_t pipeline = text.find("#pragma HLS PIPELINE");
  size_t kloop = text.find("for (long k = 0;");
  REQUIRE(jloop != std::string::npos);
  CHECK(jloop < pipeline);
  CHECK(pipeline < kloop);
}

TEST_CASE("vitis dialect adds interface pragmas") {
  Compiled c = compile_fixture("running_example.stencil", {32, 32, 32}, 4);
  EmitConfig cfg;
  cfg.width = 4;
  cfg.dialect = "vitis";
  std::string text = emit_hls(c.tp, cfg);
  CHECK(text.find("#pragma HLS INTERFACE m_axi port=V") != std::string::npos);
  CHECK(cc_accepts(text));
}

TEST_CASE("nc-only programs declare no buffers and guard the body") {
  Compiled c = compile_fixture("nc1d.stencil", {8}, 1, {{"N", 19}});
  std::string text = emit_hls(c.tp, {});
  CHECK(text.find("_buf") == std::string::npos);
  CHECK(text.find("if (i + ti <=") != std::string::npos);
  CHECK(cc_accepts(text));
}

TEST_CASE("padding hook: the innermost loop regains its min bound") {
  Compiled padded = compile_fixture("running_example.stencil", {32, 32, 32}, 1);
  Compiled unpadded =
      compile_fixture("running_example.stencil", {32, 32, 32}, 1, {}, false);
  std::string a = emit_hls(padded.tp, {});
  std::string b = emit_hls(unpadded.tp, {});
  CHECK(a != b);
  CHECK(a.find("for (long k = 0; k <= 31; k += 1) { /* padded loop */") !=
        std::string::npos);
  CHECK(b.find("for (long k = 0; k <= SF_MIN(31, N - tk - 2); k += 1) {") !=
        std::string::npos);
  // padding is a performance transform: the vm stays correct without it
  CellResult r = run_differential(unpadded, 4);
  CHECK(r.equal);
}

TEST_CASE("cost model applies the burst formula") {
  // interior flushes of the running example write 32-element rows:
  // one burst costs C_setup + ceil(32 / w)
  Compiled c = compile_fixture("running_example.stencil", {4, 4, 4}, 1,
                               {{"N", 10}});
  EmitConfig cfg;
  CostReport rep = cost_model(c.tp, cfg, c.params);
  const ShipCost *flush = nullptr;
  for (auto &[id, sc] : rep.per_ship)
    if (sc.role == "flush") flush = &sc;
  REQUIRE(flush != nullptr);
  // divisible N=10: all 8 tiles flush 4x4 rows of 4 elements
  CHECK(flush->bursts == 8 * 16);
  CHECK(flush->elements == 8 * 64);
  CHECK(flush->cycles == flush->bursts * (16 + 4));
}

TEST_CASE("a single 32-element burst at w=1 models 48 cycles") {
  const char *src = R"(
param N = 32
array A float[N]
array B float[N]
loop i = 0 .. N-1 step 1 { A[i] = 2.0 * B[i]; }
)";
  DriverOptions o;
  o.sizes = {32};
  Compiled c = compile_text(src, "one_tile", o);
  CostReport rep = cost_model(c.tp, {}, {});
  for (auto &[id, sc] : rep.per_ship) {
    CHECK(sc.bursts == 1);
    CHECK(sc.elements == 32);
    CHECK(sc.cycles == 48);
  }
}

TEST_CASE("modeled totals fall as the port widens") {
  // paper-scale tiles: the port width always divides the tile step
  auto paper_sizes = [](size_t d) -> std::vector<long long> {
    return d == 1 ? std::vector<long long>{1024}
           : d == 2 ? std::vector<long long>{128, 128}
                    : std::vector<long long>{32, 32, 32};
  };
  for (const char *fx : {"1d-jacobi.stencil", "2d-5p.stencil", "3d-heat.stencil"}) {
    long long prev = -1;
    for (int w : {1, 8, 16}) {
      Scop probe = extract_scop(parse_file(sft::fixture(fx)));
      Compiled c = compile_fixture(fx, paper_sizes(probe.depth()), w);
      EmitConfig cfg;
      cfg.width = w;
      CostReport rep = cost_model(c.tp, cfg, c.params);
      if (prev >= 0) CHECK(rep.total_cycles <= prev);
      prev = rep.total_cycles;
    }
  }
}

TEST_CASE("modeled element counts equal the measured trace exactly") {
  Compiled c = compile_fixture("running_example.stencil", {4, 4, 4}, 1,
                               {{"N", 13}});
  EmitConfig cfg;
  CostReport rep = cost_model(c.tp, cfg, c.params);
  CellResult r = run_differential(c, 9);
  REQUIRE(r.equal);
  std::map<std::string, CostReport::PlanTotals> measured;
  for (auto &rec : r.transformed.trace) {
    if (rec.kind == TraceRec::Kind::Mark) continue;
    const BufferPlan &p = c.tp.plans[size_t(rec.plan_index)];
    auto &t = measured[p.buffer_name];
    if (rec.kind == TraceRec::Kind::Local)
      t.shift_elements += rec.len;
    else if (rec.role == ShipOp::Role::Flush)
      t.flush_elements += rec.len;
    else
      t.fill_elements += rec.len;
  }
  for (auto &[name, want] : rep.per_buffer) {
    CHECK(measured[name].fill_elements == want.fill_elements);
    CHECK(measured[name].flush_elements == want.flush_elements);
    CHECK(measured[name].shift_elements == want.shift_elements);
  }
}

TEST_CASE("halving the tile sizes raises the modeled total") {
  for (const char *fx : {"2d-5p.stencil", "3d-27p.stencil"}) {
    Scop probe = extract_scop(parse_file(sft::fixture(fx)));
    auto full = default_sizes(probe.depth());
    auto half = full;
    for (auto &s : half) s /= 2;
    EmitConfig cfg;
    Compiled cf = compile_fixture(fx, full, 1);
    Compiled ch = compile_fixture(fx, half, 1);
    CHECK(cost_model(ch.tp, cfg, ch.params).total_cycles >
          cost_model(cf.tp, cfg, cf.params).total_cycles);
  }
}

TEST_CASE("plan and cost reports serialize") {
  Compiled c = compile_fixture("running_example.stencil", {4, 4, 4}, 4,
                               {{"N", 13}});
  EmitConfig cfg;
  cfg.width = 4;
  CostReport rep = cost_model(c.tp, cfg, c.params);
  nlohmann::json j = rep.to_json(c.tp, cfg);
  CHECK(j["total_cycles"].get<long long>() ==
        j["ship_cycles"].get<long long>() + j["compute_cycles"].get<long long>());
  CHECK(j["per_ship"].size() > 0);
}
