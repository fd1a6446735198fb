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
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "sf/driver.hpp"
#include "sf/verify.hpp"

namespace fs = std::filesystem;
using namespace sf;

namespace {

struct CommonArgs {
  std::string input;
  std::vector<long long> sz;
  int width = 1;
  std::string perm_csv;
  std::string out_dir = ".";
  uint64_t seed = 42;
  std::vector<std::string> param_kv;
  bool no_guards = false;   // test hook
  bool no_padding = false;  // test hook
};

void add_common(CLI::App *cmd, CommonArgs &a, bool needs_input = true) {
  auto *in = cmd->add_option("--input,-i", a.input, "stencil DSL file");
  if (needs_input) in->required();
  cmd->add_option("--sz", a.sz, "tile sizes, one per loop")->delimiter(',');
  cmd->add_option("--port-width,-w", a.width, "burst port width w")
      ->check(CLI::IsMember({1, 2, 4, 8, 16}));
  cmd->add_option("--perm", a.perm_csv, "intra-tile loop order, e.g. i,k,j");
  cmd->add_option("--out,-o", a.out_dir, "output directory");
  cmd->add_option("--seed", a.seed, "rng seed for verification inputs");
  cmd->add_option("--param,-p", a.param_kv, "parameter binding NAME=VALUE");
  cmd->add_flag("--test-no-guards", a.no_guards, "")->group("");
  cmd->add_flag("--test-no-padding", a.no_padding, "")->group("");
}

DriverOptions to_opts(const CommonArgs &a, const Scop *scop) {
  DriverOptions o;
  o.sizes = a.sz;
  o.width = a.width;
  o.seed = a.seed;
  o.pad_innermost = !a.no_padding;
  o.guards = !a.no_guards;
  for (auto &kv : a.param_kv) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--param expects NAME=VALUE");
    o.params[kv.substr(0, eq)] = std::stoll(kv.substr(eq + 1));
  }
  if (!a.perm_csv.empty()) {
    if (!scop) throw CLI::ValidationError("--perm needs a parsed input");
    std::string tok;
    std::stringstream ss(a.perm_csv);
    while (std::getline(ss, tok, ',')) {
      auto it = std::find(scop->iter_vars.begin(), scop->iter_vars.end(), tok);
      if (it == scop->iter_vars.end())
        throw CLI::ValidationError("unknown loop variable in --perm: " + tok);
      o.perm.push_back(int(it - scop->iter_vars.begin()));
    }
  }
  return o;
}

std::string perm_str(const Scop &s, const std::vector<int> &p) {
  std::string r = "(";
  for (size_t i = 0; i < p.size(); ++i)
    r += (i ? "," : "") + s.iter_vars[size_t(p[i])];
  return r + ")";
}

int cmd_analyze(const CommonArgs &a, bool as_json) {
  StencilProgram prog = parse_file(a.input);
  Scop scop = extract_scop(prog);
  DriverOptions opts = to_opts(a, &scop);
  auto sizes = opts.sizes.empty() ? default_sizes(scop.depth()) : opts.sizes;
  auto all = evaluate_permutations(scop, sizes);
  if (all.empty()) {
    nlohmann::json err = {{"error", "NoLegalTiling"},
                          {"stencil", scop.name},
                          {"detail", "data dependences prevent loop tiling"}};
    if (as_json)
      std::cout << err.dump(2) << "\n";
    else
      std::cerr << "NoLegalTiling: data dependences prevent loop tiling for "
                << scop.name << "\n";
    return 2;
  }
  auto chosen = select_permutation(scop, sizes);
  nlohmann::json rep = plan_report(scop, sizes, all, chosen);
  if (as_json) {
    std::cout << rep.dump(2) << "\n";
    return 0;
  }
  std::cout << "stencil " << scop.name << ", tile sizes (";
  for (size_t i = 0; i < sizes.size(); ++i) std::cout << (i ? "," : "") << sizes[i];
  std::cout << ")\n";
  for (auto &cand : all) {
    std::cout << "  p=" << perm_str(scop, cand.perm) << "  total cost "
              << cand.total_cost << "\n";
    for (auto &p : cand.plans) {
      std::cout << "    " << p.array << ": " << kind_name(p.kind);
      if (p.cached()) {
        std::cout << " [";
        for (size_t m = 0; m < p.extents.size(); ++m)
          std::cout << (m ? "," : "") << p.extents[m];
        std::cout << "] cost " << p.cost;
      }
      std::cout << "\n";
    }
  }
  std::cout << "chosen: p=" << perm_str(scop, chosen.perm) << " total cost "
            << chosen.total_cost << "\n";
  return 0;
}

int cmd_emit(const CommonArgs &a, const std::string &dialect) {
  StencilProgram prog = parse_file(a.input);
  Scop scop = extract_scop(prog);
  DriverOptions opts = to_opts(a, &scop);
  Compiled c = compile_path(a.input, opts);
  EmitConfig ecfg;
  ecfg.width = a.width;
  ecfg.dialect = dialect;
  fs::create_directories(a.out_dir);
  fs::path base = fs::path(a.out_dir) / c.scop.name;
  {
    std::ofstream f(base.string() + ".c");
    f << emit_hls(c.tp, ecfg);
  }
  {
    PermutationChoice chosen = c.chosen;
    chosen.plans = c.plans; // halo-adjusted
    std::ofstream f(base.string() + ".plan.json");
    f << plan_report(c.scop, c.sizes, c.candidates, chosen).dump(2) << "\n";
  }
  {
    std::ofstream f(base.string() + ".ir.json");
    f << tile_program_json(c.tp).dump(2) << "\n";
  }
  {
    CostReport cost = cost_model(c.tp, ecfg, c.params);
    std::ofstream f(base.string() + ".cost.json");
    f << cost.to_json(c.tp, ecfg).dump(2) << "\n";
  }
  std::cout << "wrote " << base.string() << ".{c,plan.json,ir.json,cost.json}\n";
  return 0;
}

int cmd_verify(const CommonArgs &a, const std::vector<std::string> &extra) {
  std::vector<std::string> paths;
  if (!a.input.empty()) paths.push_back(a.input);
  paths.insert(paths.end(), extra.begin(), extra.end());
  MatrixOptions mo;
  mo.seed = a.seed;
  mo.guards = !a.no_guards;
  mo.pad_innermost = !a.no_padding;
  if (a.width != 1) mo.widths = {1, a.width};
  MatrixReport rep = run_matrix(paths, mo);
  long long pass = 0;
  for (auto &cell : rep.cells) {
    if (cell.equal && cell.bursts_ok) {
      ++pass;
      continue;
    }
    std::cout << "FAIL " << cell.bench << " sz=" << cell.size_base
              << " rem=" << cell.remainder << " w=" << cell.width << " perm=";
    for (int x : cell.perm) std::cout << x;
    std::cout << " : " << cell.note << "\n";
  }
  std::cout << pass << "/" << rep.cells.size()
            << " cells bit-equal (wide transfers: " << rep.total_wide << ")\n";
  return rep.all_equal && rep.all_bursts_ok ? 0 : 1;
}

int cmd_report(const CommonArgs &a) {
  StencilProgram prog = parse_file(a.input);
  Scop scop = extract_scop(prog);
  DriverOptions base = to_opts(a, &scop);
  std::vector<long long> sizes =
      base.sizes.empty() ? default_sizes(scop.depth()) : base.sizes;
  nlohmann::json out;
  out["stencil"] = scop.name;
  out["note"] = "modeled cycles for ordering comparisons only";
  out["configs"] = nlohmann::json::array();
  for (int halve = 0; halve < 2; ++halve) {
    std::vector<long long> sz = sizes;
    if (halve)
      for (auto &s : sz) s = std::max<long long>(1, s / 2);
    for (int w : {1, 8, 16}) {
      DriverOptions o = base;
      o.sizes = sz;
      o.width = w;
      Compiled c = compile_path(a.input, o);
      EmitConfig ecfg;
      ecfg.width = w;
      CostReport cost = cost_model(c.tp, ecfg, c.params);
      nlohmann::json cfg;
      cfg["tile_sizes"] = sz;
      cfg["port_width"] = w;
      cfg["total_cycles"] = cost.total_cycles;
      cfg["ship_cycles"] = cost.ship_cycles;
      cfg["compute_cycles"] = cost.compute_cycles;
      out["configs"].push_back(cfg);
    }
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"stencil-forge: stencil loop-nest tiling and buffer compiler"};
  app.require_subcommand(1);

  CommonArgs analyze_args, emit_args, verify_args, report_args;
  bool analyze_json = false;
  std::string dialect = "generic";
  std::vector<std::string> verify_extra;

  auto *analyze = app.add_subcommand("analyze", "permutation/cost table");
  add_common(analyze, analyze_args);
  analyze->add_flag("--json", analyze_json, "machine-readable report");

  auto *emit = app.add_subcommand("emit", "generate HLS C and reports");
  add_common(emit, emit_args);
  emit->add_option("--dialect", dialect, "pragma dialect: generic|vitis")
      ->check(CLI::IsMember({"generic", "vitis"}));

  auto *verify = app.add_subcommand("verify", "differential correctness matrix");
  add_common(verify, verify_args);
  verify->add_option("inputs", verify_extra, "additional stencil files");

  auto *report = app.add_subcommand("report", "modeled cost across w and SZ");
  add_common(report, report_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return cmd_analyze(analyze_args, analyze_json);
    if (emit->parsed()) return cmd_emit(emit_args, dialect);
    if (verify->parsed()) return cmd_verify(verify_args, verify_extra);
    if (report->parsed()) return cmd_report(report_args);
  } catch (const Error &e) {
    std::cerr << e.what() << "\n";
    return e.code == ErrCode::NoLegalTiling ? 2 : 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
