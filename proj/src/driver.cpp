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
#include "sf/driver.hpp"

namespace sf {

std::vector<long long> default_sizes(size_t depth) {
  switch (depth) {
  case 1: return {64};
  case 2: return {16, 16};
  default: return {8, 8, 8};
  }
}

static Compiled compile_program(StencilProgram prog, const DriverOptions &opts) {
  Compiled c;
  c.program = std::move(prog);
  c.scop = extract_scop(c.program);
  c.params = opts.params;
  c.sizes = opts.sizes.empty() ? default_sizes(c.scop.depth()) : opts.sizes;
  if (c.sizes.size() != c.scop.depth())
    fail(ErrCode::Internal, "tile size vector does not match loop depth");
  c.candidates = evaluate_permutations(c.scop, c.sizes);
  if (c.candidates.empty())
    fail(ErrCode::NoLegalTiling,
         "data dependences prevent loop tiling for " + c.scop.name);
  if (opts.perm.empty()) {
    c.chosen = select_permutation(c.scop, c.sizes);
  } else {
    bool found = false;
    for (auto &cand : c.candidates)
      if (cand.perm == opts.perm) {
        c.chosen = cand;
        found = true;
      }
    if (!found)
      fail(ErrCode::NoLegalTiling, "requested permutation is not legal");
  }
  c.tiled = apply_standard_tiling(c.scop, c.sizes, c.chosen.perm,
                                  opts.pad_innermost);
  c.plans = c.chosen.plans;
  if (opts.width > 1) {
    Binding b = c.scop.bind_params(opts.params);
    for (auto &p : c.plans)
      if (p.cached()) p = add_halo(p, opts.width, c.tiled, b);
  }
  ShipConfig scfg;
  scfg.width = opts.width;
  scfg.binding = opts.params;
  scfg.pad_innermost = opts.pad_innermost;
  scfg.guards = opts.guards;
  c.tp = plan_ships(c.tiled, c.plans, scfg);
  if (!opts.guards)
    for (auto &st : c.tp.stmts) st.guarded = false;
  return c;
}

Compiled compile_text(const std::string &src, const std::string &name,
                      const DriverOptions &opts) {
  return compile_program(parse(src, name), opts);
}

Compiled compile_path(const std::string &path, const DriverOptions &opts) {
  return compile_program(parse_file(path), opts);
}

CellResult run_differential(const Compiled &c, uint64_t seed) {
  CellResult r;
  r.original = make_machine(c.scop, c.params, seed);
  r.transformed = make_machine(c.scop, c.params, seed, &c.tp);
  run_original(c.scop, c.params, r.original);
  run_transformed(c.tp, c.params, r.transformed);
  r.guard_suppressed = r.transformed.guard_suppressed;
  r.bursts = check_bursts(r.transformed.trace, c.tp.width);
  r.equal = arrays_bit_equal(r.original, r.transformed, &r.note);
  return r;
}

} // namespace sf
