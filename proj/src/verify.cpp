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
#include "sf/verify.hpp"

namespace sf {

Binding solve_params_for_span(const Scop &s, long long points) {
  Binding b;
  const BoxDim &d0 = s.domain.dims.front();
  AffineExpr count = d0.hi - d0.lo + 1;
  if (count.param_coeffs.size() != 1 || !count.coeffs.empty())
    fail(ErrCode::Internal,
         "cannot solve domain span for " + s.name + " (" + count.str() + ")");
  auto [pname, c] = *count.param_coeffs.begin();
  long long v = (points - count.constant) / c;
  if (v < 1) v = 1;
  b[pname] = v;
  for (auto &p : s.params)
    if (!b.count(p.name)) {
      if (p.value)
        b[p.name] = *p.value;
      else
        fail(ErrCode::UnboundParameter, "parameter " + p.name);
    }
  return b;
}

MatrixReport run_matrix(const std::vector<std::string> &paths,
                        const MatrixOptions &opts) {
  MatrixReport rep;
  for (auto &path : paths) {
    StencilProgram prog = parse_file(path);
    Scop scop = extract_scop(prog);
    size_t d = scop.depth();
    auto perms = legal_permutations(scop, std::vector<long long>(d, 4));
    if (perms.empty()) {
      MatrixCell cell;
      cell.bench = scop.name;
      cell.note = "NoLegalTiling";
      cell.equal = false;
      rep.cells.push_back(cell);
      rep.all_equal = false;
      continue;
    }
    for (long long base : opts.size_bases) {
      std::vector<long long> sizes(d, base);
      for (long long r : opts.remainders) {
        Binding params = solve_params_for_span(scop, 2 * base + r);
        for (auto &perm : perms) {
          for (int w : opts.widths) {
            MatrixCell cell;
            cell.bench = scop.name;
            cell.perm = perm;
            cell.size_base = base;
            cell.remainder = r;
            cell.width = w;
            cell.params = params;
            try {
              DriverOptions dopts;
              dopts.sizes = sizes;
              dopts.perm = perm;
              dopts.width = w;
              dopts.params = params;
              dopts.seed = opts.seed;
              dopts.guards = opts.guards;
              dopts.pad_innermost = opts.pad_innermost;
              Compiled c = compile_path(path, dopts);
              CellResult res = run_differential(c, opts.seed);
              cell.equal = res.equal;
              cell.bursts_ok = res.bursts.ok();
              cell.wide_count = res.bursts.wide_count;
              if (!res.equal) cell.note = res.note;
              if (!res.bursts.ok())
                cell.note += (cell.note.empty() ? "" : "; ") +
                             res.bursts.violations.front();
            } catch (const Error &e) {
              cell.equal = false;
              cell.bursts_ok = false;
              cell.note = e.what();
            }
            rep.all_equal &= cell.equal;
            rep.all_bursts_ok &= cell.bursts_ok;
            rep.total_wide += cell.wide_count;
            rep.cells.push_back(std::move(cell));
          }
        }
      }
    }
  }
  return rep;
}

} // namespace sf
