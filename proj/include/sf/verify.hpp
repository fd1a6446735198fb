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
#pragma once

#include "sf/driver.hpp"

namespace sf {

struct MatrixOptions {
  std::vector<long long> size_bases = {4, 8}; // per-dimension tile size
  std::vector<long long> remainders = {0, 3}; // domain = 2*SZ + r per dim
  std::vector<int> widths = {1, 4};
  uint64_t seed = 42;
  bool guards = true;        // test hook
  bool pad_innermost = true; // test hook
};

struct MatrixCell {
  std::string bench;
  std::vector<int> perm;
  long long size_base = 0;
  long long remainder = 0;
  int width = 1;
  Binding params;
  bool equal = false;
  bool bursts_ok = false;
  long long wide_count = 0;
  std::string note;
};

struct MatrixReport {
  std::vector<MatrixCell> cells;
  bool all_equal = true;
  bool all_bursts_ok = true;
  long long total_wide = 0;
};

/// Solves the parameter value that makes every loop of the program span
/// exactly `points` iterations plus its lower bound (single size parameter,
/// unit coefficient).
Binding solve_params_for_span(const Scop &s, long long points);

/// Differential matrix: every legal permutation x tile-size base x
/// divisible/remainder domain x port width. Bitwise comparison per cell.
MatrixReport run_matrix(const std::vector<std::string> &paths,
                        const MatrixOptions &opts);

} // namespace sf
