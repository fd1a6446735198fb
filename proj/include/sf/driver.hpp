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

#include "sf/emit.hpp"
#include "sf/frontend.hpp"
#include "sf/vm.hpp"

namespace sf {

struct DriverOptions {
  std::vector<long long> sizes; // empty = depth default
  std::vector<int> perm;        // empty = cost-based selection
  int width = 1;
  Binding params;               // overrides DSL defaults
  bool pad_innermost = true;    // test hook
  bool guards = true;           // test hook
  uint64_t seed = 42;
};

struct Compiled {
  StencilProgram program;
  Scop scop;
  std::vector<long long> sizes;
  Binding params; // overrides applied on top of DSL defaults
  std::vector<PermutationChoice> candidates;
  PermutationChoice chosen;
  TiledScop tiled;
  std::vector<BufferPlan> plans; // halo-adjusted
  TileProgram tp;
};

/// (64) / (16,16) / (8,8,8) for depth 1/2/3.
std::vector<long long> default_sizes(size_t depth);

Compiled compile_text(const std::string &src, const std::string &name,
                      const DriverOptions &opts);
Compiled compile_path(const std::string &path, const DriverOptions &opts);

/// One differential cell: bit-compares transformed against original.
struct CellResult {
  bool equal = false;
  std::string note;
  BurstReport bursts;
  long long guard_suppressed = 0;
  Machine original, transformed;
};

CellResult run_differential(const Compiled &c, uint64_t seed);

} // namespace sf
