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

#include <cstdint>

#include "sf/shipgen.hpp"

namespace sf {

/// One recorded transfer. Wide records are w-element port transactions and
/// must obey the alignment rules; scalar records are single-element traffic;
/// local records are buffer-to-buffer shifts.
struct TraceRec {
  enum class Kind { Wide, Scalar, Local, Mark } kind = Kind::Scalar;
  ShipOp::Role role = ShipOp::Role::Fill;
  int ship_id = -1;
  int plan_index = -1;
  std::string array; // DDR array (loop variable name for marks)
  long long offset = 0;
  long long len = 0;
  int width = 1;
};

struct MachineArray {
  std::vector<double> data;     // logical extent plus slack
  std::vector<long long> shape; // logical extents
  long long logical = 0;        // logical flat size
};

/// Interpreter state: DDR arrays (with slack for padded-tile overreads) and
/// sentinel-initialized buffers. float64 throughout.
struct Machine {
  std::map<std::string, MachineArray> ddr;
  std::map<std::string, std::vector<double>> buffers;
  std::vector<TraceRec> trace;
  long long guard_suppressed = 0;
  long long padded_points_executed = 0;

  static double sentinel();
  static bool is_sentinel(double v);
};

/// Seeds every array of the scop deterministically. When `tp` is given, the
/// arrays get enough slack for the padded tiles' overreads and the buffers
/// are allocated sentinel-initialized.
Machine make_machine(const Scop &s, const Binding &binding, uint64_t seed,
                     const TileProgram *tp = nullptr);

/// Executes the untransformed scop in schedule order (IEEE-754 doubles,
/// division by zero propagates).
void run_original(const Scop &s, const Binding &binding, Machine &m);

/// Executes the tile program: inter-tile loops, ships, guarded body,
/// flush trimming. Throws SentinelLeak / OutOfFootprint on violations.
void run_transformed(const TileProgram &tp, const Binding &binding, Machine &m);

struct BurstReport {
  long long wide_count = 0;
  long long scalar_count = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Asserts offset and length divisibility for every DDR-touching wide
/// transfer; buffer-to-buffer shifts are exempt.
BurstReport check_bursts(const std::vector<TraceRec> &trace, int w);

/// Line-oriented dump: `OP kind offset length` per transfer.
std::string trace_dump(const std::vector<TraceRec> &trace);

/// Bitwise comparison of all DDR arrays (logical region only).
bool arrays_bit_equal(const Machine &a, const Machine &b,
                      std::string *first_diff = nullptr);

} // namespace sf
