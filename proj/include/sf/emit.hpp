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

#include "sf/shipgen.hpp"

namespace sf {

struct EmitConfig {
  int width = 1;            // port width w in {1,2,4,8,16}
  int frequency_mhz = 50;   // informational only
  std::string dialect = "generic"; // "generic" | "vitis"
  long long c_setup = 16;   // modeled fixed cost per burst
  long long c_pipe = 8;     // modeled pipeline fill cost
  long long ii = 1;         // modeled initiation interval
};

/// Renders the tile program as HLS-C text: buffer declarations inside the
/// inter-tile nest, ARRAY_PARTITION per buffer, PIPELINE on the
/// second-innermost intra loop, ships expanded to burstcpy loop nests.
/// Byte-stable for fixed input and config.
std::string emit_hls(const TileProgram &tp, const EmitConfig &cfg);

struct ShipCost {
  long long bursts = 0;
  long long elements = 0;
  long long cycles = 0;
  std::string role;
  std::string buffer;
};

/// Analytical model for ordering comparisons only; not hardware truth.
/// Ship: cycles = bursts * (C_setup + ceil(len / w)); compute: every entry
/// into the innermost (unrolled) loop costs C_pipe + trip * II.
struct CostReport {
  long long ship_cycles = 0;
  long long compute_cycles = 0;
  long long total_cycles = 0;
  long long pipeline_starts = 0;
  std::map<int, ShipCost> per_ship;
  struct PlanTotals {
    long long fill_elements = 0, flush_elements = 0, shift_elements = 0;
  };
  std::map<std::string, PlanTotals> per_buffer;
  nlohmann::json to_json(const TileProgram &tp, const EmitConfig &cfg) const;
};

CostReport cost_model(const TileProgram &tp, const EmitConfig &cfg,
                      const Binding &binding);

} // namespace sf
