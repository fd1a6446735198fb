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

#include <string>
#include <vector>

#include "sf/driver.hpp"

namespace sft {

inline std::string fixture(const std::string &name) {
  return std::string(SF_SOURCE_DIR) + "/benchmarks/" + name;
}

inline std::vector<std::string> benchmark_paths() {
  std::vector<std::string> names = {
      "1d-jacobi.stencil", "2d-5p.stencil",    "2d-9p.stencil",
      "2d-jacobi.stencil", "2d-fdtd0.stencil", "2d-fdtd1.stencil",
      "2d-fdtd2.stencil",  "3d-19p.stencil",   "3d-27p.stencil",
      "3d-heat.stencil"};
  std::vector<std::string> out;
  for (auto &n : names) out.push_back(fixture(n));
  return out;
}

inline const char *kRunningExampleSrc = R"(
param N = 34
array V float[N][N][N]
array A float[N][N][N]
loop i = 1 .. N-2 step 1 {
  loop j = 1 .. N-2 step 1 {
    loop k = 1 .. N-2 step 1 {
      V[i,k,j] = V[i,k,j] + A[i,j,k] + A[i+1,j+1,k+1];
    }
  }
}
)";

} // namespace sft
