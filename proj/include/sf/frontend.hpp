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

#include "sf/scop.hpp"

namespace sf {

struct LoopHeader {
  std::string var;
  AffineExpr lo, hi; // inclusive bounds, affine in parameters
  long long step = 1;
};

/// Parsed stencil: one perfectly nested canonical loop nest of depth 1..3
/// over declared rectangular arrays. Scalar temporaries are inlined during
/// parsing, so statements are pure array assignments.
struct StencilProgram {
  std::string name;
  std::vector<Param> params;
  std::vector<std::pair<std::string, ArrayInfo>> arrays;
  std::vector<LoopHeader> loops; // outermost first
  std::vector<Statement> statements;
};

/// Parses DSL text. Throws ParseError / NonAffine / NonCanonicalNest with
/// line:col positions and the violated applicability condition.
StencilProgram parse(const std::string &src, const std::string &name = "stencil");
StencilProgram parse_file(const std::string &path);

/// Canonical re-rendering; parse(pretty(p)) reproduces p.
std::string pretty(const StencilProgram &p);

/// Domain + identity schedule + access relations + body trees.
Scop extract_scop(const StencilProgram &p);

} // namespace sf
