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

#include "sf/planner.hpp"

namespace sf {

struct ShipTarget {
  bool is_buffer = false;
  std::string name;
  bool operator==(const ShipTarget &o) const = default;
};

/// One structured copy. Segments span the innermost `di` dimensions of both
/// sides; repetition r advances the next dimension up by r on both sides.
/// Extents follow the destination; flush extents carry min-trims.
struct ShipOp {
  enum class Role { Fill, Shift, Flush };
  Role role = Role::Fill;
  ShipTarget src, dst;
  std::vector<AffineExpr> src_off, dst_off;
  int di = 1;
  long long reps = 1;
  std::vector<MinExpr> seg_extents; // di entries, outermost segment dim first
  int width = 1;
  bool edged = false; // innermost run lowers to scalar-head/burst/scalar-tail
  int plan_index = -1;
  int id = 0;
  std::string note;
};

/// Loop-tree node of the generated tile program.
struct Node {
  enum class Kind { Loop, Ship, Stmt } kind = Kind::Loop;
  // Loop
  std::string var;
  AffineExpr lo;
  MinExpr hi{{AffineExpr{}}};
  long long step = 1;
  bool padded = false;    // constant trip count via padding
  bool pipeline = false;  // carries the PIPELINE pragma
  bool intertile = false;
  std::vector<Node> body;
  // Ship
  ShipOp ship;
  // Stmt
  int stmt_index = -1;
};

/// A body statement with redirected accesses.
struct TileStmt {
  struct TargetedAccess {
    ShipTarget target;
    std::vector<AffineExpr> indices;
  };
  TargetedAccess write;
  std::vector<TargetedAccess> reads;
  ExprPtr rhs;
  bool guarded = false;
  // guard conjuncts: expr <= bound
  std::vector<std::pair<AffineExpr, AffineExpr>> guard_le;
};

struct TileProgram {
  std::string name;
  TiledScop tiled;
  std::vector<BufferPlan> plans;
  std::vector<TileStmt> stmts;
  std::vector<Node> roots;
  int width = 1;

  const Scop &scop() const { return tiled.scop; }
  const BufferPlan *plan_of_buffer(const std::string &buffer) const;
};

struct ShipConfig {
  int width = 1;
  Binding binding;          // required for width > 1 feasibility analysis
  bool pad_innermost = true;
  bool guards = true;       // test hook: drop write guards
};

/// Step 4: rewrite statement accesses into their buffers (name swap and
/// rebase for full buffers; anchor-relative slots plus halo displacement for
/// chunk and line buffers). Accesses without a cached plan stay on DDR.
std::vector<TileStmt> redirect(const TiledScop &t, const std::vector<BufferPlan> &plans);

/// Step 5: builds the complete tile program: declarations, fills placed at
/// the loop level their source offsets vary with, shifts, trimmed flushes,
/// and padded-write guards.
TileProgram plan_ships(const TiledScop &t, const std::vector<BufferPlan> &plans,
                       const ShipConfig &cfg);

/// Adds guards to nc writes under padding and clips flush extents to the
/// original domain image. plan_ships applies this; exposed for testing.
TileProgram guard_padded_writes(TileProgram tp);

struct BurstInstance {
  long long src_off = 0, dst_off = 0, len = 0;
};

/// Expands one ship to its burstcpy leaves under a concrete environment.
/// Shapes give the linearization extents of src and dst.
std::vector<BurstInstance> expand_ship(const ShipOp &op, const Binding &env,
                                       const std::vector<long long> &src_shape,
                                       const std::vector<long long> &dst_shape);

nlohmann::json tile_program_json(const TileProgram &tp);
TileProgram tile_program_from_json(const nlohmann::json &j);

} // namespace sf
