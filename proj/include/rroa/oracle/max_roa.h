#pragma once

#include <cstdint>
#include <vector>

#include "rroa/model/system_model.h"
#include "rroa/oracle/grid_field.h"

namespace rroa {
namespace oracle {

struct MaxRoaSettings {
  /// Steps allowed to reach X∞.
  int horizon{200};
  /// Points per disturbance dimension for the greedy adversary and the
  /// random policies.
  int disturbance_nodes{11};
  int policies{50};
  std::uint64_t seed{42};
  int threads{1};
};

/// Outcome of one initial state under one adversary.
enum class Verdict { kHit, kExit, kTimeout };

/// Plays the greedy adversary that picks, each step, the grid disturbance
/// maximising the interpolated value field at the successor.
Verdict GreedyRun(const model::SystemModel& model, const GridField& v,
                  const std::vector<std::vector<double>>& dgrid,
                  std::vector<double> x0, int horizon);

/// Fills `mask` (any shape: box or slice) with 1 at nodes x₀ ∈ X from which
/// the greedy adversary on `v` and every seeded random policy all lead into
/// X∞ within the horizon without leaving X, and 0 elsewhere.
void GridMaxRoa(const model::SystemModel& model, const GridField& v,
                const MaxRoaSettings& settings, GridField& mask);

}  // namespace oracle
}  // namespace rroa
