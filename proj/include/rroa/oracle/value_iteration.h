#pragma once

#include <filesystem>
#include <vector>

#include "rroa/model/system_model.h"
#include "rroa/oracle/grid_field.h"
#include "rroa/poly/polynomial.h"

namespace rroa {
namespace oracle {

struct ViSettings {
  /// Nodes per state axis; 0 picks 101 for n ≤ 2 and 61 otherwise.
  int state_nodes{0};
  /// Points per disturbance dimension (rejection-filtered to D).
  int disturbance_nodes{11};
  int max_iterations{10000};
  /// Stop once the sup-norm change of a sweep drops below this.
  double threshold{1e-6};
  int threads{1};
};

/// Nodes per axis that `settings` resolves to for an n-dimensional state.
int StateNodes(const ViSettings& settings, int n);

/// The box [−√R2, √R2]^n that holds B(0, R).
GridField StateBox(const model::SystemModel& model, int nodes, double fill = 0.0);

struct ViResult {
  GridField v;
  int iterations{0};
  bool converged{false};
  /// Sup-norm change of each sweep.
  std::vector<double> deltas;
  /// Largest pointwise decrease seen in any sweep. The update is monotone,
  /// so this stays at rounding level.
  double max_decrease{0.0};
};

/// Fixed-point iteration of
///   v ← max( max_d (v(f(x, d)) + g(x)) / (1 + g(x)),  1 − min_j l(1 − h_j^X(x)) ),
/// l(s) = max(s, 0), from v₀ = the second branch, on the state box grid,
/// with multilinear interpolation and v = 1 off the box. Values are clamped
/// to [0, 1]. Non-convergence is reported through `converged`.
ViResult ValueIteration(const model::SystemModel& model, const ViSettings& settings);

/// `iteration,delta` per sweep.
void WriteConvergenceLog(const ViResult& result, const std::filesystem::path& path);

struct BellmanReport {
  /// max over interior nodes of |min( min_d (v − v∘f − g(1 − v)),
  /// v − 1 + min_j l(1 − h_j^X) )|.
  double node_residual{0.0};
  std::vector<double> node_location;
  /// The same quantity at cell centres, where v itself is interpolated:
  /// a measure of the interpolation slack.
  double midpoint_residual{0.0};
  std::size_t nodes_checked{0};
};

BellmanReport BellmanResidual(const model::SystemModel& model, const GridField& v,
                              int disturbance_nodes);

struct UpperReport {
  /// max over nodes in B(0, R) of (v − u)₊, and where.
  double max_excess{0.0};
  std::vector<double> location;
  std::size_t nodes_checked{0};
};

/// Compares a certificate u with a value field v. With interior_only, nodes
/// on the faces of the grid box are skipped.
UpperReport CompareUpper(const poly::Polynomial& u, const GridField& v, double R2,
                         bool interior_only = false);

}  // namespace oracle
}  // namespace rroa
