#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rroa/sos/sdp_problem.h"

namespace rroa {
namespace sos {

struct SolverSettings {
  /// Relative primal/dual feasibility and duality-gap tolerances.
  double feasibility_tol{1e-8};
  double gap_tol{1e-8};
  int max_iterations{150};
  /// A stalled run still counts as near-optimal when its best iterate is
  /// feasible to 100·feasibility_tol and within this relative gap.
  double near_optimal_gap{1e-3};
  /// Returned PSD blocks must have λ_min ≥ −eig_tol.
  double eig_tol{1e-8};
  /// Project the final primal point back onto the equality constraints when
  /// that keeps every block PSD.
  bool polish{true};
  bool verbose{false};
};

enum class SolveStatus { kOptimal, kNearOptimal, kInfeasible, kUnknown };

std::string ToString(SolveStatus s);
SolveStatus SolveStatusFromString(std::string_view s);

struct SDPSolution {
  SolveStatus status{SolveStatus::kUnknown};
  std::vector<double> free_values;
  std::vector<Eigen::MatrixXd> blocks;
  std::vector<double> dual;
  double primal_objective{0.0};
  double dual_objective{0.0};
  /// Diagnostics, all in the unscaled problem.
  double primal_residual{0.0};  // max |rhs − A x| over rows
  double dual_residual{0.0};
  double relative_gap{0.0};
  double min_eigenvalue{0.0};
  int iterations{0};
  std::string backend;
  std::string message;
};

/// Narrow contract for a conic backend: load standard-form data, run,
/// return primal blocks and status.
class ConicSolver {
 public:
  virtual ~ConicSolver() = default;
  virtual std::string name() const = 0;
  virtual SDPSolution Solve(const SDPProblem& sdp,
                            const SolverSettings& settings) const = 0;
};

/// Backend by name ("ipm" is the built-in primal-dual interior-point
/// method). Throws std::invalid_argument for unknown names.
std::unique_ptr<ConicSolver> MakeSolver(std::string_view name);

/// Backend named by the ROA_SOLVER environment variable, default "ipm".
std::unique_ptr<ConicSolver> DefaultSolver();

SDPSolution Solve(const SDPProblem& sdp, const SolverSettings& settings = {});

/// max_r |rhs_r − (A_free w + Σ⟨A_b, X_b⟩)_r|.
double PrimalResidual(const SDPProblem& sdp, const std::vector<double>& free,
                      const std::vector<Eigen::MatrixXd>& blocks);

}  // namespace sos
}  // namespace rroa
