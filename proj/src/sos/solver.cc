#include "rroa/sos/solver.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "rroa/sos/ipm_solver.h"

namespace rroa {
namespace sos {

std::string ToString(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kNearOptimal:
      return "near-optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kUnknown:
      return "unknown";
  }
  return "unknown";
}

SolveStatus SolveStatusFromString(std::string_view s) {
  if (s == "optimal") return SolveStatus::kOptimal;
  if (s == "near-optimal") return SolveStatus::kNearOptimal;
  if (s == "infeasible") return SolveStatus::kInfeasible;
  if (s == "unknown") return SolveStatus::kUnknown;
  throw std::invalid_argument("unknown solve status '" + std::string(s) + "'");
}

std::unique_ptr<ConicSolver> MakeSolver(std::string_view name) {
  if (name == "ipm") return std::make_unique<InteriorPointSolver>();
  throw std::invalid_argument("unknown conic backend '" + std::string(name) +
                              "' (available: ipm)");
}

std::unique_ptr<ConicSolver> DefaultSolver() {
  const char* env = std::getenv("ROA_SOLVER");
  return MakeSolver(env != nullptr && *env != '\0' ? env : "ipm");
}

SDPSolution Solve(const SDPProblem& sdp, const SolverSettings& settings) {
  return DefaultSolver()->Solve(sdp, settings);
}

double PrimalResidual(const SDPProblem& sdp, const std::vector<double>& free,
                      const std::vector<Eigen::MatrixXd>& blocks) {
  if (static_cast<int>(free.size()) != sdp.num_free ||
      blocks.size() != sdp.block_sizes.size()) {
    throw std::invalid_argument("PrimalResidual: solution shape mismatch");
  }
  std::vector<double> r = sdp.rhs;
  for (const auto& e : sdp.free_entries) r[e.row] -= e.value * free[e.col];
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    for (const auto& e : sdp.block_entries[k]) {
      const double x = blocks[k](e.i, e.j);
      r[e.row] -= e.i == e.j ? e.value * x : 2.0 * e.value * x;
    }
  }
  double worst = 0.0;
  for (double v : r) worst = std::max(worst, std::abs(v));
  return worst;
}

}  // namespace sos
}  // namespace rroa
