#pragma once

#include <string>

#include "rroa/sos/solver.h"

namespace rroa {
namespace sos {

/// Built-in primal-dual interior-point method (HKM direction, Mehrotra
/// predictor-corrector) for the standard form of SDPProblem. Dense linear
/// algebra throughout; intended for problems with up to a few thousand rows.
class InteriorPointSolver final : public ConicSolver {
 public:
  std::string name() const override;
  SDPSolution Solve(const SDPProblem& sdp,
                    const SolverSettings& settings) const override;
};

}  // namespace sos
}  // namespace rroa
