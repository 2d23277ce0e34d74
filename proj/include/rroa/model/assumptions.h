#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rroa/model/system_model.h"
#include "rroa/sos/solver.h"

namespace rroa {
namespace model {

enum class CheckStatus { kPass, kFail, kUnknown };
std::string ToString(CheckStatus s);

/// Spectral radius of ∂f/∂x(0, d) over a disturbance grid. Passing is a
/// necessary condition for local exponential stability of the origin, not a
/// proof of it.
struct StabilityReport {
  std::vector<std::vector<double>> disturbances;
  std::vector<double> spectral_radii;
  double max_radius{0.0};
  double margin{1e-6};
  bool pass{false};
  std::string note;
};

StabilityReport CheckExponentialStability(const SystemModel& model,
                                          int d_samples = 21);

/// One SOS certificate inside an assumption check.
struct SosCheckPart {
  std::string name;
  CheckStatus status{CheckStatus::kUnknown};
  sos::SolveStatus solver_status{sos::SolveStatus::kUnknown};
  double identity_residual{0.0};
  double min_eigenvalue{0.0};
  double seconds{0.0};
  std::string message;
};

struct FeasibilityReport {
  std::string name;
  /// kPass iff every part passes; kFail if some part is infeasible;
  /// otherwise kUnknown.
  CheckStatus status{CheckStatus::kUnknown};
  std::vector<SosCheckPart> parts;
};

struct CheckSettings {
  sos::SolverSettings solver;
  /// Added to the automatically chosen certificate degree.
  int extra_degree{0};
  /// Accept a solved certificate only if its identity residual is below this.
  double residual_tol{1e-6};
};

CheckSettings DefaultCheckSettings(const SystemModel& model);

/// R2 − Σ f_i(x, d)² ≥ 0 on X̄ × D, and X ⊆ B(0, R), by Putinar certificates.
FeasibilityReport CheckReachBound(const SystemModel& model,
                                  const CheckSettings& settings);

/// h∞ − h∞∘f − ε·h₀ ≥ 0 on {h∞ ≤ 1} × D (ε = lyapunov_slack), and X∞ ⊆ X.
/// The decrease certificate uses Gram monomials of positive degree in x
/// only, since both sides vanish on x = 0.
FeasibilityReport CheckSeedLyapunov(const SystemModel& model,
                                    const CheckSettings& settings);

struct ArchimedeanReport {
  bool found{false};
  /// R_D of the matching constraint ‖d‖² − R_D.
  double R_D{0.0};
  int constraint_index{-1};
  /// When none is found: R_D of a ball containing D's bounding box, to be
  /// added as a redundant constraint.
  double suggested_R_D{0.0};
};

/// Looks for a D constraint equal to ‖d‖² − R_D (coefficients within 1e-12).
ArchimedeanReport CheckArchimedeanD(const SystemModel& model);

}  // namespace model
}  // namespace rroa
