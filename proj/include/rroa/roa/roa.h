#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rroa/model/system_model.h"
#include "rroa/oracle/grid_field.h"
#include "rroa/poly/basis.h"
#include "rroa/poly/polynomial.h"
#include "rroa/sos/solver.h"
#include "rroa/sos/sos_program.h"

namespace rroa {
namespace roa {

struct RoaConfig {
  /// Degree of u.
  int k{6};
  /// Degree of the multipliers attached to non-constant constraint
  /// polynomials (s1, s2, s3, s5, s6, s8, s9). When unset, each defaults to
  /// the identity's matching degree minus its companion's degree, rounded
  /// down to even. The constant-companion multipliers s0, s4, s7 always use
  /// the full matching degree and are pruned by diagonal consistency.
  std::optional<int> mult_degree;
  sos::SolverSettings solver;

  // Certification.
  int samples{1000};
  int policies{50};
  int horizon{200};
  std::uint64_t seed{42};
  double sample_tol{1e-6};
  /// Nodes per state axis of the constraint-sampling grid (0: 101 for
  /// n ≤ 2, 31 otherwise).
  int check_grid{0};
  /// Points per disturbance dimension for sampling and random policies.
  int disturbance_grid{11};
  /// Worker threads for sampling.
  int threads{1};
};

/// Config for degree k, with solver settings and the per-degree multiplier
/// override taken from the model's defaults.
RoaConfig ConfigFor(const model::SystemModel& model, int k);

/// Names and indices of the pieces of the program, for reporting.
struct ProgramIndex {
  int u{-1};
  std::vector<std::string> identity_names;
};

/// The SOS program: identity family A over (x, d),
///   u − u∘f − g(1−u) = s0 + s1(R−h0) + s2(h∞−1) − Σ_i s3_i h_i^D,
/// families B_j and C_j over x,
///   u − 1 = s4_j + s5_j(R−h0) + s6_j(h_j^X−1),
///   u − h_j^X = s7_j + s8_j(R−h0) + Σ_l s9_lj(1−h_l^X),
/// and objective ∫_B u − ∫_{X∞} u in u's coefficients.
sos::SOSProgram BuildProgram(const model::SystemModel& model, const RoaConfig& cfg,
                             ProgramIndex* index = nullptr);

struct StageTimes {
  double build{0.0};
  double compile{0.0};
  double solve{0.0};
  double extract{0.0};
};

struct RoaCertificate {
  int n{0};
  double R2{0.0};
  poly::Polynomial u;
  sos::SolveStatus status{sos::SolveStatus::kUnknown};
  std::string solver_message;
  std::string backend;
  /// p_k* = w·l.
  double objective{0.0};
  std::vector<std::string> multiplier_names;
  std::vector<poly::MonomialBasis> gram_bases;
  std::vector<Eigen::MatrixXd> grams;
  std::vector<std::string> identity_names;
  std::vector<double> identity_residuals;
  double max_residual{0.0};
  double min_eigenvalue{0.0};
  int iterations{0};
  int sdp_rows{0};
  int sdp_free{0};
  std::vector<int> block_sizes;
  std::string model_hash;
  RoaConfig config;
  StageTimes times;

  bool ok() const {
    return status == sos::SolveStatus::kOptimal ||
           status == sos::SolveStatus::kNearOptimal;
  }
};

/// build → compile → solve → extract → residuals. A failed solve yields a
/// certificate with that status and u ≡ 1 (empty set); it does not throw.
RoaCertificate ComputeRoa(const model::SystemModel& model, const RoaConfig& cfg);

/// h0(x) ≤ R2 and u(x) < 1.
bool Membership(const RoaCertificate& cert, std::span<const double> x);

struct TrajectoryFailure {
  std::vector<double> x0;
  int policy{-1};
  /// "exit" (left X before reaching X∞), "timeout" (never reached X∞) or
  /// "overflow".
  std::string kind;
  int step{-1};
};

struct ConstraintViolation {
  /// "decrease", "outside-X" or "above-hX".
  std::string check;
  std::vector<double> point;  // x, or (x, d) for "decrease"
  double value{0.0};          // how far below −tol the checked quantity is
};

struct CertReport {
  // Constraint sampling.
  std::size_t decrease_points{0};
  std::size_t outside_points{0};
  std::size_t closure_points{0};
  std::size_t constraint_violation_count{0};
  std::vector<ConstraintViolation> constraint_violations;  // first few
  double worst_decrease{0.0};
  double worst_outside{0.0};
  double worst_closure{0.0};
  // Trajectory sampling.
  std::size_t states{0};
  std::size_t rejection_draws{0};
  std::size_t policy_count{0};
  std::size_t trajectories{0};
  std::size_t stayed_in_X{0};
  std::size_t hit_Xinf{0};
  std::size_t exit_count{0};
  std::size_t timeout_count{0};
  std::vector<TrajectoryFailure> trajectory_failures;  // first few
  bool pass{false};
  std::string summary;
};

CertReport Certify(const RoaCertificate& cert, const model::SystemModel& model,
                   const RoaConfig& cfg);

/// Membership mask on a grid over [−√R2, √R2]^n (n ≤ 2), or, when
/// `slice_axis` is set, on the plane x[slice_axis] = slice_value spanned by
/// the remaining two coordinates (n = 3).
oracle::GridField SignGrid(const RoaCertificate& cert, int resolution,
                           std::optional<int> slice_axis = std::nullopt,
                           double slice_value = 0.0);

/// Same grid shape as SignGrid, filled with u.
oracle::GridField ValueGrid(const RoaCertificate& cert, int resolution,
                            std::optional<int> slice_axis = std::nullopt,
                            double slice_value = 0.0);

}  // namespace roa
}  // namespace rroa
