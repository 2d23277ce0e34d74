#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "rroa/poly/basis.h"
#include "rroa/poly/monomial.h"
#include "rroa/poly/polynomial.h"

namespace rroa {
namespace poly {

/// ∫ x^α dx over the Euclidean ball {x ∈ ℝⁿ : Σ x_i² ≤ R2}.
/// Zero whenever some exponent is odd.
double BallMoment(const Monomial& alpha, double R2, int n);

/// ∫ x^α dx over the ellipsoid {x : xᵀQx < c}. Throws std::invalid_argument
/// unless Q is symmetric positive definite and c > 0.
double EllipsoidMoment(const Monomial& alpha, const Eigen::MatrixXd& Q,
                       double c);

/// If p is a pure quadratic form xᵀQx (no constant or linear terms, Q
/// positive definite), returns Q.
std::optional<Eigen::MatrixXd> AsPositiveQuadraticForm(const Polynomial& p);

/// ∫ p dx over the ball {Σ x_i² ≤ R2}.
double IntegrateOverBall(const Polynomial& p, double R2);

/// Moments of every basis element over the sub-level set {x : h(x) < 1},
/// which must lie inside the ball {Σ x_i² ≤ R2}. Closed form when h is a
/// positive definite quadratic form; otherwise deterministic quasi-Monte
/// Carlo (scrambled Halton) rejection sampling over the ball's bounding box.
std::vector<double> SublevelMoments(const MonomialBasis& basis,
                                    const Polynomial& h, double R2,
                                    std::size_t qmc_points = 1 << 20,
                                    std::uint64_t seed = 42);

/// Quasi-Monte Carlo moments over {x in ball(R2) : h(x) < 1}; exposed for
/// the non-quadric path.
std::vector<double> QmcSublevelMoments(const MonomialBasis& basis,
                                       const Polynomial& h, double R2,
                                       std::size_t qmc_points,
                                       std::uint64_t seed);

}  // namespace poly
}  // namespace rroa
