#include "rroa/poly/moments.h"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace rroa {
namespace poly {

double BallMoment(const Monomial& alpha, double R2, int n) {
  if (!(R2 > 0)) throw std::invalid_argument("BallMoment: R2 must be > 0");
  if (alpha.nvars() != n) {
    throw std::invalid_argument("BallMoment: exponent length != n");
  }
  if (!alpha.is_even()) return 0.0;
  // ∫_{|x|≤r} x^α dx = 2 Π Γ((α_i+1)/2) / Γ((|α|+n)/2) · r^{|α|+n} / (|α|+n)
  double log_sphere = std::log(2.0);
  for (int i = 0; i < n; ++i) log_sphere += std::lgamma(0.5 * (alpha[i] + 1));
  const double total = alpha.degree() + n;
  log_sphere -= std::lgamma(0.5 * total);
  return std::exp(log_sphere + 0.5 * total * std::log(R2)) / total;
}

double IntegrateOverBall(const Polynomial& p, double R2) {
  double s = 0.0;
  for (const auto& [m, c] : p.terms()) s += c * BallMoment(m, R2, p.nvars());
  return s;
}

double EllipsoidMoment(const Monomial& alpha, const Eigen::MatrixXd& Q,
                       double c) {
  const int n = alpha.nvars();
  if (Q.rows() != n || Q.cols() != n) {
    throw std::invalid_argument("EllipsoidMoment: Q has wrong shape");
  }
  if (!(c > 0)) throw std::invalid_argument("EllipsoidMoment: c must be > 0");
  if (!Q.isApprox(Q.transpose(), 1e-12)) {
    throw std::invalid_argument("EllipsoidMoment: Q is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(Q);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("EllipsoidMoment: Q is not positive definite");
  }
  const Eigen::MatrixXd L = llt.matrixL();
  for (int i = 0; i < n; ++i) {
    if (!(L(i, i) > 0)) {
      throw std::invalid_argument("EllipsoidMoment: Q is not positive definite");
    }
  }
  // x = T y with T = √c L⁻ᵀ maps the unit ball onto the ellipsoid.
  const Eigen::MatrixXd T =
      std::sqrt(c) * L.transpose().triangularView<Eigen::Upper>().solve(
                         Eigen::MatrixXd::Identity(n, n));
  std::vector<Polynomial> linear;
  for (int i = 0; i < n; ++i) {
    Polynomial xi(n);
    for (int j = 0; j < n; ++j) xi.AddTerm(Monomial::Variable(n, j), T(i, j));
    linear.push_back(std::move(xi));
  }
  const Polynomial in_y = Compose(Polynomial::FromMonomial(alpha), linear);
  return std::abs(T.determinant()) * IntegrateOverBall(in_y, 1.0);
}

std::optional<Eigen::MatrixXd> AsPositiveQuadraticForm(const Polynomial& p) {
  const int n = p.nvars();
  if (p.is_zero() || n == 0) return std::nullopt;
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [m, c] : p.terms()) {
    if (m.degree() != 2) return std::nullopt;
    int first = -1, second = -1;
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < m[i]; ++k) (first < 0 ? first : second) = i;
    }
    if (first == second) {
      Q(first, first) += c;
    } else {
      Q(first, second) += 0.5 * c;
      Q(second, first) += 0.5 * c;
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(Q);
  if (llt.info() != Eigen::Success) return std::nullopt;
  return Q;
}

namespace {

double RadicalInverse(std::uint64_t index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

}  // namespace

std::vector<double> QmcSublevelMoments(const MonomialBasis& basis,
                                       const Polynomial& h, double R2,
                                       std::size_t qmc_points,
                                       std::uint64_t seed) {
  const int n = basis.nvars();
  if (n > static_cast<int>(std::size(kPrimes))) {
    throw std::invalid_argument("QmcSublevelMoments: too many variables");
  }
  if (h.nvars() != n) {
    throw std::invalid_argument("QmcSublevelMoments: dimension mismatch");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> shift(n);
  for (double& s : shift) s = unif(rng);

  const double r = std::sqrt(R2);
  std::vector<double> sums(basis.size(), 0.0);
  std::vector<double> x(n);
  for (std::size_t k = 1; k <= qmc_points; ++k) {
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double u = RadicalInverse(k, kPrimes[i]) + shift[i];
      if (u >= 1.0) u -= 1.0;
      x[i] = r * (2.0 * u - 1.0);
      norm2 += x[i] * x[i];
    }
    if (norm2 > R2 || !(h.eval(x) < 1.0)) continue;
    for (std::size_t j = 0; j < basis.size(); ++j) sums[j] += basis[j].eval(x);
  }
  const double volume = std::pow(2.0 * r, n);
  for (double& s : sums) s *= volume / static_cast<double>(qmc_points);
  return sums;
}

std::vector<double> SublevelMoments(const MonomialBasis& basis,
                                    const Polynomial& h, double R2,
                                    std::size_t qmc_points, std::uint64_t seed) {
  if (auto Q = AsPositiveQuadraticForm(h)) {
    std::vector<double> out;
    out.reserve(basis.size());
    for (const auto& m : basis.elements()) out.push_back(EllipsoidMoment(m, *Q, 1.0));
    return out;
  }
  return QmcSublevelMoments(basis, h, R2, qmc_points, seed);
}

}  // namespace poly
}  // namespace rroa
