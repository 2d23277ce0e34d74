#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rroa/poly/polynomial.h"

namespace rroa {
namespace model {

/// {y : h_i(y) ≤ bound_i} (or < bound_i when strict) over `nvars` variables.
struct SemiAlgebraicSet {
  struct Constraint {
    poly::Polynomial h;
    double bound{0.0};
    bool strict{false};
  };
  int nvars{0};
  std::vector<Constraint> constraints;

  /// Non-strict constraints are relaxed by `tol`; strict ones are not.
  bool Contains(std::span<const double> y, double tol = 0.0) const;
  /// max_i (h_i(y) − bound_i); ≤ 0 (< 0 if strict) inside.
  double MaxViolation(std::span<const double> y) const;
};

/// Defaults read from the `[solver]` section of a problem file.
struct SolverDefaults {
  /// Degrees of u to solve for when none is given on the command line.
  std::vector<int> degrees;
  /// Per degree of u, the degree of the multipliers attached to a
  /// non-constant constraint polynomial (Table-style overrides).
  std::map<int, int> mult_degree;
  double feasibility_tol{1e-8};
  double gap_tol{1e-8};
  double eig_tol{1e-8};
  int max_iterations{150};
  /// ε in the seed Lyapunov check h∞ − h∞∘f − ε·h₀ ≥ 0.
  double lyapunov_slack{1e-6};
  /// Grid points per disturbance dimension.
  int disturbance_grid{11};
};

/// Perturbed discrete-time system x⁺ = f(x, d), d ∈ D, with state constraint
/// X = {h_j^X < 1}, seed set X∞ = {h∞ < 1}, bounding ball {Σx_i² ≤ R2} and
/// running cost g. Polynomials in f are over (x_1..x_n, d_1..d_m).
struct SystemModel {
  int n{0};
  int m{0};
  std::vector<poly::Polynomial> f;
  SemiAlgebraicSet D;
  SemiAlgebraicSet X;
  poly::Polynomial h_inf;
  double R2{0.0};
  poly::Polynomial g;
  std::vector<std::string> names;  // x1..xn, d1..dm
  SolverDefaults solver;
  /// FNV-1a hash of the source text, hex; empty for programmatic models.
  std::string source_hash;

  /// h₀ = Σ x_i².
  poly::Polynomial h0() const;
  /// The X polynomials h_j^X.
  std::vector<poly::Polynomial> XPolys() const;
  /// The D polynomials h_i^D (constraints h ≤ 0).
  std::vector<poly::Polynomial> DPolys() const;

  /// f(x, d). Throws std::invalid_argument on dimension mismatch.
  std::vector<double> Step(std::span<const double> x,
                           std::span<const double> d) const;
  bool InX(std::span<const double> x) const;
  /// Strict entry test h∞(x) < 1 − 1e-12.
  bool InXinf(std::span<const double> x) const;
  bool InBall(std::span<const double> x) const;
  bool InD(std::span<const double> d, double tol = 1e-12) const;

  /// Uniform grid with `per_dim` points per axis over the bounding box of D,
  /// filtered by D's constraints (tolerance 1e-12).
  std::vector<std::vector<double>> DisturbanceGrid(int per_dim) const;
  /// Axis-aligned box [lo_i, hi_i] containing D.
  std::vector<std::pair<double, double>> DisturbanceBox() const;
  /// Corners of the disturbance grid box that lie in D.
  std::vector<std::vector<double>> DisturbanceCorners() const;
};

/// Problem-definition text does not parse. Line and column are 1-based.
class ModelParseError : public std::runtime_error {
 public:
  ModelParseError(const std::string& what, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// A parsed model violates one of the structural requirements; `check`
/// names it (e.g. "equilibrium", "cost-positive").
class ModelValidationError : public std::runtime_error {
 public:
  ModelValidationError(std::string check, const std::string& what);
  const std::string& check() const { return check_; }

 private:
  std::string check_;
};

/// Checks dimensions, f(0, d) = 0 on the disturbance grid (tol 1e-9),
/// g(0) = 0 and g > 0 on a sample cloud, h_j^X(0) = 0, h∞(0) < 1 and R2 > 0.
/// Throws ModelValidationError.
void Validate(const SystemModel& model);

/// Parses and validates a problem-definition document.
SystemModel LoadModel(const std::string& text);
SystemModel LoadModelFile(const std::string& path);

/// 64-bit FNV-1a of `text` as 16 hex digits.
std::string Fnv1aHex(const std::string& text);

}  // namespace model
}  // namespace rroa
