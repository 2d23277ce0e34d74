#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "rroa/poly/monomial.h"

namespace rroa {
namespace poly {

/// Coefficients with absolute value below this are dropped after every
/// arithmetic operation.
inline constexpr double kZeroThreshold = 1e-14;

/// Sparse multivariate polynomial with double coefficients, keyed by
/// monomial in graded-lexicographic order.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, double, GradedLexLess>;

  Polynomial() = default;
  explicit Polynomial(int nvars) : nvars_(nvars) {}
  Polynomial(int nvars, const TermMap& terms);

  static Polynomial Constant(int nvars, double c);
  static Polynomial Variable(int nvars, int index);
  static Polynomial FromMonomial(const Monomial& m, double c = 1.0);

  int nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  std::size_t num_terms() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  /// Maximum total degree over stored terms; -1 for the zero polynomial.
  int degree() const;

  double coefficient(const Monomial& m) const;

  /// Adds c·m into this polynomial, pruning the result.
  void AddTerm(const Monomial& m, double c);

  Polynomial operator+(const Polynomial& q) const;
  Polynomial operator-(const Polynomial& q) const;
  Polynomial operator-() const;
  Polynomial operator*(const Polynomial& q) const;
  Polynomial operator*(double s) const;
  Polynomial& operator+=(const Polynomial& q);
  Polynomial& operator-=(const Polynomial& q);

  Polynomial pow(int e) const;

  double eval(std::span<const double> point) const;

  /// ∂/∂x_var.
  Polynomial Differentiate(int var) const;

  /// The same polynomial viewed in `new_nvars` variables, with variable i
  /// mapped to variable offset + i.
  Polynomial Embed(int new_nvars, int offset = 0) const;

  /// Max |coefficient|; 0 for the zero polynomial.
  double max_abs_coefficient() const;

  std::string to_string(const std::vector<std::string>& names) const;
  std::string to_string() const;

  bool operator==(const Polynomial& q) const {
    return nvars_ == q.nvars_ && terms_ == q.terms_;
  }
  bool operator!=(const Polynomial& q) const { return !(*this == q); }

 private:
  void CheckSameDimension(const Polynomial& q, const char* op) const;

  int nvars_{0};
  TermMap terms_;
};

inline Polynomial operator*(double s, const Polynomial& p) { return p * s; }

/// u(F_1, ..., F_n): substitutes F[i] for variable i of u. All F share one
/// variable count, which becomes the result's.
Polynomial Compose(const Polynomial& u, std::span<const Polynomial> F);

/// Evaluates each component at `point`.
std::vector<double> EvalAll(std::span<const Polynomial> F,
                            std::span<const double> point);

}  // namespace poly
}  // namespace rroa
