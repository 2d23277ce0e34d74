#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace rroa {
namespace poly {

/// A monomial x^α over a fixed number of variables, stored as its exponent
/// vector. Monomials over the same variable count are totally ordered
/// graded-lexicographically: by total degree first, then lexicographically
/// with the first variable most significant.
class Monomial {
 public:
  Monomial() = default;

  /// The constant monomial 1 over `nvars` variables.
  explicit Monomial(int nvars);

  Monomial(std::vector<int> exponents);  // NOLINT(runtime/explicit)
  Monomial(std::initializer_list<int> exponents);

  /// x_index over `nvars` variables.
  static Monomial Variable(int nvars, int index);

  int nvars() const { return static_cast<int>(exponents_.size()); }
  int degree() const { return degree_; }
  int operator[](int i) const { return exponents_[i]; }
  const std::vector<int>& exponents() const { return exponents_; }

  Monomial operator*(const Monomial& other) const;

  /// True iff every exponent is even (so that this is a square).
  bool is_even() const;

  /// Exponent-wise half; requires is_even().
  Monomial half() const;

  /// Whether `other` divides this monomial.
  bool divisible_by(const Monomial& other) const;

  /// Value at `point` (|point| == nvars).
  double eval(std::span<const double> point) const;

  /// Text form like `x1^2*x2`; "1" for the constant monomial.
  std::string to_string(const std::vector<std::string>& names) const;

  bool operator==(const Monomial& other) const {
    return exponents_ == other.exponents_;
  }
  bool operator!=(const Monomial& other) const { return !(*this == other); }

 private:
  std::vector<int> exponents_;
  int degree_{0};
};

/// Graded-lexicographic strict order.
struct GradedLexLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

inline bool operator<(const Monomial& a, const Monomial& b) {
  return GradedLexLess{}(a, b);
}

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const;
};

/// Default variable names x1..xn followed by d1..dm.
std::vector<std::string> DefaultNames(int n, int m = 0);

}  // namespace poly
}  // namespace rroa

template <>
struct std::hash<rroa::poly::Monomial> : rroa::poly::MonomialHash {};
