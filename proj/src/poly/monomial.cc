#include "rroa/poly/monomial.h"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rroa {
namespace poly {

Monomial::Monomial(int nvars) : exponents_(nvars, 0), degree_(0) {}

Monomial::Monomial(std::vector<int> exponents)
    : exponents_(std::move(exponents)) {
  for (int e : exponents_) {
    if (e < 0) throw std::invalid_argument("Monomial: negative exponent");
    degree_ += e;
  }
}

Monomial::Monomial(std::initializer_list<int> exponents)
    : Monomial(std::vector<int>(exponents)) {}

Monomial Monomial::Variable(int nvars, int index) {
  std::vector<int> e(nvars, 0);
  e.at(index) = 1;
  return Monomial(std::move(e));
}

Monomial Monomial::operator*(const Monomial& other) const {
  if (other.nvars() != nvars()) {
    throw std::invalid_argument("Monomial product: dimension mismatch");
  }
  Monomial out = *this;
  for (int i = 0; i < nvars(); ++i) out.exponents_[i] += other.exponents_[i];
  out.degree_ += other.degree_;
  return out;
}

bool Monomial::is_even() const {
  for (int e : exponents_) {
    if (e % 2 != 0) return false;
  }
  return true;
}

Monomial Monomial::half() const {
  std::vector<int> e(exponents_);
  for (int& v : e) {
    if (v % 2 != 0) throw std::logic_error("Monomial::half on odd monomial");
    v /= 2;
  }
  return Monomial(std::move(e));
}

bool Monomial::divisible_by(const Monomial& other) const {
  if (other.nvars() != nvars()) return false;
  for (int i = 0; i < nvars(); ++i) {
    if (other.exponents_[i] > exponents_[i]) return false;
  }
  return true;
}

double Monomial::eval(std::span<const double> point) const {
  double v = 1.0;
  for (int i = 0; i < nvars(); ++i) {
    for (int k = 0; k < exponents_[i]; ++k) v *= point[i];
  }
  return v;
}

std::string Monomial::to_string(const std::vector<std::string>& names) const {
  std::string out;
  for (int i = 0; i < nvars(); ++i) {
    if (exponents_[i] == 0) continue;
    if (!out.empty()) out += "*";
    out += i < static_cast<int>(names.size()) ? names[i]
                                              : "v" + std::to_string(i + 1);
    if (exponents_[i] > 1) out += "^" + std::to_string(exponents_[i]);
  }
  return out.empty() ? "1" : out;
}

bool GradedLexLess::operator()(const Monomial& a, const Monomial& b) const {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  return a.exponents() < b.exponents();
}

std::size_t MonomialHash::operator()(const Monomial& m) const {
  std::size_t h = 1469598103934665603ULL;
  for (int e : m.exponents()) {
    h ^= static_cast<std::size_t>(e) + 0x9e3779b97f4a7c15ULL + (h << 6) +
         (h >> 2);
  }
  return h;
}

std::vector<std::string> DefaultNames(int n, int m) {
  std::vector<std::string> names;
  for (int i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
  for (int i = 1; i <= m; ++i) names.push_back("d" + std::to_string(i));
  return names;
}

}  // namespace poly
}  // namespace rroa
