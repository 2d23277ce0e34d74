#include "rroa/poly/polynomial.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rroa {
namespace poly {

Polynomial::Polynomial(int nvars, const TermMap& terms) : nvars_(nvars) {
  for (const auto& [m, c] : terms) {
    if (m.nvars() != nvars) {
      throw std::invalid_argument("Polynomial: monomial dimension mismatch");
    }
    AddTerm(m, c);
  }
}

Polynomial Polynomial::Constant(int nvars, double c) {
  Polynomial p(nvars);
  p.AddTerm(Monomial(nvars), c);
  return p;
}

Polynomial Polynomial::Variable(int nvars, int index) {
  Polynomial p(nvars);
  p.AddTerm(Monomial::Variable(nvars, index), 1.0);
  return p;
}

Polynomial Polynomial::FromMonomial(const Monomial& m, double c) {
  Polynomial p(m.nvars());
  p.AddTerm(m, c);
  return p;
}

int Polynomial::degree() const {
  // Graded order: the last key has maximal degree.
  return terms_.empty() ? -1 : terms_.rbegin()->first.degree();
}

double Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::AddTerm(const Monomial& m, double c) {
  if (m.nvars() != nvars_) {
    throw std::invalid_argument("Polynomial::AddTerm: dimension mismatch");
  }
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) it->second += c;
  if (std::abs(it->second) < kZeroThreshold) terms_.erase(it);
}

void Polynomial::CheckSameDimension(const Polynomial& q, const char* op) const {
  if (q.nvars_ != nvars_) {
    throw std::invalid_argument(std::string("Polynomial ") + op +
                                ": dimension mismatch (" +
                                std::to_string(nvars_) + " vs " +
                                std::to_string(q.nvars_) + ")");
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& q) {
  CheckSameDimension(q, "add");
  for (const auto& [m, c] : q.terms_) AddTerm(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& q) {
  CheckSameDimension(q, "sub");
  for (const auto& [m, c] : q.terms_) AddTerm(m, -c);
  return *this;
}

Polynomial Polynomial::operator+(const Polynomial& q) const {
  Polynomial r = *this;
  r += q;
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& q) const {
  Polynomial r = *this;
  r -= q;
  return r;
}

Polynomial Polynomial::operator-() const { return *this * -1.0; }

Polynomial Polynomial::operator*(const Polynomial& q) const {
  CheckSameDimension(q, "mul");
  // Accumulate unpruned, then prune once so intermediate cancellation does
  // not depend on summation order.
  TermMap acc;
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : q.terms_) {
      acc[ma * mb] += ca * cb;
    }
  }
  Polynomial r(nvars_);
  for (auto& [m, c] : acc) {
    if (std::abs(c) >= kZeroThreshold) r.terms_.emplace_hint(r.terms_.end(), m, c);
  }
  return r;
}

Polynomial Polynomial::operator*(double s) const {
  Polynomial r(nvars_);
  for (const auto& [m, c] : terms_) r.AddTerm(m, c * s);
  return r;
}

Polynomial Polynomial::pow(int e) const {
  if (e < 0) throw std::invalid_argument("Polynomial::pow: negative exponent");
  Polynomial result = Constant(nvars_, 1.0);
  Polynomial base = *this;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result;
}

double Polynomial::eval(std::span<const double> point) const {
  if (static_cast<int>(point.size()) != nvars_) {
    throw std::invalid_argument("Polynomial::eval: dimension mismatch");
  }
  if (terms_.empty()) return 0.0;
  const int maxdeg = degree();
  // powers[i][k] = point[i]^k
  std::vector<std::vector<double>> powers(nvars_,
                                          std::vector<double>(maxdeg + 1, 1.0));
  for (int i = 0; i < nvars_; ++i) {
    for (int k = 1; k <= maxdeg; ++k) powers[i][k] = powers[i][k - 1] * point[i];
  }
  double sum = 0.0;
  for (const auto& [m, c] : terms_) {
    double v = c;
    for (int i = 0; i < nvars_; ++i) v *= powers[i][m[i]];
    sum += v;
  }
  return sum;
}

Polynomial Polynomial::Differentiate(int var) const {
  if (var < 0 || var >= nvars_) {
    throw std::invalid_argument("Polynomial::Differentiate: bad variable");
  }
  Polynomial r(nvars_);
  for (const auto& [m, c] : terms_) {
    if (m[var] == 0) continue;
    std::vector<int> e = m.exponents();
    const int k = e[var]--;
    r.AddTerm(Monomial(std::move(e)), c * k);
  }
  return r;
}

Polynomial Polynomial::Embed(int new_nvars, int offset) const {
  if (offset < 0 || offset + nvars_ > new_nvars) {
    throw std::invalid_argument("Polynomial::Embed: does not fit");
  }
  Polynomial r(new_nvars);
  for (const auto& [m, c] : terms_) {
    std::vector<int> e(new_nvars, 0);
    for (int i = 0; i < nvars_; ++i) e[offset + i] = m[i];
    r.terms_.emplace(Monomial(std::move(e)), c);
  }
  return r;
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [_, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

std::string Polynomial::to_string(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  // Highest degree first reads more naturally.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    double mag = c;
    if (first) {
      if (c < 0) {
        os << "-";
        mag = -c;
      }
    } else {
      os << (c < 0 ? " - " : " + ");
      mag = std::abs(c);
    }
    first = false;
    if (m.degree() == 0) {
      os << mag;
    } else {
      os << mag << "*" << m.to_string(names);
    }
  }
  return os.str();
}

std::string Polynomial::to_string() const {
  return to_string(DefaultNames(nvars_));
}

Polynomial Compose(const Polynomial& u, std::span<const Polynomial> F) {
  if (static_cast<int>(F.size()) != u.nvars()) {
    throw std::invalid_argument("Compose: arity mismatch");
  }
  if (F.empty()) return u;
  const int m = F[0].nvars();
  for (const auto& f : F) {
    if (f.nvars() != m) throw std::invalid_argument("Compose: mixed arity in F");
  }
  const int n = u.nvars();
  std::vector<int> maxexp(n, 0);
  for (const auto& [mono, _] : u.terms()) {
    for (int i = 0; i < n; ++i) maxexp[i] = std::max(maxexp[i], mono[i]);
  }
  std::vector<std::vector<Polynomial>> powers(n);
  for (int i = 0; i < n; ++i) {
    powers[i].push_back(Polynomial::Constant(m, 1.0));
    for (int k = 1; k <= maxexp[i]; ++k) powers[i].push_back(powers[i].back() * F[i]);
  }
  Polynomial::TermMap acc;
  for (const auto& [mono, c] : u.terms()) {
    Polynomial term = Polynomial::Constant(m, c);
    for (int i = 0; i < n; ++i) {
      if (mono[i] > 0) term = term * powers[i][mono[i]];
    }
    for (const auto& [mm, cc] : term.terms()) acc[mm] += cc;
  }
  Polynomial r(m);
  for (const auto& [mm, cc] : acc) r.AddTerm(mm, cc);
  return r;
}

std::vector<double> EvalAll(std::span<const Polynomial> F,
                            std::span<const double> point) {
  std::vector<double> out;
  out.reserve(F.size());
  for (const auto& f : F) out.push_back(f.eval(point));
  return out;
}

}  // namespace poly
}  // namespace rroa
