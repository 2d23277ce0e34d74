#include "rroa/model/system_model.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "rroa/poly/basis.h"

namespace rroa {
namespace model {

using poly::Monomial;
using poly::Polynomial;

bool SemiAlgebraicSet::Contains(std::span<const double> y, double tol) const {
  for (const auto& c : constraints) {
    const double v = c.h.eval(y);
    if (c.strict ? !(v < c.bound) : !(v <= c.bound + tol)) return false;
  }
  return true;
}

double SemiAlgebraicSet::MaxViolation(std::span<const double> y) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& c : constraints) worst = std::max(worst, c.h.eval(y) - c.bound);
  return worst;
}

Polynomial SystemModel::h0() const {
  Polynomial h(n);
  for (int i = 0; i < n; ++i) h.AddTerm(Monomial::Variable(n, i) * Monomial::Variable(n, i), 1.0);
  return h;
}

std::vector<Polynomial> SystemModel::XPolys() const {
  std::vector<Polynomial> out;
  for (const auto& c : X.constraints) out.push_back(c.h);
  return out;
}

std::vector<Polynomial> SystemModel::DPolys() const {
  std::vector<Polynomial> out;
  for (const auto& c : D.constraints) out.push_back(c.h);
  return out;
}

std::vector<double> SystemModel::Step(std::span<const double> x,
                                      std::span<const double> d) const {
  if (static_cast<int>(x.size()) != n || static_cast<int>(d.size()) != m) {
    throw std::invalid_argument("Step: expected state of size " +
                                std::to_string(n) + " and disturbance of size " +
                                std::to_string(m));
  }
  std::vector<double> xd(x.begin(), x.end());
  xd.insert(xd.end(), d.begin(), d.end());
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = f[i].eval(xd);
  return out;
}

bool SystemModel::InX(std::span<const double> x) const { return X.Contains(x); }

bool SystemModel::InXinf(std::span<const double> x) const {
  return h_inf.eval(x) < 1.0 - 1e-12;
}

bool SystemModel::InBall(std::span<const double> x) const {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s <= R2;
}

bool SystemModel::InD(std::span<const double> d, double tol) const {
  return D.Contains(d, tol);
}

std::vector<std::pair<double, double>> SystemModel::DisturbanceBox() const {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, double>> box(m, {-inf, inf});
  for (const auto& c : D.constraints) {
    // Diagonal quadric Σ a_i d_i² + c0 ≤ bound with a_i > 0.
    bool quadric = true;
    bool linear1 = c.h.degree() == 1;
    double c0 = 0.0;
    std::vector<double> a(m, 0.0);
    int linear_var = -1;
    double linear_coeff = 0.0;
    for (const auto& [mono, coef] : c.h.terms()) {
      if (mono.degree() == 0) {
        c0 = coef;
        continue;
      }
      int var = -1;
      for (int i = 0; i < m; ++i) {
        if (mono[i] > 0) var = var == -1 ? i : -2;
      }
      if (var < 0) {
        quadric = linear1 = false;
        continue;
      }
      if (mono.degree() == 2 && mono[var] == 2 && coef > 0) {
        a[var] = coef;
        linear1 = false;
      } else if (mono.degree() == 1 && linear1 &&
                 (linear_var == -1 || linear_var == var)) {
        linear_var = var;
        linear_coeff = coef;
        quadric = false;
      } else {
        quadric = linear1 = false;
      }
    }
    const double rhs = c.bound - c0;
    if (quadric && rhs >= 0) {
      for (int i = 0; i < m; ++i) {
        if (a[i] > 0) {
          const double r = std::sqrt(rhs / a[i]);
          box[i].first = std::max(box[i].first, -r);
          box[i].second = std::min(box[i].second, r);
        }
      }
    } else if (linear1 && linear_var >= 0) {
      const double t = rhs / linear_coeff;
      if (linear_coeff > 0) {
        box[linear_var].second = std::min(box[linear_var].second, t);
      } else {
        box[linear_var].first = std::max(box[linear_var].first, t);
      }
    }
  }
  for (int i = 0; i < m; ++i) {
    if (!std::isfinite(box[i].first) || !std::isfinite(box[i].second) ||
        box[i].first > box[i].second) {
      throw ModelValidationError(
          "disturbance-bounded",
          "cannot bound disturbance " + names.at(n + i) +
              " from the D constraints; add a ball or bound constraint");
    }
  }
  return box;
}

std::vector<std::vector<double>> SystemModel::DisturbanceGrid(int per_dim) const {
  if (m == 0) return {{}};
  if (per_dim < 1) throw std::invalid_argument("DisturbanceGrid: per_dim < 1");
  const auto box = DisturbanceBox();
  std::vector<std::vector<double>> out;
  std::vector<int> idx(m, 0);
  std::vector<double> d(m);
  for (;;) {
    for (int i = 0; i < m; ++i) {
      d[i] = per_dim == 1 ? 0.5 * (box[i].first + box[i].second)
                          : box[i].first + (box[i].second - box[i].first) * idx[i] /
                                               (per_dim - 1);
    }
    if (InD(d)) out.push_back(d);
    int k = m - 1;
    while (k >= 0 && ++idx[k] == per_dim) idx[k--] = 0;
    if (k < 0) break;
  }
  return out;
}

std::vector<std::vector<double>> SystemModel::DisturbanceCorners() const {
  if (m == 0) return {{}};
  const auto box = DisturbanceBox();
  std::vector<std::vector<double>> out;
  for (int mask = 0; mask < (1 << m); ++mask) {
    std::vector<double> d(m);
    for (int i = 0; i < m; ++i) d[i] = (mask >> i) & 1 ? box[i].second : box[i].first;
    if (InD(d)) out.push_back(d);
  }
  return out;
}

ModelParseError::ModelParseError(const std::string& what, int line, int column)
    : std::runtime_error("line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

ModelValidationError::ModelValidationError(std::string check,
                                           const std::string& what)
    : std::runtime_error(check + ": " + what), check_(std::move(check)) {}

void Validate(const SystemModel& model) {
  const int n = model.n;
  const int m = model.m;
  if (n < 1 || m < 0) {
    throw ModelValidationError("dimensions", "need n >= 1 and m >= 0");
  }
  if (static_cast<int>(model.f.size()) != n) {
    throw ModelValidationError("dimensions", "f needs " + std::to_string(n) +
                                                 " components");
  }
  for (const auto& fi : model.f) {
    if (fi.nvars() != n + m) {
      throw ModelValidationError("dimensions", "f components must be over (x, d)");
    }
  }
  if (model.D.nvars != m || model.X.nvars != n || model.h_inf.nvars() != n ||
      model.g.nvars() != n) {
    throw ModelValidationError("dimensions", "set or cost polynomial over wrong variables");
  }
  for (const auto& c : model.D.constraints) {
    if (c.h.nvars() != m) throw ModelValidationError("dimensions", "D constraint over wrong variables");
  }
  for (const auto& c : model.X.constraints) {
    if (c.h.nvars() != n) throw ModelValidationError("dimensions", "X constraint over wrong variables");
  }
  if (m > 0 && model.D.constraints.empty()) {
    throw ModelValidationError("disturbance-set", "D has no constraints");
  }
  if (model.X.constraints.empty()) {
    throw ModelValidationError("constraint-set", "X has no constraints");
  }
  if (!(model.R2 > 0)) throw ModelValidationError("bound", "R2 must be positive");

  const std::vector<double> zero(n, 0.0);
  const auto dgrid = model.DisturbanceGrid(model.solver.disturbance_grid);
  if (dgrid.empty()) throw ModelValidationError("disturbance-set", "D grid is empty");
  for (const auto& d : dgrid) {
    const auto fx = model.Step(zero, d);
    for (int i = 0; i < n; ++i) {
      if (std::abs(fx[i]) > 1e-9) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "f%d(0, d) = %.3g at a grid disturbance",
                      i + 1, fx[i]);
        throw ModelValidationError("equilibrium", buf);
      }
    }
  }
  if (std::abs(model.g.eval(zero)) > 1e-12) {
    throw ModelValidationError("cost-zero", "g(0) must be 0");
  }
  // Sample cloud over the bounding box of the ball (deterministic lattice).
  {
    const double r = std::sqrt(model.R2);
    const int per = n <= 2 ? 41 : (n == 3 ? 15 : 7);
    std::vector<int> idx(n, 0);
    std::vector<double> x(n);
    for (;;) {
      double nrm = 0.0;
      for (int i = 0; i < n; ++i) {
        // Offset lattice so the origin itself is excluded but neighbours are not.
        x[i] = -r + 2.0 * r * (idx[i] + 0.5) / per;
        nrm += x[i] * x[i];
      }
      if (nrm > 1e-18 && !(model.g.eval(x) > 0)) {
        throw ModelValidationError("cost-positive", "g is not positive away from 0");
      }
      int k = n - 1;
      while (k >= 0 && ++idx[k] == per) idx[k--] = 0;
      if (k < 0) break;
    }
  }
  for (const auto& c : model.X.constraints) {
    if (std::abs(c.h.eval(zero)) > 1e-12) {
      throw ModelValidationError("constraint-origin", "h_j^X(0) must be 0");
    }
  }
  if (!(model.h_inf.eval(zero) < 1.0)) {
    throw ModelValidationError("seed-origin", "h_inf(0) must be < 1");
  }
}

std::string Fnv1aHex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace model
}  // namespace rroa
