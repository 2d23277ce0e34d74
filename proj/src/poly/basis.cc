#include "rroa/poly/basis.h"

#include <stdexcept>

namespace rroa {
namespace poly {

MonomialBasis::MonomialBasis(int nvars, int maxdeg,
                             std::vector<Monomial> elements)
    : nvars_(nvars), maxdeg_(maxdeg), elements_(std::move(elements)) {
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (elements_[i].nvars() != nvars_) {
      throw std::invalid_argument("MonomialBasis: dimension mismatch");
    }
    if (!index_.emplace(elements_[i], i).second) {
      throw std::invalid_argument("MonomialBasis: duplicate monomial");
    }
  }
}

std::optional<std::size_t> MonomialBasis::index_of(const Monomial& m) const {
  auto it = index_.find(m);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

void Enumerate(int var, int remaining, std::vector<int>& current,
               std::vector<Monomial>& out) {
  const int n = static_cast<int>(current.size());
  if (var == n - 1) {
    current[var] = remaining;
    out.emplace_back(current);
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    current[var] = e;
    Enumerate(var + 1, remaining - e, current, out);
  }
  current[var] = 0;
}

}  // namespace

std::vector<Monomial> MonomialsOfDegree(int nvars, int degree) {
  if (nvars < 1) throw std::invalid_argument("MonomialsOfDegree: nvars < 1");
  std::vector<Monomial> out;
  std::vector<int> current(nvars, 0);
  Enumerate(0, degree, current, out);
  return out;
}

MonomialBasis Basis(int nvars, int maxdeg) {
  if (nvars < 1 || maxdeg < 0) {
    throw std::invalid_argument("Basis: need nvars >= 1 and maxdeg >= 0");
  }
  std::vector<Monomial> elements;
  for (int d = 0; d <= maxdeg; ++d) {
    auto level = MonomialsOfDegree(nvars, d);
    elements.insert(elements.end(), level.begin(), level.end());
  }
  return MonomialBasis(nvars, maxdeg, std::move(elements));
}

std::size_t BasisSize(int nvars, int maxdeg) {
  // C(n+d, d) computed incrementally; exact for the sizes we use.
  std::size_t r = 1;
  for (int i = 1; i <= maxdeg; ++i) {
    r = r * static_cast<std::size_t>(nvars + i) / static_cast<std::size_t>(i);
  }
  return r;
}

}  // namespace poly
}  // namespace rroa
