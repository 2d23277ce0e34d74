#pragma once

#include <cstddef>
#include <optional>
#include <unordered_map>
#include <vector>

#include "rroa/poly/monomial.h"

namespace rroa {
namespace poly {

/// An ordered list of distinct monomials over `nvars` variables, used to
/// index coefficient vectors and Gram matrices. The full basis of degree
/// ≤ maxdeg is graded-lexicographically ordered; pruned bases keep the
/// relative order of the full one.
class MonomialBasis {
 public:
  MonomialBasis() = default;
  MonomialBasis(int nvars, int maxdeg, std::vector<Monomial> elements);

  int nvars() const { return nvars_; }
  int maxdeg() const { return maxdeg_; }
  std::size_t size() const { return elements_.size(); }
  const std::vector<Monomial>& elements() const { return elements_; }
  const Monomial& operator[](std::size_t i) const { return elements_[i]; }

  std::optional<std::size_t> index_of(const Monomial& m) const;

  bool operator==(const MonomialBasis& o) const {
    return nvars_ == o.nvars_ && maxdeg_ == o.maxdeg_ &&
           elements_ == o.elements_;
  }

 private:
  int nvars_{0};
  int maxdeg_{0};
  std::vector<Monomial> elements_;
  std::unordered_map<Monomial, std::size_t, MonomialHash> index_;
};

/// All monomials in `nvars` variables of total degree ≤ maxdeg, graded-lex.
MonomialBasis Basis(int nvars, int maxdeg);

/// All monomials of total degree exactly `degree`, lexicographically.
std::vector<Monomial> MonomialsOfDegree(int nvars, int degree);

/// C(n + d, d).
std::size_t BasisSize(int nvars, int maxdeg);

}  // namespace poly
}  // namespace rroa
