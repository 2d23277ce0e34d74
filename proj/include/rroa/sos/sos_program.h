#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rroa/poly/basis.h"
#include "rroa/poly/polynomial.h"

namespace rroa {
namespace sos {

/// A polynomial with free real coefficients, u = Σ_k w_k · basis[k].
struct DecisionPoly {
  std::string name;
  poly::MonomialBasis basis;
};

/// A sum-of-squares polynomial σ = m(y)ᵀ Q m(y), Q ⪰ 0, with m the Gram
/// basis. When `prune` is set and σ appears exactly once, with a constant
/// factor, the compiler drops Gram monomials that can be shown to carry a
/// zero row of Q (diagonal consistency against the identity's support).
struct SosMultiplier {
  std::string name;
  poly::MonomialBasis gram_basis;
  bool prune{false};
};

enum class TermKind { kData, kDecision, kMultiplier };

/// One summand `factor · ref` of an identity side. For data terms the
/// factor is the summand itself. A decision term may be composed with a
/// substitution map (u∘F); an empty map means the identity map, which
/// requires the decision polynomial to live in the identity's variables.
struct Term {
  TermKind kind{TermKind::kData};
  int index{-1};
  poly::Polynomial factor;
  std::vector<poly::Polynomial> substitution;

  static Term Data(poly::Polynomial p);
  static Term Decision(int index, poly::Polynomial factor,
                       std::vector<poly::Polynomial> substitution = {});
  static Term Multiplier(int index, poly::Polynomial factor);
};

/// lhs ≡ rhs as polynomials in `nvars` variables, enforced by coefficient
/// matching. If `matching_degree` is set, every produced monomial must have
/// total degree ≤ it; otherwise it is the maximum produced degree.
struct PolyIdentity {
  std::string name;
  int nvars{0};
  std::vector<Term> lhs;
  std::vector<Term> rhs;
  std::optional<int> matching_degree;
};

/// Certificate-level description: decision polynomials, SOS multipliers,
/// polynomial identities and a linear objective Σ_k l_k w_k per decision
/// polynomial (minimised).
class SOSProgram {
 public:
  int AddDecision(std::string name, poly::MonomialBasis basis);
  int AddMultiplier(std::string name, poly::MonomialBasis gram_basis,
                    bool prune = false);
  void AddIdentity(PolyIdentity identity);
  void SetObjective(int decision_index, std::vector<double> l);

  const std::vector<DecisionPoly>& decisions() const { return decisions_; }
  const std::vector<SosMultiplier>& multipliers() const { return multipliers_; }
  const std::vector<PolyIdentity>& identities() const { return identities_; }
  /// One vector per decision polynomial; empty means no objective weight.
  const std::vector<std::vector<double>>& objective() const {
    return objective_;
  }

  int FindDecision(const std::string& name) const;
  int FindMultiplier(const std::string& name) const;

  /// Throws std::invalid_argument when indices, dimensions or objective
  /// lengths are inconsistent.
  void Validate() const;

 private:
  std::vector<DecisionPoly> decisions_;
  std::vector<SosMultiplier> multipliers_;
  std::vector<PolyIdentity> identities_;
  std::vector<std::vector<double>> objective_;
};

/// Monomials of degree ≤ target_degree/2 in `nvars` variables; the Gram
/// basis of an SOS polynomial of degree ≤ target_degree. Throws on odd
/// degree.
poly::MonomialBasis GramBasis(int nvars, int target_degree);

/// Largest even number ≤ d (and ≥ 0).
int FloorEven(int d);

}  // namespace sos
}  // namespace rroa
