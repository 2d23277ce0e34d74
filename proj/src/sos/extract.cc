#include "rroa/sos/extract.h"

#include <string>

namespace rroa {
namespace sos {

using poly::Polynomial;

Polynomial GramToPolynomial(const poly::MonomialBasis& basis,
                            const Eigen::MatrixXd& Q) {
  const int n = static_cast<int>(basis.size());
  if (Q.rows() != n || Q.cols() != n) {
    throw std::invalid_argument("GramToPolynomial: Gram matrix is " +
                                std::to_string(Q.rows()) + "x" +
                                std::to_string(Q.cols()) + ", basis has " +
                                std::to_string(n) + " elements");
  }
  Polynomial p(basis.nvars());
  const auto& m = basis.elements();
  for (int i = 0; i < n; ++i) {
    p.AddTerm(m[i] * m[i], Q(i, i));
    for (int j = i + 1; j < n; ++j) {
      p.AddTerm(m[i] * m[j], Q(i, j) + Q(j, i));
    }
  }
  return p;
}

ExtractedValues Extract(const SDPSolution& sol, const SOSProgram& prog,
                        const SDPProblem& sdp) {
  if (sol.status != SolveStatus::kOptimal &&
      sol.status != SolveStatus::kNearOptimal) {
    throw ExtractionError("cannot extract from a solve with status '" +
                          ToString(sol.status) + "'");
  }
  const auto& layout = sdp.layout;
  ExtractedValues out;
  for (std::size_t k = 0; k < prog.decisions().size(); ++k) {
    const auto& dec = prog.decisions()[k];
    Polynomial u(dec.basis.nvars());
    const int off = layout.decision_offset.at(k);
    for (std::size_t a = 0; a < dec.basis.size(); ++a) {
      u.AddTerm(dec.basis.elements()[a], sol.free_values.at(off + a));
    }
    out.decisions.push_back(std::move(u));
  }
  for (std::size_t k = 0; k < prog.multipliers().size(); ++k) {
    const auto& basis = layout.multiplier_basis.at(k);
    const int blk = layout.multiplier_block.at(k);
    Eigen::MatrixXd Q = blk >= 0 ? sol.blocks.at(blk) : Eigen::MatrixXd(0, 0);
    Q = 0.5 * (Q + Q.transpose());
    out.multipliers.push_back(GramToPolynomial(basis, Q));
    out.gram_bases.push_back(basis);
    out.grams.push_back(std::move(Q));
  }
  return out;
}

Polynomial IdentityDifference(const PolyIdentity& id,
                              const ExtractedValues& values) {
  Polynomial diff(id.nvars);
  auto expand = [&](const Term& t) -> Polynomial {
    switch (t.kind) {
      case TermKind::kData:
        return t.factor;
      case TermKind::kDecision: {
        const Polynomial& u = values.decisions.at(t.index);
        if (t.substitution.empty()) return t.factor * u;
        return t.factor * poly::Compose(u, t.substitution);
      }
      case TermKind::kMultiplier:
        return t.factor * values.multipliers.at(t.index);
    }
    return Polynomial(id.nvars);
  };
  for (const auto& t : id.lhs) diff += expand(t);
  for (const auto& t : id.rhs) diff -= expand(t);
  return diff;
}

std::vector<double> IdentityResidual(const SOSProgram& prog,
                                     const ExtractedValues& values) {
  std::vector<double> out;
  for (const auto& id : prog.identities()) {
    out.push_back(IdentityDifference(id, values).max_abs_coefficient());
  }
  return out;
}

}  // namespace sos
}  // namespace rroa
