#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "rroa/poly/basis.h"
#include "rroa/poly/polynomial.h"
#include "rroa/sos/sdp_problem.h"
#include "rroa/sos/solver.h"
#include "rroa/sos/sos_program.h"

namespace rroa {
namespace sos {

/// Numeric values of every polynomial in an SOSProgram, indexed like the
/// program's decision and multiplier lists.
struct ExtractedValues {
  std::vector<poly::Polynomial> decisions;
  std::vector<poly::Polynomial> multipliers;
  /// Gram matrix and basis actually used for each multiplier. A multiplier
  /// whose basis was pruned away has an empty basis and a 0×0 matrix.
  std::vector<poly::MonomialBasis> gram_bases;
  std::vector<Eigen::MatrixXd> grams;
};

class ExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// σ = m(y)ᵀ Q m(y).
poly::Polynomial GramToPolynomial(const poly::MonomialBasis& basis,
                                  const Eigen::MatrixXd& Q);

/// Throws ExtractionError unless `sol` is optimal or near-optimal.
ExtractedValues Extract(const SDPSolution& sol, const SOSProgram& prog,
                        const SDPProblem& sdp);

/// Expands both sides of `id` with the given numeric values and returns
/// lhs − rhs.
poly::Polynomial IdentityDifference(const PolyIdentity& id,
                                    const ExtractedValues& values);

/// Max-abs coefficient of lhs − rhs for every identity of `prog`.
std::vector<double> IdentityResidual(const SOSProgram& prog,
                                     const ExtractedValues& values);

}  // namespace sos
}  // namespace rroa
