#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "rroa/poly/basis.h"
#include "rroa/poly/monomial.h"
#include "rroa/sos/sos_program.h"

namespace rroa {
namespace sos {

/// Entry (i, j), i ≤ j, of the symmetric constraint matrix A_row restricted
/// to one PSD block. `value` is the matrix entry, so an off-diagonal entry
/// contributes 2·value·X_ij to ⟨A_row, X⟩.
struct BlockEntry {
  int row;
  int i;
  int j;
  double value;
  bool operator==(const BlockEntry&) const = default;
};

struct FreeEntry {
  int row;
  int col;
  double value;
  bool operator==(const FreeEntry&) const = default;
};

/// Where each part of the SOS program landed in the SDP.
struct CompileLayout {
  /// First free-variable index of each decision polynomial; its length is
  /// the decision basis size.
  std::vector<int> decision_offset;
  /// Gram basis actually used per multiplier (after pruning).
  std::vector<poly::MonomialBasis> multiplier_basis;
  /// PSD block per multiplier; -1 if pruning emptied the basis (σ ≡ 0).
  std::vector<int> multiplier_block;
  /// Per row: identity index and matched monomial.
  std::vector<int> row_identity;
  std::vector<poly::Monomial> row_monomial;
  /// Matching degree used per identity.
  std::vector<int> identity_degree;
};

/// Standard conic form
///   minimise  c_freeᵀ w
///   s.t.      A_free w + Σ_b ⟨A_b, X_b⟩ = rhs,   X_b ⪰ 0,  w free.
/// One equality row per matched monomial of one identity.
struct SDPProblem {
  std::vector<int> block_sizes;
  int num_free{0};
  int num_rows{0};
  std::vector<double> rhs;
  std::vector<double> c_free;
  std::vector<FreeEntry> free_entries;
  /// Per block, entries sorted by (row, i, j).
  std::vector<std::vector<BlockEntry>> block_entries;
  CompileLayout layout;

  bool SameMatrices(const SDPProblem& o) const {
    return block_sizes == o.block_sizes && num_free == o.num_free &&
           num_rows == o.num_rows && rhs == o.rhs && c_free == o.c_free &&
           free_entries == o.free_entries && block_entries == o.block_entries;
  }
};

/// An identity term exceeds the declared matching degree.
class DegreeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Compiles `prog` into standard form by coefficient matching.
SDPProblem Compile(const SOSProgram& prog);

/// Sparse text dump (`row block i j value`, block 0 = free variables with
/// i = j = column) plus `manifest.json` mapping identities to rows and
/// polynomials to variable ranges. Byte-identical for identical problems.
void WriteSdpDump(const SDPProblem& sdp, const SOSProgram& prog,
                  const std::filesystem::path& dir);

}  // namespace sos
}  // namespace rroa
