#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

#include "rroa/sos/sdp_problem.h"

namespace rroa {
namespace sos {

using poly::Monomial;
using poly::MonomialBasis;
using poly::MonomialHash;
using poly::Polynomial;

namespace {

using MonoSet = std::unordered_set<Monomial, MonomialHash>;

struct RowAccumulator {
  double constant{0.0};
  std::map<int, double> free;
  std::map<std::tuple<int, int, int>, double> block;
};

// factor · (b_k ∘ substitution) for every basis element b_k.
std::vector<Polynomial> ExpandDecision(const DecisionPoly& dec, const Term& t,
                                       int nvars) {
  std::vector<Polynomial> out;
  out.reserve(dec.basis.size());
  if (t.substitution.empty()) {
    for (const auto& b : dec.basis.elements()) {
      out.push_back(t.factor * Polynomial::FromMonomial(b));
    }
    return out;
  }
  const int dn = dec.basis.nvars();
  std::vector<std::vector<Polynomial>> powers(dn);
  for (int i = 0; i < dn; ++i) {
    int maxexp = 0;
    for (const auto& b : dec.basis.elements()) maxexp = std::max(maxexp, b[i]);
    powers[i].push_back(Polynomial::Constant(nvars, 1.0));
    for (int e = 1; e <= maxexp; ++e) {
      powers[i].push_back(powers[i].back() * t.substitution[i]);
    }
  }
  for (const auto& b : dec.basis.elements()) {
    Polynomial p = t.factor;
    for (int i = 0; i < dn; ++i) {
      if (b[i] > 0) p = p * powers[i][b[i]];
    }
    out.push_back(std::move(p));
  }
  return out;
}

// Drops Gram monomials b whose square is outside `support` and is not the
// product of two distinct kept monomials: the matching row then forces
// Q_bb = 0, hence the whole row/column of Q vanishes.
std::vector<Monomial> PruneGram(const MonomialBasis& full,
                                const MonoSet& support) {
  std::vector<Monomial> keep = full.elements();
  for (;;) {
    MonoSet pair_products;
    for (std::size_t i = 0; i < keep.size(); ++i) {
      for (std::size_t j = i + 1; j < keep.size(); ++j) {
        pair_products.insert(keep[i] * keep[j]);
      }
    }
    std::vector<Monomial> next;
    for (const auto& b : keep) {
      const Monomial sq = b * b;
      if (support.count(sq) > 0 || pair_products.count(sq) > 0) next.push_back(b);
    }
    if (next.size() == keep.size()) break;
    keep = std::move(next);
  }
  return keep;
}

void AddSupport(const Polynomial& p, MonoSet& out) {
  for (const auto& [m, _] : p.terms()) out.insert(m);
}

void AddGramSupport(const MonomialBasis& basis, const Polynomial& factor,
                    MonoSet& out) {
  for (std::size_t p = 0; p < basis.size(); ++p) {
    for (std::size_t q = p; q < basis.size(); ++q) {
      const Monomial pq = basis[p] * basis[q];
      for (const auto& [g, _] : factor.terms()) out.insert(pq * g);
    }
  }
}

bool IsConstant(const Polynomial& p) {
  return p.num_terms() == 1 && p.terms().begin()->first.degree() == 0;
}

}  // namespace

SDPProblem Compile(const SOSProgram& prog) {
  prog.Validate();
  const auto& decisions = prog.decisions();
  const auto& multipliers = prog.multipliers();
  const auto& identities = prog.identities();

  // Expanded decision terms, keyed by (identity, side, term index).
  std::map<std::tuple<int, int, int>, std::vector<Polynomial>> expanded;
  for (std::size_t id = 0; id < identities.size(); ++id) {
    const auto& ident = identities[id];
    for (int side = 0; side < 2; ++side) {
      const auto& terms = side == 0 ? ident.lhs : ident.rhs;
      for (std::size_t t = 0; t < terms.size(); ++t) {
        if (terms[t].kind != TermKind::kDecision) continue;
        expanded[{static_cast<int>(id), side, static_cast<int>(t)}] =
            ExpandDecision(decisions[terms[t].index], terms[t], ident.nvars);
      }
    }
  }

  // Occurrence count per multiplier, for the pruning precondition.
  std::vector<int> uses(multipliers.size(), 0);
  for (const auto& ident : identities) {
    for (const auto* side : {&ident.lhs, &ident.rhs}) {
      for (const auto& t : *side) {
        if (t.kind == TermKind::kMultiplier) ++uses[t.index];
      }
    }
  }

  SDPProblem sdp;
  CompileLayout& layout = sdp.layout;
  layout.multiplier_basis.resize(multipliers.size());
  for (std::size_t k = 0; k < multipliers.size(); ++k) {
    layout.multiplier_basis[k] = multipliers[k].gram_basis;
  }

  for (std::size_t id = 0; id < identities.size(); ++id) {
    const auto& ident = identities[id];
    for (int side = 0; side < 2; ++side) {
      const auto& terms = side == 0 ? ident.lhs : ident.rhs;
      for (std::size_t t = 0; t < terms.size(); ++t) {
        const Term& term = terms[t];
        if (term.kind != TermKind::kMultiplier) continue;
        const auto& mult = multipliers[term.index];
        if (!mult.prune || uses[term.index] != 1 || !IsConstant(term.factor)) {
          continue;
        }
        MonoSet support;
        for (int s2 = 0; s2 < 2; ++s2) {
          const auto& terms2 = s2 == 0 ? ident.lhs : ident.rhs;
          for (std::size_t t2 = 0; t2 < terms2.size(); ++t2) {
            if (s2 == side && t2 == t) continue;
            const Term& other = terms2[t2];
            switch (other.kind) {
              case TermKind::kData:
                AddSupport(other.factor, support);
                break;
              case TermKind::kDecision:
                for (const auto& p : expanded.at({static_cast<int>(id), s2,
                                                  static_cast<int>(t2)})) {
                  AddSupport(p, support);
                }
                break;
              case TermKind::kMultiplier:
                AddGramSupport(multipliers[other.index].gram_basis,
                               other.factor, support);
                break;
            }
          }
        }
        auto kept = PruneGram(mult.gram_basis, support);
        layout.multiplier_basis[term.index] = MonomialBasis(
            mult.gram_basis.nvars(), mult.gram_basis.maxdeg(), std::move(kept));
      }
    }
  }

  // Variable layout.
  for (const auto& dec : decisions) {
    layout.decision_offset.push_back(sdp.num_free);
    sdp.num_free += static_cast<int>(dec.basis.size());
  }
  layout.multiplier_block.assign(multipliers.size(), -1);
  for (std::size_t k = 0; k < multipliers.size(); ++k) {
    const int size = static_cast<int>(layout.multiplier_basis[k].size());
    if (size == 0) continue;
    layout.multiplier_block[k] = static_cast<int>(sdp.block_sizes.size());
    sdp.block_sizes.push_back(size);
  }
  sdp.block_entries.resize(sdp.block_sizes.size());

  // Coefficient matching.
  for (std::size_t id = 0; id < identities.size(); ++id) {
    const auto& ident = identities[id];
    std::map<Monomial, RowAccumulator, poly::GradedLexLess> rows;
    for (int side = 0; side < 2; ++side) {
      const double sign = side == 0 ? 1.0 : -1.0;
      const auto& terms = side == 0 ? ident.lhs : ident.rhs;
      for (std::size_t t = 0; t < terms.size(); ++t) {
        const Term& term = terms[t];
        switch (term.kind) {
          case TermKind::kData:
            for (const auto& [m, c] : term.factor.terms()) {
              rows[m].constant += sign * c;
            }
            break;
          case TermKind::kDecision: {
            const auto& polys =
                expanded.at({static_cast<int>(id), side, static_cast<int>(t)});
            const int offset = layout.decision_offset[term.index];
            for (std::size_t k = 0; k < polys.size(); ++k) {
              for (const auto& [m, c] : polys[k].terms()) {
                rows[m].free[offset + static_cast<int>(k)] += sign * c;
              }
            }
            break;
          }
          case TermKind::kMultiplier: {
            const int blk = layout.multiplier_block[term.index];
            if (blk < 0) break;
            const auto& basis = layout.multiplier_basis[term.index];
            for (std::size_t p = 0; p < basis.size(); ++p) {
              for (std::size_t q = p; q < basis.size(); ++q) {
                const Monomial pq = basis[p] * basis[q];
                for (const auto& [g, c] : term.factor.terms()) {
                  rows[pq * g].block[{blk, static_cast<int>(p),
                                      static_cast<int>(q)}] += sign * c;
                }
              }
            }
            break;
          }
        }
      }
    }

    int produced_degree = 0;
    for (const auto& [m, _] : rows) produced_degree = std::max(produced_degree, m.degree());
    if (ident.matching_degree && produced_degree > *ident.matching_degree) {
      throw DegreeError("identity '" + ident.name + "' produces degree " +
                        std::to_string(produced_degree) +
                        " above its matching degree " +
                        std::to_string(*ident.matching_degree));
    }
    layout.identity_degree.push_back(
        ident.matching_degree ? *ident.matching_degree : produced_degree);

    for (const auto& [m, acc] : rows) {
      bool has_var = false;
      for (const auto& [_, v] : acc.free) has_var |= std::abs(v) >= poly::kZeroThreshold;
      for (const auto& [_, v] : acc.block) has_var |= std::abs(v) >= poly::kZeroThreshold;
      // 0 = 0 rows carry no information; 0 = c ≠ 0 rows are kept so the
      // solver can report the contradiction.
      if (!has_var && std::abs(acc.constant) < poly::kZeroThreshold) continue;
      const int row = sdp.num_rows++;
      sdp.rhs.push_back(acc.constant == 0.0 ? 0.0 : -acc.constant);
      layout.row_identity.push_back(static_cast<int>(id));
      layout.row_monomial.push_back(m);
      for (const auto& [col, v] : acc.free) {
        if (std::abs(v) >= poly::kZeroThreshold) sdp.free_entries.push_back({row, col, v});
      }
      for (const auto& [key, v] : acc.block) {
        if (std::abs(v) < poly::kZeroThreshold) continue;
        const auto [blk, p, q] = key;
        sdp.block_entries[blk].push_back({row, p, q, v});
      }
    }
  }

  sdp.c_free.assign(sdp.num_free, 0.0);
  for (std::size_t k = 0; k < decisions.size(); ++k) {
    const auto& l = prog.objective()[k];
    for (std::size_t j = 0; j < l.size(); ++j) {
      sdp.c_free[layout.decision_offset[k] + j] = l[j];
    }
  }
  return sdp;
}

void WriteSdpDump(const SDPProblem& sdp, const SOSProgram& prog,
                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "sdp.txt");
    char buf[128];
    out << "# rows " << sdp.num_rows << " free " << sdp.num_free << " blocks";
    for (int s : sdp.block_sizes) out << " " << s;
    out << "\n# constraint block i j value (constraint 0 = objective, block 0 = "
           "free variables)\n";
    for (int j = 0; j < sdp.num_free; ++j) {
      if (sdp.c_free[j] == 0.0) continue;
      std::snprintf(buf, sizeof(buf), "0 0 %d %d %.17g\n", j + 1, j + 1,
                    sdp.c_free[j]);
      out << buf;
    }
    // Row-major over constraints: merge free and block entries per row.
    std::vector<std::vector<std::string>> lines(sdp.num_rows);
    for (const auto& e : sdp.free_entries) {
      std::snprintf(buf, sizeof(buf), "%d 0 %d %d %.17g\n", e.row + 1, e.col + 1,
                    e.col + 1, e.value);
      lines[e.row].emplace_back(buf);
    }
    for (std::size_t b = 0; b < sdp.block_entries.size(); ++b) {
      for (const auto& e : sdp.block_entries[b]) {
        std::snprintf(buf, sizeof(buf), "%d %zu %d %d %.17g\n", e.row + 1, b + 1,
                      e.i + 1, e.j + 1, e.value);
        lines[e.row].emplace_back(buf);
      }
    }
    for (const auto& row : lines) {
      for (const auto& l : row) out << l;
    }
  }
  {
    std::ofstream out(dir / "rhs.txt");
    char buf[64];
    for (double v : sdp.rhs) {
      std::snprintf(buf, sizeof(buf), "%.17g\n", v);
      out << buf;
    }
  }
  nlohmann::ordered_json manifest;
  const auto& layout = sdp.layout;
  manifest["num_rows"] = sdp.num_rows;
  manifest["num_free"] = sdp.num_free;
  manifest["block_sizes"] = sdp.block_sizes;
  auto& decs = manifest["decision_polynomials"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < prog.decisions().size(); ++k) {
    decs.push_back({{"name", prog.decisions()[k].name},
                    {"free_begin", layout.decision_offset[k]},
                    {"count", prog.decisions()[k].basis.size()}});
  }
  auto& mults = manifest["multipliers"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < prog.multipliers().size(); ++k) {
    mults.push_back({{"name", prog.multipliers()[k].name},
                     {"block", layout.multiplier_block[k]},
                     {"gram_size", layout.multiplier_basis[k].size()},
                     {"full_gram_size", prog.multipliers()[k].gram_basis.size()}});
  }
  auto& ids = manifest["identities"] = nlohmann::ordered_json::array();
  for (std::size_t id = 0; id < prog.identities().size(); ++id) {
    int first = -1, count = 0;
    for (int r = 0; r < sdp.num_rows; ++r) {
      if (layout.row_identity[r] != static_cast<int>(id)) continue;
      if (first < 0) first = r;
      ++count;
    }
    ids.push_back({{"name", prog.identities()[id].name},
                   {"row_begin", first},
                   {"row_count", count},
                   {"matching_degree", layout.identity_degree[id]}});
  }
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << "\n";
}

}  // namespace sos
}  // namespace rroa
