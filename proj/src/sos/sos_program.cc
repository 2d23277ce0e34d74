#include "rroa/sos/sos_program.h"

#include <stdexcept>

namespace rroa {
namespace sos {

Term Term::Data(poly::Polynomial p) {
  Term t;
  t.kind = TermKind::kData;
  t.factor = std::move(p);
  return t;
}

Term Term::Decision(int index, poly::Polynomial factor,
                    std::vector<poly::Polynomial> substitution) {
  Term t;
  t.kind = TermKind::kDecision;
  t.index = index;
  t.factor = std::move(factor);
  t.substitution = std::move(substitution);
  return t;
}

Term Term::Multiplier(int index, poly::Polynomial factor) {
  Term t;
  t.kind = TermKind::kMultiplier;
  t.index = index;
  t.factor = std::move(factor);
  return t;
}

int SOSProgram::AddDecision(std::string name, poly::MonomialBasis basis) {
  decisions_.push_back({std::move(name), std::move(basis)});
  objective_.emplace_back();
  return static_cast<int>(decisions_.size()) - 1;
}

int SOSProgram::AddMultiplier(std::string name, poly::MonomialBasis gram_basis,
                              bool prune) {
  multipliers_.push_back({std::move(name), std::move(gram_basis), prune});
  return static_cast<int>(multipliers_.size()) - 1;
}

void SOSProgram::AddIdentity(PolyIdentity identity) {
  identities_.push_back(std::move(identity));
}

void SOSProgram::SetObjective(int decision_index, std::vector<double> l) {
  objective_.at(decision_index) = std::move(l);
}

int SOSProgram::FindDecision(const std::string& name) const {
  for (std::size_t i = 0; i < decisions_.size(); ++i) {
    if (decisions_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int SOSProgram::FindMultiplier(const std::string& name) const {
  for (std::size_t i = 0; i < multipliers_.size(); ++i) {
    if (multipliers_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

void SOSProgram::Validate() const {
  auto fail = [](const std::string& msg) {
    throw std::invalid_argument("SOSProgram: " + msg);
  };
  for (std::size_t k = 0; k < decisions_.size(); ++k) {
    const auto& l = objective_[k];
    if (!l.empty() && l.size() != decisions_[k].basis.size()) {
      fail("objective length mismatch for '" + decisions_[k].name + "'");
    }
  }
  for (const auto& id : identities_) {
    for (const auto* side : {&id.lhs, &id.rhs}) {
      for (const auto& t : *side) {
        if (t.factor.nvars() != id.nvars) {
          fail("identity '" + id.name + "': factor dimension mismatch");
        }
        switch (t.kind) {
          case TermKind::kData:
            break;
          case TermKind::kDecision: {
            if (t.index < 0 || t.index >= static_cast<int>(decisions_.size())) {
              fail("identity '" + id.name + "': bad decision index");
            }
            const int dn = decisions_[t.index].basis.nvars();
            if (t.substitution.empty()) {
              if (dn != id.nvars) {
                fail("identity '" + id.name +
                     "': decision needs a substitution map");
              }
            } else {
              if (static_cast<int>(t.substitution.size()) != dn) {
                fail("identity '" + id.name + "': substitution arity mismatch");
              }
              for (const auto& s : t.substitution) {
                if (s.nvars() != id.nvars) {
                  fail("identity '" + id.name +
                       "': substitution dimension mismatch");
                }
              }
            }
            break;
          }
          case TermKind::kMultiplier:
            if (t.index < 0 ||
                t.index >= static_cast<int>(multipliers_.size())) {
              fail("identity '" + id.name + "': bad multiplier index");
            }
            if (multipliers_[t.index].gram_basis.nvars() != id.nvars) {
              fail("identity '" + id.name + "': multiplier '" +
                   multipliers_[t.index].name + "' lives in other variables");
            }
            break;
        }
      }
    }
  }
}

poly::MonomialBasis GramBasis(int nvars, int target_degree) {
  if (target_degree < 0 || target_degree % 2 != 0) {
    throw std::invalid_argument("GramBasis: degree must be even and >= 0, got " +
                                std::to_string(target_degree));
  }
  return poly::Basis(nvars, target_degree / 2);
}

int FloorEven(int d) { return d <= 0 ? 0 : d - (d % 2); }

}  // namespace sos
}  // namespace rroa
