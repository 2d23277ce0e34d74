#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "rroa/poly/basis.h"
#include "rroa/poly/polynomial.h"
#include "rroa/sos/extract.h"
#include "rroa/sos/sdp_problem.h"
#include "rroa/sos/solver.h"
#include "rroa/sos/sos_program.h"

namespace rroa {
namespace sos {
namespace {

using poly::Basis;
using poly::Monomial;
using poly::Polynomial;

Polynomial X(int n, int i) { return Polynomial::Variable(n, i); }
Polynomial One(int n) { return Polynomial::Constant(n, 1.0); }

// σ(x) = x² + c with σ SOS; minimise c.
SOSProgram ShiftedSquare(double sign_of_square = 1.0) {
  SOSProgram prog;
  const int c = prog.AddDecision("c", Basis(1, 0));
  const int s = prog.AddMultiplier("sigma", GramBasis(1, 2));
  PolyIdentity id;
  id.name = "sigma";
  id.nvars = 1;
  id.lhs.push_back(Term::Multiplier(s, One(1)));
  id.rhs.push_back(Term::Data(sign_of_square * X(1, 0) * X(1, 0)));
  id.rhs.push_back(Term::Decision(c, One(1)));
  prog.AddIdentity(id);
  prog.SetObjective(c, {1.0});
  return prog;
}

std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(GramBasisTest, Sizes) {
  EXPECT_EQ(GramBasis(2, 4).size(), 6u);
  EXPECT_EQ(GramBasis(3, 8).size(), 35u);
  EXPECT_EQ(GramBasis(2, 0).size(), 1u);
  EXPECT_THROW(GramBasis(2, 3), std::invalid_argument);
  EXPECT_THROW(GramBasis(2, -2), std::invalid_argument);
}

TEST(CompileTest, ToyShape) {
  const SOSProgram prog = ShiftedSquare();
  const SDPProblem sdp = Compile(prog);
  ASSERT_EQ(sdp.block_sizes, std::vector<int>{2});
  EXPECT_EQ(sdp.num_free, 1);
  EXPECT_EQ(sdp.num_rows, 3);
  EXPECT_EQ(sdp.c_free, std::vector<double>{1.0});
  // Rows in graded-lex order: 1, x, x².
  EXPECT_EQ(sdp.layout.row_monomial[0], Monomial{0});
  EXPECT_EQ(sdp.layout.row_monomial[2], Monomial{2});
  EXPECT_EQ(sdp.rhs, (std::vector<double>{0.0, 0.0, 1.0}));
}

TEST(CompileTest, DegreeBookkeepingViolationThrows) {
  SOSProgram prog = ShiftedSquare();
  PolyIdentity id = prog.identities()[0];
  id.matching_degree = 1;
  SOSProgram bad;
  bad.AddDecision("c", Basis(1, 0));
  bad.AddMultiplier("sigma", GramBasis(1, 2));
  bad.AddIdentity(id);
  EXPECT_THROW(Compile(bad), DegreeError);
}

TEST(CompileTest, ValidateRejectsDimensionMismatch) {
  SOSProgram prog;
  const int s = prog.AddMultiplier("sigma", GramBasis(2, 2));
  PolyIdentity id;
  id.name = "bad";
  id.nvars = 1;
  id.lhs.push_back(Term::Multiplier(s, One(1)));
  prog.AddIdentity(id);
  EXPECT_THROW(Compile(prog), std::invalid_argument);
}

TEST(CompileTest, DeterministicAndByteIdenticalDump) {
  // Decision polynomial composed with a map, plus a pruned multiplier.
  auto build = [] {
    SOSProgram prog;
    const int u = prog.AddDecision("u", Basis(2, 4));
    const int s0 = prog.AddMultiplier("s0", GramBasis(2, 8), true);
    const int s1 = prog.AddMultiplier("s1", GramBasis(2, 4));
    const Polynomial x = X(2, 0), y = X(2, 1);
    const std::vector<Polynomial> f{0.5 * x - x * y, -0.5 * y + x * y};
    PolyIdentity id;
    id.name = "decrease";
    id.nvars = 2;
    id.lhs.push_back(Term::Decision(u, One(2)));
    id.lhs.push_back(Term::Decision(u, -1.0 * One(2), f));
    id.rhs.push_back(Term::Multiplier(s0, One(2)));
    id.rhs.push_back(Term::Multiplier(s1, 1.6 * One(2) - x * x - y * y));
    prog.AddIdentity(id);
    std::vector<double> l(Basis(2, 4).size(), 0.0);
    l[0] = 1.0;
    prog.SetObjective(u, l);
    return prog;
  };
  const SOSProgram p1 = build();
  const SOSProgram p2 = build();
  const SDPProblem a = Compile(p1);
  const SDPProblem b = Compile(p2);
  EXPECT_TRUE(a.SameMatrices(b));
  const auto dir = std::filesystem::temp_directory_path() / "rroa_sos_dump";
  WriteSdpDump(a, p1, dir / "a");
  WriteSdpDump(b, p2, dir / "b");
  for (const char* f : {"sdp.txt", "rhs.txt", "manifest.json"}) {
    const std::string ta = ReadFile(dir / "a" / f);
    EXPECT_FALSE(ta.empty()) << f;
    EXPECT_EQ(ta, ReadFile(dir / "b" / f)) << f;
  }
  // u∘f has degree 8, so s0 keeps only monomials whose squares can be matched.
  EXPECT_LE(a.layout.multiplier_basis[0].size(), GramBasis(2, 8).size());
  std::filesystem::remove_all(dir);
}

TEST(SolveTest, ToyOptimum) {
  const SOSProgram prog = ShiftedSquare();
  const SDPProblem sdp = Compile(prog);
  const SDPSolution sol = Solve(sdp);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal) << sol.message;
  EXPECT_NEAR(sol.primal_objective, 0.0, 1e-6);
  const ExtractedValues v = Extract(sol, prog, sdp);
  EXPECT_NEAR(v.decisions[0].coefficient(Monomial{0}), 0.0, 1e-6);
  const Polynomial sigma = v.multipliers[0];
  EXPECT_NEAR(sigma.coefficient(Monomial{2}), 1.0, 1e-6);
  EXPECT_NEAR(sigma.coefficient(Monomial{1}), 0.0, 1e-6);
  EXPECT_NEAR(sigma.coefficient(Monomial{0}), 0.0, 1e-6);
  const auto res = IdentityResidual(prog, v);
  ASSERT_EQ(res.size(), 1u);
  EXPECT_LE(res[0], 1e-7);
  EXPECT_GE(sol.min_eigenvalue, -1e-8);
}

TEST(SolveTest, NegativeConstantIsInfeasible) {
  // σ = x² − 1 with nothing free: negative at 0.
  SOSProgram prog;
  const int s = prog.AddMultiplier("sigma", GramBasis(1, 2));
  PolyIdentity id;
  id.name = "sigma";
  id.nvars = 1;
  id.lhs.push_back(Term::Multiplier(s, One(1)));
  id.rhs.push_back(Term::Data(X(1, 0) * X(1, 0) - One(1)));
  prog.AddIdentity(id);
  const SDPProblem sdp = Compile(prog);
  const SDPSolution sol = Solve(sdp);
  EXPECT_EQ(sol.status, SolveStatus::kInfeasible) << sol.message;
  EXPECT_THROW(Extract(sol, prog, sdp), ExtractionError);
}

TEST(SolveTest, ContradictoryRowIsInfeasible) {
  SOSProgram prog;
  const int s = prog.AddMultiplier("sigma", GramBasis(1, 2));
  PolyIdentity id;
  id.name = "sigma";
  id.nvars = 1;
  id.lhs.push_back(Term::Multiplier(s, X(1, 0) * X(1, 0)));
  id.rhs.push_back(Term::Data(One(1)));  // constant row reads 0 = 1
  prog.AddIdentity(id);
  const SDPSolution sol = Solve(Compile(prog));
  EXPECT_EQ(sol.status, SolveStatus::kInfeasible);
}

TEST(SolveTest, GlobalMinimumOfBivariateQuartic) {
  // max γ s.t. x⁴ + y⁴ − 2xy − γ is SOS; the global minimum is −1/2.
  SOSProgram prog;
  const int g = prog.AddDecision("gamma", Basis(2, 0));
  const int s = prog.AddMultiplier("sigma", GramBasis(2, 4));
  const Polynomial x = X(2, 0), y = X(2, 1);
  PolyIdentity id;
  id.name = "lower bound";
  id.nvars = 2;
  id.lhs.push_back(Term::Data(x.pow(4) + y.pow(4) - 2.0 * x * y));
  id.lhs.push_back(Term::Decision(g, -1.0 * One(2)));
  id.rhs.push_back(Term::Multiplier(s, One(2)));
  prog.AddIdentity(id);
  prog.SetObjective(g, {-1.0});
  const SDPProblem sdp = Compile(prog);
  const SDPSolution sol = Solve(sdp);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal) << sol.message;
  EXPECT_NEAR(sol.primal_objective, 0.5, 1e-6);
  const ExtractedValues v = Extract(sol, prog, sdp);
  EXPECT_NEAR(v.decisions[0].coefficient(Monomial{0, 0}), -0.5, 1e-6);
  // Objective equals Σ l w recomputed from the extracted polynomial.
  EXPECT_NEAR(-v.decisions[0].coefficient(Monomial{0, 0}), sol.primal_objective,
              1e-6 * std::abs(sol.primal_objective));
}

TEST(SolveTest, RoundTripOnRandomFeasiblePrograms) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const SolverSettings settings;
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 1 + trial % 3;
    const int half = 1 + trial % 2;
    // p = Σ q_i², with q_i random of degree `half`.
    Polynomial p(n);
    for (int i = 0; i < 3; ++i) {
      Polynomial q(n);
      const poly::MonomialBasis qb = Basis(n, half);
      for (const auto& m : qb.elements()) q.AddTerm(m, unit(rng));
      p += q * q;
    }
    // Free decision u of degree 2 with p + u SOS and minimise a tilt of u.
    SOSProgram prog;
    const int u = prog.AddDecision("u", Basis(n, 2));
    const int s = prog.AddMultiplier("sigma", GramBasis(n, 2 * half));
    const int t = prog.AddMultiplier("tau", GramBasis(n, 2));
    PolyIdentity id;
    id.name = "p + u";
    id.nvars = n;
    id.lhs.push_back(Term::Data(p));
    id.lhs.push_back(Term::Decision(u, One(n)));
    id.rhs.push_back(Term::Multiplier(s, One(n)));
    prog.AddIdentity(id);
    PolyIdentity id2;
    id2.name = "u nonnegative";
    id2.nvars = n;
    id2.lhs.push_back(Term::Decision(u, One(n)));
    id2.rhs.push_back(Term::Multiplier(t, One(n)));
    prog.AddIdentity(id2);
    std::vector<double> l(Basis(n, 2).size(), 0.0);
    l[0] = 1.0;
    l.back() = 1.0;
    prog.SetObjective(u, l);

    const SDPProblem sdp = Compile(prog);
    const SDPSolution sol = Solve(sdp, settings);
    ASSERT_TRUE(sol.status == SolveStatus::kOptimal ||
                sol.status == SolveStatus::kNearOptimal)
        << ToString(sol.status) << " " << sol.message;
    const ExtractedValues v = Extract(sol, prog, sdp);
    for (double r : IdentityResidual(prog, v)) {
      EXPECT_LE(r, 10 * settings.feasibility_tol);
    }
    // Reassembled multipliers are pointwise nonnegative up to tolerance.
    for (std::size_t k = 0; k < v.multipliers.size(); ++k) {
      const double len = static_cast<double>(v.gram_bases[k].size());
      for (int sample = 0; sample < 200; ++sample) {
        std::vector<double> pt(n);
        for (auto& c : pt) c = unit(rng);
        double maxmono = 0.0;
        for (const auto& m : v.gram_bases[k].elements()) {
          maxmono = std::max(maxmono, std::abs(m.eval(pt)));
        }
        EXPECT_GE(v.multipliers[k].eval(pt),
                  -settings.eig_tol * len * maxmono * maxmono);
      }
    }
    double recomputed = 0.0;
    for (std::size_t a = 0; a < l.size(); ++a) {
      recomputed += l[a] * v.decisions[u].coefficient(Basis(n, 2)[a]);
    }
    EXPECT_NEAR(recomputed, sol.primal_objective,
                1e-6 * std::max(1.0, std::abs(recomputed)));
  }
}

TEST(ExtractTest, TamperedGramIsDetected) {
  const SOSProgram prog = ShiftedSquare();
  const SDPProblem sdp = Compile(prog);
  SDPSolution sol = Solve(sdp);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  sol.blocks[0](0, 0) += 0.1;
  const ExtractedValues v = Extract(sol, prog, sdp);
  EXPECT_GE(IdentityResidual(prog, v)[0], 0.09);
}

TEST(SolverFactoryTest, Names) {
  EXPECT_EQ(MakeSolver("ipm")->name(), "ipm");
  EXPECT_THROW(MakeSolver("nope"), std::invalid_argument);
  for (auto s : {SolveStatus::kOptimal, SolveStatus::kNearOptimal,
                 SolveStatus::kInfeasible, SolveStatus::kUnknown}) {
    EXPECT_EQ(SolveStatusFromString(ToString(s)), s);
  }
}

}  // namespace
}  // namespace sos
}  // namespace rroa
