#include "rroa/model/assumptions.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "rroa/poly/basis.h"
#include "rroa/sos/extract.h"
#include "rroa/sos/sos_program.h"

namespace rroa {
namespace model {

using poly::Monomial;
using poly::MonomialBasis;
using poly::Polynomial;

std::string ToString(CheckStatus s) {
  switch (s) {
    case CheckStatus::kPass:
      return "pass";
    case CheckStatus::kFail:
      return "fail";
    case CheckStatus::kUnknown:
      return "unknown";
  }
  return "unknown";
}

StabilityReport CheckExponentialStability(const SystemModel& model,
                                          int d_samples) {
  StabilityReport r;
  r.note =
      "spectral radius of the Jacobian at the origin; a necessary condition "
      "for uniform local exponential stability, not a proof";
  const int n = model.n;
  std::vector<std::vector<Polynomial>> J(n, std::vector<Polynomial>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) J[i][j] = model.f[i].Differentiate(j);
  }
  r.disturbances = model.DisturbanceGrid(d_samples);
  std::vector<double> pt(n + model.m, 0.0);
  for (const auto& d : r.disturbances) {
    std::copy(d.begin(), d.end(), pt.begin() + n);
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) A(i, j) = J[i][j].eval(pt);
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    const double rho = es.eigenvalues().cwiseAbs().maxCoeff();
    r.spectral_radii.push_back(rho);
    r.max_radius = std::max(r.max_radius, rho);
  }
  r.pass = r.max_radius < 1.0 - r.margin;
  return r;
}

CheckSettings DefaultCheckSettings(const SystemModel& model) {
  CheckSettings s;
  s.solver.feasibility_tol = model.solver.feasibility_tol;
  s.solver.gap_tol = model.solver.gap_tol;
  s.solver.eig_tol = model.solver.eig_tol;
  s.solver.max_iterations = model.solver.max_iterations;
  return s;
}

namespace {

int CeilEven(int d) { return d <= 0 ? 0 : d + (d % 2); }

MonomialBasis FilteredGram(int nvars, int degree,
                           const std::function<bool(const Monomial&)>& keep) {
  const MonomialBasis full = sos::GramBasis(nvars, degree);
  std::vector<Monomial> out;
  for (const auto& m : full.elements()) {
    if (keep(m)) out.push_back(m);
  }
  return MonomialBasis(nvars, full.maxdeg(), std::move(out));
}

// target ≡ s0 + Σ_i s_i·g_i with s_i SOS, solved as a feasibility problem.
SosCheckPart PutinarCheck(const std::string& name, const Polynomial& target,
                          const std::vector<Polynomial>& gs,
                          const CheckSettings& settings,
                          const std::function<bool(const Monomial&)>& keep) {
  const auto t0 = std::chrono::steady_clock::now();
  SosCheckPart part;
  part.name = name;
  const int nv = target.nvars();
  int deg = target.degree();
  for (const auto& g : gs) deg = std::max(deg, g.degree());
  deg = CeilEven(deg) + settings.extra_degree;

  sos::SOSProgram prog;
  sos::PolyIdentity id;
  id.name = name;
  id.nvars = nv;
  id.lhs.push_back(sos::Term::Data(target));
  const int s0 = prog.AddMultiplier("s0", FilteredGram(nv, deg, keep), true);
  id.rhs.push_back(sos::Term::Multiplier(s0, Polynomial::Constant(nv, 1.0)));
  for (std::size_t i = 0; i < gs.size(); ++i) {
    const int d = sos::FloorEven(deg - gs[i].degree());
    const int si = prog.AddMultiplier("s" + std::to_string(i + 1),
                                      FilteredGram(nv, d, keep));
    id.rhs.push_back(sos::Term::Multiplier(si, gs[i]));
  }
  prog.AddIdentity(id);

  const sos::SDPProblem sdp = sos::Compile(prog);
  const sos::SDPSolution sol = sos::Solve(sdp, settings.solver);
  part.solver_status = sol.status;
  part.min_eigenvalue = sol.min_eigenvalue;
  part.message = sol.message;
  if (sol.status == sos::SolveStatus::kInfeasible) {
    part.status = CheckStatus::kFail;
  } else if (sol.status == sos::SolveStatus::kOptimal ||
             sol.status == sos::SolveStatus::kNearOptimal) {
    const auto values = sos::Extract(sol, prog, sdp);
    part.identity_residual = sos::IdentityResidual(prog, values).at(0);
    const bool ok = part.identity_residual <= settings.residual_tol &&
                    sol.min_eigenvalue >= -settings.solver.eig_tol;
    part.status = ok ? CheckStatus::kPass : CheckStatus::kUnknown;
  }
  part.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                     .count();
  return part;
}

CheckStatus Combine(const std::vector<SosCheckPart>& parts) {
  bool all_pass = true;
  for (const auto& p : parts) {
    if (p.status == CheckStatus::kFail) return CheckStatus::kFail;
    all_pass &= p.status == CheckStatus::kPass;
  }
  return all_pass ? CheckStatus::kPass : CheckStatus::kUnknown;
}

}  // namespace

FeasibilityReport CheckReachBound(const SystemModel& model,
                                  const CheckSettings& settings) {
  const int n = model.n;
  const int nv = n + model.m;
  FeasibilityReport r;
  r.name = "reach-bound";
  const auto all = [](const Monomial&) { return true; };

  Polynomial target = Polynomial::Constant(nv, model.R2);
  for (const auto& fi : model.f) target -= fi * fi;
  std::vector<Polynomial> gs;
  for (const auto& h : model.XPolys()) {
    gs.push_back(Polynomial::Constant(nv, 1.0) - h.Embed(nv, 0));
  }
  for (const auto& h : model.DPolys()) gs.push_back(-h.Embed(nv, n));
  r.parts.push_back(PutinarCheck("one-step reach inside ball", target, gs,
                                 settings, all));

  std::vector<Polynomial> gx;
  for (const auto& h : model.XPolys()) gx.push_back(Polynomial::Constant(n, 1.0) - h);
  r.parts.push_back(PutinarCheck("X inside ball",
                                 Polynomial::Constant(n, model.R2) - model.h0(),
                                 gx, settings, all));
  r.status = Combine(r.parts);
  return r;
}

FeasibilityReport CheckSeedLyapunov(const SystemModel& model,
                                    const CheckSettings& settings) {
  const int n = model.n;
  const int nv = n + model.m;
  FeasibilityReport r;
  r.name = "seed-lyapunov";

  const Polynomial h_inf = model.h_inf.Embed(nv, 0);
  const Polynomial h_inf_f = poly::Compose(model.h_inf, model.f);
  const Polynomial target =
      h_inf - h_inf_f - model.solver.lyapunov_slack * model.h0().Embed(nv, 0);
  std::vector<Polynomial> gs{Polynomial::Constant(nv, 1.0) - h_inf};
  for (const auto& h : model.DPolys()) gs.push_back(-h.Embed(nv, n));
  const auto positive_x = [n](const Monomial& m) {
    for (int i = 0; i < n; ++i) {
      if (m[i] > 0) return true;
    }
    return false;
  };
  r.parts.push_back(
      PutinarCheck("seed decrease", target, gs, settings, positive_x));

  const auto all = [](const Monomial&) { return true; };
  const std::vector<Polynomial> gx{Polynomial::Constant(n, 1.0) - model.h_inf};
  int j = 0;
  for (const auto& h : model.XPolys()) {
    r.parts.push_back(PutinarCheck("seed inside X (h" + std::to_string(++j) + ")",
                                   Polynomial::Constant(n, 1.0) - h, gx, settings,
                                   all));
  }
  r.status = Combine(r.parts);
  return r;
}

ArchimedeanReport CheckArchimedeanD(const SystemModel& model) {
  ArchimedeanReport r;
  const int m = model.m;
  const auto& cs = model.D.constraints;
  for (std::size_t k = 0; k < cs.size(); ++k) {
    const Polynomial& h = cs[k].h;
    // h − bound must equal Σ d_i² − R_D.
    Polynomial ball(m);
    for (int i = 0; i < m; ++i) {
      const Monomial v = Monomial::Variable(m, i);
      ball.AddTerm(v * v, 1.0);
    }
    const Polynomial rest = h - ball;
    bool match = true;
    double constant = -cs[k].bound;
    for (const auto& [mono, c] : rest.terms()) {
      if (mono.degree() == 0) {
        constant += c;
      } else if (std::abs(c) > 1e-12) {
        match = false;
      }
    }
    if (match && -constant >= -1e-12) {
      r.found = true;
      r.R_D = std::max(0.0, -constant);
      r.constraint_index = static_cast<int>(k);
      return r;
    }
  }
  try {
    double s = 0.0;
    for (const auto& [lo, hi] : model.DisturbanceBox()) {
      s += std::max(lo * lo, hi * hi);
    }
    r.suggested_R_D = s;
  } catch (const ModelValidationError&) {
    r.suggested_R_D = 0.0;
  }
  return r;
}

}  // namespace model
}  // namespace rroa
