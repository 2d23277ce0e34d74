// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
//
//   acceptance [--only N ...] [--known-failure N ...] [--extended]
//
// Exit status is 0 iff every criterion run either passes or is listed with
// --known-failure and fails. A listed criterion that passes is an error, so
// the list cannot go stale.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rroa/model/assumptions.h"
#include "rroa/model/system_model.h"
#include "rroa/oracle/grid_field.h"
#include "rroa/oracle/max_roa.h"
#include "rroa/oracle/value_iteration.h"
#include "rroa/poly/basis.h"
#include "rroa/poly/moments.h"
#include "rroa/poly/polynomial.h"
#include "rroa/roa/roa.h"
#include "rroa/sos/sdp_problem.h"

namespace {

using namespace rroa;  // NOLINT
using model::SystemModel;
using oracle::GridField;
using poly::Monomial;
using poly::Polynomial;

const std::string kModels = RROA_MODELS_DIR;
constexpr std::size_t kQmcPoints = 2000000;

double Seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Outcome {
  bool pass{true};
  std::vector<std::string> notes;

  void Check(bool ok, const std::string& what) {
    pass &= ok;
    notes.push_back((ok ? "ok   " : "FAIL ") + what);
  }
  void Note(const std::string& what) { notes.push_back("     " + what); }
};

std::string Fmt(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
std::string Fmt(const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, ap);
  va_end(ap);
  return buf;
}

// Shared state: models, certificates and oracle fields computed once.
class Fixture {
 public:
  const SystemModel& Ex1() {
    if (!ex1_) ex1_ = model::LoadModelFile(kModels + "/predator_prey.toy");
    return *ex1_;
  }
  const SystemModel& Ex2() {
    if (!ex2_) ex2_ = model::LoadModelFile(kModels + "/lotka_volterra3.toy");
    return *ex2_;
  }
  const roa::RoaCertificate& Cert(int example, int k) {
    auto key = std::make_pair(example, k);
    auto it = certs_.find(key);
    if (it != certs_.end()) return it->second;
    const SystemModel& m = example == 1 ? Ex1() : Ex2();
    const auto t0 = std::chrono::steady_clock::now();
    roa::RoaCertificate c = roa::ComputeRoa(m, roa::ConfigFor(m, k));
    solve_seconds_[key] = Seconds(t0);
    return certs_.emplace(key, std::move(c)).first->second;
  }
  double SolveSeconds(int example, int k) { return solve_seconds_[{example, k}]; }

  const oracle::ViResult& Vi(int example) {
    auto it = vi_.find(example);
    if (it != vi_.end()) return it->second;
    oracle::ViSettings s;  // 101 nodes for n = 2, 61 for n = 3; 11-point D grid
    return vi_.emplace(example, oracle::ValueIteration(example == 1 ? Ex1() : Ex2(), s))
        .first->second;
  }

 private:
  std::optional<SystemModel> ex1_, ex2_;
  std::map<std::pair<int, int>, roa::RoaCertificate> certs_;
  std::map<std::pair<int, int>, double> solve_seconds_;
  std::map<int, oracle::ViResult> vi_;
};

GridField MaskOf(const GridField& shape, const std::function<bool(const std::vector<double>&)>& in) {
  GridField g = shape;
  for (std::size_t f = 0; f < g.size(); ++f) g.values[f] = in(g.Point(f)) ? 1.0 : 0.0;
  return g;
}

// 1. Example 1, k = 6.
Outcome Criterion1(Fixture& fx) {
  Outcome o;
  const auto& m = fx.Ex1();
  const auto& c = fx.Cert(1, 6);
  o.Check(c.status == sos::SolveStatus::kOptimal,
          "status " + sos::ToString(c.status) + (c.solver_message.empty() ? "" : " (" + c.solver_message + ")"));
  const GridField sign = roa::SignGrid(c, 401);
  const GridField seed = MaskOf(sign, [&](const auto& x) { return m.InXinf(x); });
  const GridField inX = MaskOf(sign, [&](const auto& x) { return m.InX(x); });
  o.Check(sign.Count(0.5) > 0, Fmt("{u<1} has %zu of %zu nodes", sign.Count(0.5), sign.size()));
  const auto seed_out = oracle::CountInteriorViolations(seed, sign, 1);
  o.Check(seed_out == 0, Fmt("seed-set nodes outside {u<1} beyond one cell: %zu (raw %zu)",
                             seed_out, oracle::CountViolations(seed, sign)));
  const auto outside_x = oracle::CountInteriorViolations(sign, inX, 1);
  o.Check(outside_x == 0, Fmt("{u<1} nodes outside X beyond one cell: %zu (raw %zu)",
                              outside_x, oracle::CountViolations(sign, inX)));
  const double t = fx.SolveSeconds(1, 6);
  o.Check(t <= 120.0, Fmt("pipeline time %.2f s (budget 120 s)", t));
  return o;
}

// 2. Trajectory semantics for Example 1, k = 6 and 10.
Outcome Criterion2(Fixture& fx) {
  Outcome o;
  for (int k : {6, 10}) {
    const auto& c = fx.Cert(1, k);
    roa::RoaConfig cfg = c.config;
    cfg.samples = 1000;
    cfg.policies = 50;
    cfg.horizon = 200;
    cfg.seed = 42;
    const roa::CertReport r = roa::Certify(c, fx.Ex1(), cfg);
    o.Check(c.ok(), Fmt("k=%d status %s", k, sos::ToString(c.status).c_str()));
    o.Check(r.states == 1000, Fmt("k=%d drew %zu states", k, r.states));
    o.Check(r.trajectories > 0 && r.stayed_in_X == r.trajectories,
            Fmt("k=%d stayed in X: %zu/%zu", k, r.stayed_in_X, r.trajectories));
    o.Check(r.trajectories > 0 && r.hit_Xinf == r.trajectories,
            Fmt("k=%d reached the seed set: %zu/%zu (policies %zu)", k, r.hit_Xinf,
                r.trajectories, r.policy_count));
  }
  return o;
}

// 3. Identity residuals of every gating solve.
Outcome Criterion3(Fixture& fx, bool extended) {
  Outcome o;
  std::vector<std::pair<int, int>> runs{{1, 6}, {1, 10}, {2, 4}, {2, 6}};
  if (extended) runs.push_back({2, 8});
  for (auto [e, k] : runs) {
    const auto& c = fx.Cert(e, k);
    o.Check(c.ok() && c.max_residual <= 1e-5,
            Fmt("example %d k=%d: %s, max residual %.2e, %.1f s", e, k,
                sos::ToString(c.status).c_str(), c.max_residual, fx.SolveSeconds(e, k)));
  }
  if (!extended) o.Note("example 2 k=8 runs in the extended suite");
  return o;
}

// 4. Value-iteration field below the certificates.
Outcome Criterion4(Fixture& fx) {
  Outcome o;
  const auto& vi = fx.Vi(1);
  o.Check(vi.converged && vi.deltas.back() < 1e-6,
          Fmt("VI on %d^2 nodes: %d sweeps, last change %.2e", vi.v.axes[0].nodes,
              vi.iterations, vi.deltas.back()));
  double excess[2];
  int i = 0;
  for (int k : {6, 10}) {
    const auto rep = oracle::CompareUpper(fx.Cert(1, k).u, vi.v, fx.Ex1().R2, true);
    excess[i++] = rep.max_excess;
    std::string where;
    if (!rep.location.empty()) where = Fmt(" at (%.3f, %.3f)", rep.location[0], rep.location[1]);
    o.Check(rep.max_excess <= 0.05,
            Fmt("k=%d max interior (v-u)+ = %.4f%s over %zu nodes", k, rep.max_excess,
                where.c_str(), rep.nodes_checked));
  }
  o.Check(excess[1] <= excess[0] + 1e-3,
          Fmt("excess k=10 %.4f <= excess k=6 %.4f + 1e-3", excess[1], excess[0]));
  return o;
}

// 5. k = 10 set inside the simulated maximal ROA.
Outcome Criterion5(Fixture& fx) {
  Outcome o;
  const auto& m = fx.Ex1();
  const GridField sign = roa::SignGrid(fx.Cert(1, 10), 401);
  GridField sim = sign;
  oracle::MaxRoaSettings s;  // K = 200, 11-point D grid, 50 policies, seed 42
  oracle::GridMaxRoa(m, fx.Vi(1).v, s, sim);
  const auto bad = oracle::CountInteriorViolations(sign, sim, 1);
  o.Check(bad == 0, Fmt("{u10<1} nodes outside the simulated mask beyond one cell: %zu "
                        "(raw %zu; certificate %zu, simulated %zu nodes of 401^2)",
                        bad, oracle::CountViolations(sign, sim), sign.Count(0.5), sim.Count(0.5)));
  return o;
}

// 6. Area grows with the degree.
Outcome Criterion6(Fixture& fx) {
  Outcome o;
  const GridField s6 = roa::SignGrid(fx.Cert(1, 6), 401);
  const GridField s10 = roa::SignGrid(fx.Cert(1, 10), 401);
  const double cell = s6.cell_volume();
  const double a6 = s6.Count(0.5) * cell, a10 = s10.Count(0.5) * cell;
  const double slack = oracle::CountBoundaryNodes(s6) * cell;
  o.Check(a10 >= a6 - slack,
          Fmt("area k=10 %.5f >= area k=6 %.5f - boundary %.5f", a10, a6, slack));
  return o;
}

// 7. Example 2, k = 4 on the three coordinate planes.
Outcome Criterion7(Fixture& fx) {
  Outcome o;
  const auto& m = fx.Ex2();
  const auto& c = fx.Cert(2, 4);
  o.Check(c.status == sos::SolveStatus::kOptimal,
          Fmt("status %s, p* = %.6f, u(0) = %.4g", sos::ToString(c.status).c_str(), c.objective,
              c.u.eval(std::vector<double>{0, 0, 0})));
  // u ≡ 1 is always feasible and has objective vol(B) − vol(X∞). A solved
  // objective within the solver's own accuracy of that value cannot tell the
  // certificate apart from the empty set, whatever the sign grid says.
  const poly::MonomialBasis b0(m.n, 0, {Monomial(m.n)});
  const double trivial = poly::BallMoment(Monomial(m.n), m.R2, m.n) -
                         poly::SublevelMoments(b0, m.h_inf, m.R2)[0];
  const double margin = trivial - c.objective;
  const double accuracy = c.config.solver.gap_tol * std::max(1.0, std::abs(c.objective));
  o.Check(margin > accuracy,
          Fmt("objective %.7f vs %.7f for u = 1: margin %.2e, solver accuracy %.2e",
              c.objective, trivial, margin, accuracy));
  const auto& vi = fx.Vi(2);
  o.Note(Fmt("VI on %d^3 nodes: %s after %d sweeps", vi.v.axes[0].nodes,
             vi.converged ? "converged" : "not converged", vi.iterations));
  const char* names[] = {"x", "y", "z"};
  for (int axis = 0; axis < 3; ++axis) {
    const GridField sign = roa::SignGrid(c, 201, axis, 0.0);
    GridField sim = sign;
    oracle::GridMaxRoa(m, vi.v, oracle::MaxRoaSettings{}, sim);
    const GridField val = roa::ValueGrid(c, 201, axis, 0.0);
    const double depth = 1.0 - *std::min_element(val.values.begin(), val.values.end());
    o.Check(sign.Count(0.5) > 0,
            Fmt("%s=0: {u<1} has %zu of %zu nodes, depth 1 - min u = %.2e (simulated %zu)",
                names[axis], sign.Count(0.5), sign.size(), depth, sim.Count(0.5)));
    const auto bad = oracle::CountInteriorViolations(sign, sim, 1);
    o.Check(bad == 0, Fmt("%s=0: nodes outside the simulated mask beyond one cell: %zu",
                          names[axis], bad));
  }
  return o;
}

// 8. Assumption checks on both models.
Outcome Criterion8(Fixture& fx) {
  Outcome o;
  for (int e : {1, 2}) {
    const SystemModel& m = e == 1 ? fx.Ex1() : fx.Ex2();
    const auto settings = model::DefaultCheckSettings(m);
    o.Check(m.R2 == 1.6, Fmt("example %d: R2 = %g", e, m.R2));
    const auto stab = model::CheckExponentialStability(m);
    o.Check(stab.pass, Fmt("example %d: stability, spectral radius %.3f", e, stab.max_radius));
    for (const auto& rep : {model::CheckReachBound(m, settings), model::CheckSeedLyapunov(m, settings)}) {
      std::string parts;
      for (const auto& p : rep.parts) {
        parts += "; " + p.name + ": " + model::ToString(p.status) + " (" +
                 sos::ToString(p.solver_status) + ")";
      }
      o.Check(rep.status == model::CheckStatus::kPass,
              Fmt("example %d: %s %s", e, rep.name.c_str(), model::ToString(rep.status).c_str()) +
                  parts);
    }
    const auto arch = model::CheckArchimedeanD(m);
    o.Check(arch.found && std::abs(arch.R_D - 0.01) < 1e-12,
            Fmt("example %d: ball constraint on D with R_D = %g", e, arch.R_D));
  }
  return o;
}

// --- 9. Property suites -----------------------------------------------------

Polynomial RandomIntPoly(std::mt19937_64& rng, int n, int deg, int terms) {
  std::uniform_int_distribution<int> coeff(-3, 3);
  const auto b = poly::Basis(n, deg);
  std::uniform_int_distribution<std::size_t> pick(0, b.size() - 1);
  Polynomial p(n);
  for (int t = 0; t < terms; ++t) p.AddTerm(b[pick(rng)], coeff(rng));
  return p;
}

Polynomial RandomPoly(std::mt19937_64& rng, int n, int deg) {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  const auto b = poly::Basis(n, deg);
  Polynomial p(n);
  for (const auto& m : b.elements()) p.AddTerm(m, coeff(rng));
  return p;
}

// Rank-1 lattice (Kronecker) rule with golden-ratio generators over the box
// [-hw, hw]^n; integrates monomials over {inside}. If `abs_out` is set it
// receives the integrals of |x^α|, the scale the rule's error is relative to.
std::vector<double> KroneckerMoments(const std::vector<Monomial>& alphas, int n, double hw,
                                     const std::function<bool(const std::vector<double>&)>& inside,
                                     std::size_t N, std::vector<double>* abs_out = nullptr) {
  // Generalised golden ratio φ_n, root of x^(n+1) = x + 1.
  double phi = 2.0;
  for (int i = 0; i < 64; ++i) phi = std::pow(1.0 + phi, 1.0 / (n + 1));
  std::vector<double> gen(n);
  for (int d = 0; d < n; ++d) gen[d] = std::fmod(std::pow(1.0 / phi, d + 1), 1.0);
  std::vector<double> acc(alphas.size(), 0.0), mag(alphas.size(), 0.0);
  std::vector<double> x(n);
  for (std::size_t i = 1; i <= N; ++i) {
    for (int d = 0; d < n; ++d) {
      x[d] = hw * (2.0 * std::fmod(0.5 + gen[d] * static_cast<double>(i), 1.0) - 1.0);
    }
    if (!inside(x)) continue;
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      const double v = alphas[a].eval(x);
      acc[a] += v;
      mag[a] += std::abs(v);
    }
  }
  const double vol = std::pow(2.0 * hw, n) / static_cast<double>(N);
  for (double& v : acc) v *= vol;
  if (abs_out != nullptr) {
    for (double& v : mag) v *= vol;
    *abs_out = std::move(mag);
  }
  return acc;
}

Outcome Criterion9(Fixture& fx) {
  Outcome o;
  std::mt19937_64 rng(42);

  // Ring axioms, exact on small-integer coefficients.
  int ring_bad = 0;
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + t % 3;
    const auto p = RandomIntPoly(rng, n, 4, 6), q = RandomIntPoly(rng, n, 4, 6),
               r = RandomIntPoly(rng, n, 3, 5);
    const Polynomial zero(n), one = Polynomial::Constant(n, 1.0);
    ring_bad += !(p + q == q + p) + !(p * q == q * p) + !((p + q) + r == p + (q + r)) +
                !((p * q) * r == p * (q * r)) + !(p * (q + r) == p * q + p * r) +
                !(p + zero == p) + !(p * one == p) + !((p - p).is_zero());
  }
  o.Check(ring_bad == 0, Fmt("ring axioms on 200 random triples: %d violations", ring_bad));

  // Composition commutes with evaluation.
  double worst = 0.0;
  std::uniform_real_distribution<double> pt(-1.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + t % 2, nin = n + 1;
    const auto u = RandomPoly(rng, n, 4);
    std::vector<Polynomial> F;
    for (int i = 0; i < n; ++i) F.push_back(RandomPoly(rng, nin, 2));
    const auto uf = poly::Compose(u, F);
    for (int s = 0; s < 5; ++s) {
      std::vector<double> x(nin);
      for (auto& v : x) v = pt(rng);
      std::vector<double> y(n);
      for (int i = 0; i < n; ++i) y[i] = F[i].eval(x);
      const double a = uf.eval(x), b = u.eval(y);
      worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b)));
    }
  }
  o.Check(worst <= 1e-10, Fmt("compose/eval: worst relative gap %.2e", worst));

  // Ball and ellipsoid moments against quasi-Monte Carlo.
  double ball_worst = 0.0, ell_worst = 0.0;
  for (int n = 1; n <= 3; ++n) {
    std::vector<Monomial> even;
    const auto b8 = poly::Basis(n, 8);
    for (const auto& a : b8.elements()) {
      if (a.is_even()) even.push_back(a);
    }
    const double R2 = 1.6, hw = std::sqrt(R2);
    const auto qmc = KroneckerMoments(
        even, n, hw,
        [&](const auto& x) {
          double s = 0;
          for (double v : x) s += v * v;
          return s <= R2;
        },
        kQmcPoints);
    for (std::size_t a = 0; a < even.size(); ++a) {
      const double exact = poly::BallMoment(even[a], R2, n);
      ball_worst = std::max(ball_worst, std::abs(qmc[a] - exact) / exact);
    }
    if (n < 2) continue;
    Eigen::MatrixXd Q(n, n);
    if (n == 2) {
      Q << 3.0, 1.0, 1.0, 2.0;
    } else {
      Q << 3.0, 1.0, 0.5, 1.0, 2.0, 0.2, 0.5, 0.2, 1.5;
    }
    const double c = 1.2;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
    const double ehw = std::sqrt(c / es.eigenvalues().minCoeff());
    const auto all = poly::Basis(n, 8).elements();
    std::vector<double> scale;
    const auto eq = KroneckerMoments(
        all, n, ehw,
        [&](const auto& x) {
          const Eigen::Map<const Eigen::VectorXd> v(x.data(), n);
          return v.dot(Q * v) < c;
        },
        kQmcPoints, &scale);
    // Mixed moments of a tilted ellipsoid can nearly cancel, so the error is
    // measured against ∫|x^α|; for even α that is the plain relative error.
    for (std::size_t a = 0; a < all.size(); ++a) {
      const double exact = poly::EllipsoidMoment(all[a], Q, c);
      ell_worst = std::max(ell_worst, std::abs(eq[a] - exact) / scale[a]);
    }
  }
  o.Check(ball_worst <= 1e-2, Fmt("ball moments vs QMC, degree <= 8, n <= 3: worst relative %.2e", ball_worst));
  o.Check(ell_worst <= 1e-2, Fmt("ellipsoid moments vs QMC: worst error relative to the integral of |x^a| %.2e", ell_worst));

  // Value iteration: monotone sweeps and the Bellman residual.
  const auto& vi = fx.Vi(1);
  o.Check(vi.max_decrease <= 0.0, Fmt("VI sweeps monotone: largest decrease %.2e", vi.max_decrease));
  const auto bell = oracle::BellmanResidual(fx.Ex1(), vi.v, 11);
  o.Check(bell.node_residual <= 2e-6,
          Fmt("Bellman residual at %zu interior nodes %.2e (<= 2e-6); cell-centre slack %.2e",
              bell.nodes_checked, bell.node_residual, bell.midpoint_residual));

  // Compile determinism.
  const auto p1 = roa::BuildProgram(fx.Ex1(), roa::ConfigFor(fx.Ex1(), 6));
  const auto p2 = roa::BuildProgram(fx.Ex1(), roa::ConfigFor(fx.Ex1(), 6));
  const auto a = sos::Compile(p1), b = sos::Compile(p2);
  const auto dir = std::filesystem::temp_directory_path() / "rroa_acceptance_dump";
  sos::WriteSdpDump(a, p1, dir / "a");
  sos::WriteSdpDump(b, p2, dir / "b");
  bool same = a.SameMatrices(b);
  for (const char* f : {"sdp.txt", "rhs.txt", "manifest.json"}) {
    std::ifstream ia(dir / "a" / f), ib(dir / "b" / f);
    std::stringstream sa, sb;
    sa << ia.rdbuf();
    sb << ib.rdbuf();
    same &= !sa.str().empty() && sa.str() == sb.str();
  }
  std::filesystem::remove_all(dir);
  o.Check(same, "compile artifacts byte-identical across two builds");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only, known;
  bool extended = false;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if ((a == "--only" || a == "--known-failure") && i + 1 < argc) {
      (a == "--only" ? only : known).insert(std::atoi(argv[++i]));
    } else if (a == "--extended") {
      extended = true;
    } else {
      std::fprintf(stderr, "usage: %s [--only N] [--known-failure N] [--extended]\n", argv[0]);
      return 2;
    }
  }

  Fixture fx;
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, [&] { return Criterion1(fx); }}, {2, [&] { return Criterion2(fx); }},
      {3, [&] { return Criterion3(fx, extended); }}, {4, [&] { return Criterion4(fx); }},
      {5, [&] { return Criterion5(fx); }}, {6, [&] { return Criterion6(fx); }},
      {7, [&] { return Criterion7(fx); }}, {8, [&] { return Criterion8(fx); }},
      {9, [&] { return Criterion9(fx); }},
  };
  int unexpected = 0;
  std::vector<std::string> lines;
  for (const auto& [id, run] : criteria) {
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.Check(false, std::string("exception: ") + e.what());
    }
    const bool listed = known.count(id) > 0;
    std::string tag;
    if (o.pass && listed) {
      tag = " (listed as a known failure; remove it from the list)";
      ++unexpected;
    } else if (!o.pass && listed) {
      tag = " (known failure, see README)";
    } else if (!o.pass) {
      ++unexpected;
    }
    const std::string line =
        Fmt("criterion %d: %s%s  [%.1f s]", id, o.pass ? "PASS" : "FAIL", tag.c_str(), Seconds(t0));
    std::printf("%s\n", line.c_str());
    for (const auto& n : o.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
    lines.push_back(line);
  }
  std::printf("\nsummary\n");
  for (const auto& l : lines) std::printf("  %s\n", l.c_str());
  return unexpected == 0 ? 0 : 1;
}
