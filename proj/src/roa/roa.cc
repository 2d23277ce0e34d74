#include "rroa/roa/roa.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "rroa/model/trajectory.h"
#include "rroa/poly/moments.h"
#include "rroa/sos/extract.h"
#include "rroa/sos/sdp_problem.h"
#include "rroa/util/parallel.h"

namespace rroa {
namespace roa {

using model::SystemModel;
using poly::Polynomial;
using sos::FloorEven;
using sos::GramBasis;
using sos::PolyIdentity;
using sos::Term;

namespace {

double Seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Degree of a multiplier attached to a companion of degree c in an identity
// whose data/decision side has degree `lhs_degree`.
int CompanionDegree(const RoaConfig& cfg, int lhs_degree, int c) {
  if (cfg.mult_degree) return *cfg.mult_degree;
  return FloorEven(lhs_degree - c);
}

}  // namespace

RoaConfig ConfigFor(const SystemModel& model, int k) {
  RoaConfig cfg;
  cfg.k = k;
  const auto it = model.solver.mult_degree.find(k);
  if (it != model.solver.mult_degree.end()) cfg.mult_degree = it->second;
  cfg.solver.feasibility_tol = model.solver.feasibility_tol;
  cfg.solver.gap_tol = model.solver.gap_tol;
  cfg.solver.eig_tol = model.solver.eig_tol;
  cfg.solver.max_iterations = model.solver.max_iterations;
  cfg.disturbance_grid = model.solver.disturbance_grid;
  return cfg;
}

sos::SOSProgram BuildProgram(const SystemModel& model, const RoaConfig& cfg,
                             ProgramIndex* index) {
  if (cfg.k < 2) throw std::invalid_argument("BuildProgram: k must be >= 2");
  if (cfg.mult_degree && (*cfg.mult_degree < 0 || *cfg.mult_degree % 2 != 0)) {
    throw std::invalid_argument("BuildProgram: multiplier degree must be even and >= 0");
  }
  const int n = model.n;
  const int nv = n + model.m;
  const int k = cfg.k;
  const Polynomial one_x = Polynomial::Constant(n, 1.0);
  const Polynomial one_xd = Polynomial::Constant(nv, 1.0);
  const Polynomial ball = Polynomial::Constant(n, model.R2) - model.h0();
  const Polynomial ball_xd = ball.Embed(nv, 0);
  const Polynomial g_xd = model.g.Embed(nv, 0);
  const auto hx = model.XPolys();
  const auto hd = model.DPolys();

  sos::SOSProgram prog;
  const int u = prog.AddDecision("u", poly::Basis(n, k));
  std::vector<Polynomial> embed_x;
  for (int i = 0; i < n; ++i) embed_x.push_back(Polynomial::Variable(nv, i));

  // Family A.
  {
    int fdeg = 0;
    for (const auto& fi : model.f) fdeg = std::max(fdeg, fi.degree());
    const int lhs_deg = std::max({k + model.g.degree(), k * fdeg, model.g.degree()});
    struct Companion {
      std::string name;
      Polynomial factor;
    };
    std::vector<Companion> comps;
    comps.push_back({"s1", ball_xd});
    comps.push_back({"s2", model.h_inf.Embed(nv, 0) - one_xd});
    for (std::size_t i = 0; i < hd.size(); ++i) {
      comps.push_back({"s3_" + std::to_string(i + 1), -hd[i].Embed(nv, n)});
    }
    int match = lhs_deg;
    std::vector<int> degs;
    for (const auto& c : comps) {
      const int d = CompanionDegree(cfg, lhs_deg, c.factor.degree());
      degs.push_back(d);
      match = std::max(match, d + c.factor.degree());
    }
    PolyIdentity id;
    id.name = "decrease";
    id.nvars = nv;
    id.lhs.push_back(Term::Decision(u, one_xd + g_xd, embed_x));
    id.lhs.push_back(Term::Decision(u, -1.0 * one_xd, model.f));
    id.lhs.push_back(Term::Data(-g_xd));
    const int s0 = prog.AddMultiplier("s0", GramBasis(nv, FloorEven(match)), true);
    id.rhs.push_back(Term::Multiplier(s0, one_xd));
    for (std::size_t c = 0; c < comps.size(); ++c) {
      const int s = prog.AddMultiplier(comps[c].name, GramBasis(nv, degs[c]));
      id.rhs.push_back(Term::Multiplier(s, comps[c].factor));
    }
    prog.AddIdentity(std::move(id));
  }

  // Families B and C, one identity each per X constraint.
  for (std::size_t j = 0; j < hx.size(); ++j) {
    const std::string tag = "_" + std::to_string(j + 1);
    {
      const int lhs_deg = k;
      const Polynomial c6 = hx[j] - one_x;
      const int d5 = CompanionDegree(cfg, lhs_deg, 2);
      const int d6 = CompanionDegree(cfg, lhs_deg, c6.degree());
      const int match = std::max({lhs_deg, d5 + 2, d6 + c6.degree()});
      PolyIdentity id;
      id.name = "outside-X" + tag;
      id.nvars = n;
      id.lhs.push_back(Term::Decision(u, one_x));
      id.lhs.push_back(Term::Data(-one_x));
      const int s4 = prog.AddMultiplier("s4" + tag, GramBasis(n, FloorEven(match)), true);
      const int s5 = prog.AddMultiplier("s5" + tag, GramBasis(n, d5));
      const int s6 = prog.AddMultiplier("s6" + tag, GramBasis(n, d6));
      id.rhs.push_back(Term::Multiplier(s4, one_x));
      id.rhs.push_back(Term::Multiplier(s5, ball));
      id.rhs.push_back(Term::Multiplier(s6, c6));
      prog.AddIdentity(std::move(id));
    }
    {
      const int lhs_deg = std::max(k, hx[j].degree());
      const int d8 = CompanionDegree(cfg, lhs_deg, 2);
      int match = std::max(lhs_deg, d8 + 2);
      std::vector<int> d9;
      for (const auto& hl : hx) {
        d9.push_back(CompanionDegree(cfg, lhs_deg, hl.degree()));
        match = std::max(match, d9.back() + hl.degree());
      }
      PolyIdentity id;
      id.name = "above-hX" + tag;
      id.nvars = n;
      id.lhs.push_back(Term::Decision(u, one_x));
      id.lhs.push_back(Term::Data(-hx[j]));
      const int s7 = prog.AddMultiplier("s7" + tag, GramBasis(n, FloorEven(match)), true);
      const int s8 = prog.AddMultiplier("s8" + tag, GramBasis(n, d8));
      id.rhs.push_back(Term::Multiplier(s7, one_x));
      id.rhs.push_back(Term::Multiplier(s8, ball));
      for (std::size_t l = 0; l < hx.size(); ++l) {
        const int s9 = prog.AddMultiplier(
            "s9_" + std::to_string(l + 1) + tag, GramBasis(n, d9[l]));
        id.rhs.push_back(Term::Multiplier(s9, one_x - hx[l]));
      }
      prog.AddIdentity(std::move(id));
    }
  }

  // Objective ∫_B u − ∫_{X∞} u.
  const auto& basis = prog.decisions()[u].basis;
  const auto seed_moments = poly::SublevelMoments(basis, model.h_inf, model.R2);
  std::vector<double> l(basis.size());
  for (std::size_t a = 0; a < basis.size(); ++a) {
    l[a] = poly::BallMoment(basis[a], model.R2, n) - seed_moments[a];
  }
  prog.SetObjective(u, std::move(l));

  if (index != nullptr) {
    index->u = u;
    index->identity_names.clear();
    for (const auto& id : prog.identities()) index->identity_names.push_back(id.name);
  }
  return prog;
}

RoaCertificate ComputeRoa(const SystemModel& model, const RoaConfig& cfg) {
  RoaCertificate cert;
  cert.n = model.n;
  cert.R2 = model.R2;
  cert.config = cfg;
  cert.model_hash = model.source_hash;
  cert.u = Polynomial::Constant(model.n, 1.0);

  auto t0 = std::chrono::steady_clock::now();
  ProgramIndex index;
  const sos::SOSProgram prog = BuildProgram(model, cfg, &index);
  cert.times.build = Seconds(t0);
  cert.identity_names = index.identity_names;
  for (const auto& s : prog.multipliers()) cert.multiplier_names.push_back(s.name);

  t0 = std::chrono::steady_clock::now();
  const sos::SDPProblem sdp = sos::Compile(prog);
  cert.times.compile = Seconds(t0);
  cert.sdp_rows = sdp.num_rows;
  cert.sdp_free = sdp.num_free;
  cert.block_sizes = sdp.block_sizes;

  t0 = std::chrono::steady_clock::now();
  const auto solver = sos::DefaultSolver();
  const sos::SDPSolution sol = solver->Solve(sdp, cfg.solver);
  cert.times.solve = Seconds(t0);
  cert.status = sol.status;
  cert.solver_message = sol.message;
  cert.backend = sol.backend;
  cert.iterations = sol.iterations;
  cert.min_eigenvalue = sol.min_eigenvalue;
  if (!cert.ok()) return cert;

  t0 = std::chrono::steady_clock::now();
  const sos::ExtractedValues values = sos::Extract(sol, prog, sdp);
  cert.u = values.decisions[index.u];
  cert.gram_bases = values.gram_bases;
  cert.grams = values.grams;
  cert.identity_residuals = sos::IdentityResidual(prog, values);
  cert.max_residual = 0.0;
  for (double r : cert.identity_residuals) cert.max_residual = std::max(cert.max_residual, r);
  const auto& l = prog.objective()[index.u];
  const auto& basis = prog.decisions()[index.u].basis;
  cert.objective = 0.0;
  for (std::size_t a = 0; a < basis.size(); ++a) {
    cert.objective += l[a] * cert.u.coefficient(basis[a]);
  }
  cert.times.extract = Seconds(t0);
  return cert;
}

bool Membership(const RoaCertificate& cert, std::span<const double> x) {
  double h0 = 0.0;
  for (double v : x) h0 += v * v;
  return h0 <= cert.R2 && cert.u.eval(x) < 1.0;
}

namespace {

int DefaultCheckGrid(int n) { return n <= 2 ? 101 : 31; }

void RecordViolation(CertReport& r, ConstraintViolation v) {
  ++r.constraint_violation_count;
  if (r.constraint_violations.size() < 20) r.constraint_violations.push_back(std::move(v));
}

}  // namespace

CertReport Certify(const RoaCertificate& cert, const SystemModel& model,
                   const RoaConfig& cfg) {
  CertReport r;
  const int n = model.n;
  const double tol = cfg.sample_tol;
  const double rad = std::sqrt(model.R2);
  const auto dgrid = model.DisturbanceGrid(cfg.disturbance_grid);
  const auto hx = model.XPolys();

  // (i) Constraint sampling on a state grid.
  {
    const int nodes = cfg.check_grid > 0 ? cfg.check_grid : DefaultCheckGrid(n);
    const oracle::GridField grid = oracle::GridField::Box(n, -rad, rad, nodes);
    struct NodeResult {
      std::vector<ConstraintViolation> violations;
      std::size_t dec = 0, out = 0, clo = 0;
      double worst_dec = 0, worst_out = 0, worst_clo = 0;
    };
    std::vector<NodeResult> results(grid.size());
    util::ParallelFor(grid.size(), cfg.threads, [&](std::size_t f) {
      NodeResult& nr = results[f];
      const std::vector<double> x = grid.Point(f);
      if (!model.InBall(x)) return;
      const double ux = cert.u.eval(x);
      double hmax = -1e300;
      for (const auto& h : hx) hmax = std::max(hmax, h.eval(x));
      if (hmax >= 1.0) {
        ++nr.out;
        const double q = ux - 1.0;
        nr.worst_out = std::min(nr.worst_out, q);
        if (q < -tol) nr.violations.push_back({"outside-X", x, q});
      }
      if (hmax <= 1.0) {
        for (const auto& h : hx) {
          ++nr.clo;
          const double q = ux - h.eval(x);
          nr.worst_clo = std::min(nr.worst_clo, q);
          if (q < -tol) nr.violations.push_back({"above-hX", x, q});
        }
      }
      if (model.h_inf.eval(x) >= 1.0) {
        const double gx = model.g.eval(x);
        for (const auto& d : dgrid) {
          ++nr.dec;
          const double q = ux - cert.u.eval(model.Step(x, d)) - gx * (1.0 - ux);
          nr.worst_dec = std::min(nr.worst_dec, q);
          if (q < -tol) {
            std::vector<double> xd = x;
            xd.insert(xd.end(), d.begin(), d.end());
            nr.violations.push_back({"decrease", std::move(xd), q});
          }
        }
      }
    });
    for (auto& nr : results) {
      r.decrease_points += nr.dec;
      r.outside_points += nr.out;
      r.closure_points += nr.clo;
      r.worst_decrease = std::min(r.worst_decrease, nr.worst_dec);
      r.worst_outside = std::min(r.worst_outside, nr.worst_out);
      r.worst_closure = std::min(r.worst_closure, nr.worst_clo);
      for (auto& v : nr.violations) RecordViolation(r, std::move(v));
    }
  }

  // (ii) Trajectory sampling from states inside {u < 1} ∩ X.
  std::vector<std::vector<double>> states;
  {
    std::mt19937_64 rng(model::StageSeed(cfg.seed, "certify-states"));
    std::uniform_real_distribution<double> coord(-rad, rad);
    const std::size_t max_draws = 1000 * static_cast<std::size_t>(cfg.samples) + 100000;
    std::vector<double> x(n);
    while (static_cast<int>(states.size()) < cfg.samples && r.rejection_draws < max_draws) {
      ++r.rejection_draws;
      for (auto& v : x) v = coord(rng);
      if (model.InX(x) && Membership(cert, x)) states.push_back(x);
    }
  }
  r.states = states.size();
  std::vector<model::Policy> policies;
  for (int j = 0; j < cfg.policies; ++j) {
    policies.push_back(model::Policy::Random(
        dgrid, model::StageSeed(cfg.seed, "certify-policy-" + std::to_string(j))));
  }
  for (const auto& corner : model.DisturbanceCorners()) {
    policies.push_back(model::Policy::Constant(corner));
  }
  r.policy_count = policies.size();
  struct Outcome {
    bool stayed = true, hit = false;
    TrajectoryFailure failure;
  };
  const std::size_t P = policies.size();
  std::vector<Outcome> outcomes(states.size() * P);
  model::SimulateOptions opts;
  opts.stop_at_event = true;
  util::ParallelFor(outcomes.size(), cfg.threads, [&](std::size_t t) {
    const std::size_t s = t / P, p = t % P;
    const model::Trajectory tr =
        model::Simulate(model, states[s], policies[p], cfg.horizon, opts);
    Outcome& o = outcomes[t];
    const bool exited = tr.exit_index && (!tr.hit_index || *tr.exit_index < *tr.hit_index);
    if (tr.overflow || exited) {
      o.stayed = false;
      o.failure = {states[s], static_cast<int>(p), tr.overflow ? "overflow" : "exit",
                   tr.exit_index ? *tr.exit_index : static_cast<int>(tr.states.size())};
    } else if (tr.hit_index) {
      o.hit = true;
    } else {
      o.failure = {states[s], static_cast<int>(p), "timeout", cfg.horizon};
    }
  });
  for (const auto& o : outcomes) {
    ++r.trajectories;
    r.stayed_in_X += o.stayed;
    r.hit_Xinf += o.hit;
    if (!o.stayed) ++r.exit_count;
    if (o.stayed && !o.hit) ++r.timeout_count;
    if ((!o.stayed || !o.hit) && r.trajectory_failures.size() < 20) {
      r.trajectory_failures.push_back(o.failure);
    }
  }

  const bool enough_states = static_cast<int>(r.states) == cfg.samples;
  r.pass = cert.ok() && enough_states && r.constraint_violation_count == 0 &&
           r.stayed_in_X == r.trajectories && r.hit_Xinf == r.trajectories;
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%s: constraint samples %zu/%zu/%zu with %zu violations "
                "(worst %.3g/%.3g/%.3g); %zu states x %zu policies: %zu stayed in X, "
                "%zu reached the seed set%s",
                r.pass ? "PASS" : "FAIL", r.decrease_points, r.outside_points,
                r.closure_points, r.constraint_violation_count, r.worst_decrease,
                r.worst_outside, r.worst_closure, r.states, r.policy_count,
                r.stayed_in_X, r.hit_Xinf,
                enough_states ? "" : " (could not draw enough states)");
  r.summary = buf;
  return r;
}

namespace {

oracle::GridField MakeGrid(const RoaCertificate& cert, int resolution,
                           std::optional<int> slice_axis, double slice_value) {
  const double rad = std::sqrt(cert.R2);
  if (slice_axis) {
    if (cert.n != 3) throw std::invalid_argument("slices need a 3-dimensional state");
    if (*slice_axis < 0 || *slice_axis > 2) throw std::invalid_argument("bad slice axis");
    std::vector<int> rest;
    for (int i = 0; i < 3; ++i) {
      if (i != *slice_axis) rest.push_back(i);
    }
    std::vector<double> base(3, 0.0);
    base[*slice_axis] = slice_value;
    return oracle::GridField::Slice(base, rest[0], rest[1], -rad, rad, resolution);
  }
  return oracle::GridField::Box(cert.n, -rad, rad, resolution);
}

}  // namespace

oracle::GridField SignGrid(const RoaCertificate& cert, int resolution,
                           std::optional<int> slice_axis, double slice_value) {
  oracle::GridField g = MakeGrid(cert, resolution, slice_axis, slice_value);
  for (std::size_t f = 0; f < g.size(); ++f) {
    g.values[f] = cert.ok() && Membership(cert, g.Point(f)) ? 1.0 : 0.0;
  }
  return g;
}

oracle::GridField ValueGrid(const RoaCertificate& cert, int resolution,
                            std::optional<int> slice_axis, double slice_value) {
  oracle::GridField g = MakeGrid(cert, resolution, slice_axis, slice_value);
  for (std::size_t f = 0; f < g.size(); ++f) g.values[f] = cert.u.eval(g.Point(f));
  return g;
}

}  // namespace roa
}  // namespace rroa
