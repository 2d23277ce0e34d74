#include "rroa/cli/commands.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

#include <CLI11.hpp>

#include "rroa/cli/run_manifest.h"
#include "rroa/model/assumptions.h"
#include "rroa/model/system_model.h"
#include "rroa/model/trajectory.h"
#include "rroa/oracle/grid_field.h"
#include "rroa/oracle/max_roa.h"
#include "rroa/oracle/value_iteration.h"
#include "rroa/roa/certificate_io.h"
#include "rroa/roa/roa.h"
#include "rroa/sos/extract.h"
#include "rroa/sos/sdp_problem.h"

namespace rroa {
namespace cli {

namespace fs = std::filesystem;
using model::SystemModel;

namespace {

// Input that cannot be used as given; maps to kExitUsage.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double Seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string Format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

struct Common {
  std::string out_dir{"out"};
  std::uint64_t seed{42};
  int threads{1};
};

SystemModel Load(const std::string& path, RunManifest& manifest) {
  SystemModel m = model::LoadModelFile(path);
  manifest.AddInput(path);
  return m;
}

struct SliceSpec {
  int axis{-1};
  double value{0.0};
  std::string label;
};

// "x3=0", "z=0.1" or "3=0" (1-based axis index).
SliceSpec ParseSlice(const std::string& text, const SystemModel& m) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw UsageError("slice '" + text + "' needs axis=value");
  const std::string name = text.substr(0, eq);
  SliceSpec s;
  for (int i = 0; i < m.n; ++i) {
    if (i < static_cast<int>(m.names.size()) && m.names[i] == name) s.axis = i;
  }
  if (s.axis < 0 && name.size() == 1 && name[0] >= 'x' && name[0] <= 'z') {
    s.axis = name[0] - 'x';
  }
  if (s.axis < 0 && !name.empty() && std::all_of(name.begin(), name.end(), ::isdigit)) {
    s.axis = std::stoi(name) - 1;
  }
  if (s.axis < 0 || s.axis >= m.n) throw UsageError("unknown slice axis '" + name + "'");
  try {
    s.value = std::stod(text.substr(eq + 1));
  } catch (const std::exception&) {
    throw UsageError("bad slice value in '" + text + "'");
  }
  const std::string axis_name =
      s.axis < static_cast<int>(m.names.size()) ? m.names[s.axis] : "x" + std::to_string(s.axis + 1);
  s.label = axis_name + "=" + Format("%g", s.value);
  return s;
}

// Slices requested, or for n = 3 the three coordinate planes through 0.
std::vector<SliceSpec> Slices(const std::vector<std::string>& specs, const SystemModel& m) {
  std::vector<SliceSpec> out;
  for (const auto& s : specs) out.push_back(ParseSlice(s, m));
  if (m.n > 2 && out.empty()) {
    for (int i = 0; i < m.n; ++i) out.push_back(ParseSlice(std::to_string(i + 1) + "=0", m));
  }
  if (m.n > 3) throw UsageError("grids need n <= 3");
  if (m.n <= 2 && !out.empty()) throw UsageError("slices need a 3-dimensional state");
  return out;
}

// --------------------------------------------------------------------------
// check

struct CheckArgs {
  std::string model;
  int extra_degree{0};
};

int Check(const CheckArgs& a, const Common& c, RunManifest& manifest, std::ostream& out) {
  const SystemModel m = Load(a.model, manifest);
  auto settings = model::DefaultCheckSettings(m);
  settings.extra_degree = a.extra_degree;
  manifest.config()["extra_degree"] = a.extra_degree;
  bool fail = false;
  char line[256];
  auto t0 = std::chrono::steady_clock::now();
  const auto stab = model::CheckExponentialStability(m);
  manifest.AddTiming("stability", Seconds(t0));
  std::snprintf(line, sizeof(line), "%-16s %-8s max spectral radius of df/dx(0,d) = %.4g\n",
                "stability", stab.pass ? "pass" : "FAIL", stab.max_radius);
  out << line;
  fail |= !stab.pass;

  for (auto* fn : {&model::CheckReachBound, &model::CheckSeedLyapunov}) {
    t0 = std::chrono::steady_clock::now();
    const auto rep = fn(m, settings);
    manifest.AddTiming(rep.name, Seconds(t0));
    std::snprintf(line, sizeof(line), "%-16s %-8s\n", rep.name.c_str(),
                  model::ToString(rep.status).c_str());
    out << line;
    for (const auto& p : rep.parts) {
      std::snprintf(line, sizeof(line),
                    "  %-30s %-8s solver %-12s residual %.2e min eig %.2e  %.2fs\n",
                    p.name.c_str(), model::ToString(p.status).c_str(),
                    sos::ToString(p.solver_status).c_str(), p.identity_residual,
                    p.min_eigenvalue, p.seconds);
      out << line;
    }
    if (rep.status == model::CheckStatus::kFail) fail = true;
    if (rep.status == model::CheckStatus::kUnknown) {
      out << "  warning: " << rep.name << " could not be decided\n";
    }
  }

  const auto arch = model::CheckArchimedeanD(m);
  if (arch.found) {
    std::snprintf(line, sizeof(line), "%-16s %-8s R_D = %g (constraint h%d)\n", "archimedean-D",
                  "pass", arch.R_D, arch.constraint_index + 1);
  } else {
    std::snprintf(line, sizeof(line),
                  "%-16s %-8s no ball constraint on d; add ||d||^2 - %g <= 0\n",
                  "archimedean-D", "warning", arch.suggested_R_D);
  }
  out << line;
  (void)c;
  return fail ? kExitFailure : kExitOk;
}

// --------------------------------------------------------------------------
// solve

struct SolveArgs {
  std::string model;
  std::vector<int> degrees;
  std::optional<int> mult_degree;
  std::string out;
  bool force{false};
  std::optional<double> gap_tol;
  std::optional<double> feasibility_tol;
  std::optional<int> max_iterations;
  bool dump_sdp{false};
  bool verbose{false};
};

int Solve(const SolveArgs& a, const Common& c, RunManifest& manifest, std::ostream& out) {
  const SystemModel m = Load(a.model, manifest);
  std::vector<int> degrees = a.degrees.empty() ? m.solver.degrees : a.degrees;
  if (degrees.empty()) throw UsageError("no --degree given and the model lists none");
  if (!a.out.empty() && degrees.size() > 1) throw UsageError("--out needs a single --degree");

  if (!a.force) {
    // The cheap necessary conditions; `check` runs the full SOS suite.
    const auto stab = model::CheckExponentialStability(m);
    if (!stab.pass) {
      out << "stability check failed (spectral radius " << stab.max_radius
          << "); use --force to solve anyway\n";
      return kExitFailure;
    }
  }

  bool all_ok = true;
  nlohmann::ordered_json cfgs = nlohmann::ordered_json::array();
  for (int k : degrees) {
    roa::RoaConfig cfg = roa::ConfigFor(m, k);
    if (a.mult_degree) cfg.mult_degree = a.mult_degree;
    if (a.gap_tol) cfg.solver.gap_tol = *a.gap_tol;
    if (a.feasibility_tol) cfg.solver.feasibility_tol = *a.feasibility_tol;
    if (a.max_iterations) cfg.solver.max_iterations = *a.max_iterations;
    cfg.solver.verbose = a.verbose;
    cfg.seed = c.seed;
    cfg.threads = c.threads;
    cfgs.push_back({{"k", k},
                    {"mult_degree", cfg.mult_degree ? nlohmann::ordered_json(*cfg.mult_degree)
                                                    : nlohmann::ordered_json(nullptr)},
                    {"feasibility_tol", cfg.solver.feasibility_tol},
                    {"gap_tol", cfg.solver.gap_tol},
                    {"max_iterations", cfg.solver.max_iterations}});

    if (a.dump_sdp) {
      const auto prog = roa::BuildProgram(m, cfg);
      const fs::path dir = fs::path(c.out_dir) / ("sdp_k" + std::to_string(k));
      sos::WriteSdpDump(sos::Compile(prog), prog, dir);
      manifest.AddOutput(dir / "sdp.txt");
      manifest.AddOutput(dir / "rhs.txt");
      manifest.AddOutput(dir / "manifest.json");
    }

    const roa::RoaCertificate cert = roa::ComputeRoa(m, cfg);
    const std::string tag = "k" + std::to_string(k);
    manifest.AddTiming(tag + ".build", cert.times.build);
    manifest.AddTiming(tag + ".compile", cert.times.compile);
    manifest.AddTiming(tag + ".solve", cert.times.solve);
    manifest.AddTiming(tag + ".extract", cert.times.extract);
    const fs::path path = a.out.empty() ? fs::path(c.out_dir) / ("cert_" + tag + ".json")
                                        : fs::path(a.out);
    roa::WriteCertificate(cert, path);
    manifest.AddOutput(path);

    const std::vector<double> zero(m.n, 0.0);
    char line[512];
    std::snprintf(line, sizeof(line),
                  "k=%d status %s%s\n  sdp rows %d, blocks %zu, iterations %d\n"
                  "  p_k* = %.8g  u(0) = %.3g\n  max identity residual %.2e, min Gram "
                  "eigenvalue %.2e\n  times: build %.2fs compile %.2fs solve %.2fs "
                  "extract %.2fs\n  certificate: %s\n",
                  k, sos::ToString(cert.status).c_str(),
                  cert.solver_message.empty() ? "" : (" (" + cert.solver_message + ")").c_str(),
                  cert.sdp_rows, cert.block_sizes.size(), cert.iterations, cert.objective,
                  cert.u.eval(zero), cert.max_residual, cert.min_eigenvalue, cert.times.build,
                  cert.times.compile, cert.times.solve, cert.times.extract,
                  path.string().c_str());
    out << line;
    all_ok &= cert.ok();
  }
  manifest.config()["solves"] = cfgs;
  return all_ok ? kExitOk : kExitFailure;
}

// --------------------------------------------------------------------------
// certify

struct CertifyArgs {
  std::string cert;
  std::string model;
  int samples{1000};
  int policies{50};
  int horizon{200};
  int check_grid{0};
  std::optional<int> disturbance_grid;
};

roa::RoaCertificate LoadCert(const std::string& path, RunManifest& manifest) {
  try {
    roa::RoaCertificate cert = roa::ReadCertificate(path);
    manifest.AddInput(path);
    return cert;
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
}

void CheckPair(const roa::RoaCertificate& cert, const SystemModel& m, std::ostream& out) {
  if (cert.n != m.n) throw UsageError("certificate and model dimensions differ");
  if (!cert.model_hash.empty() && !m.source_hash.empty() && cert.model_hash != m.source_hash) {
    out << "warning: certificate was computed for a different model file (hash "
        << cert.model_hash << " vs " << m.source_hash << ")\n";
  }
}

int Certify(const CertifyArgs& a, const Common& c, RunManifest& manifest, std::ostream& out) {
  const roa::RoaCertificate cert = LoadCert(a.cert, manifest);
  const SystemModel m = Load(a.model, manifest);
  CheckPair(cert, m, out);
  roa::RoaConfig cfg = cert.config;
  cfg.samples = a.samples;
  cfg.policies = a.policies;
  cfg.horizon = a.horizon;
  cfg.check_grid = a.check_grid;
  if (a.disturbance_grid) cfg.disturbance_grid = *a.disturbance_grid;
  cfg.seed = c.seed;
  cfg.threads = c.threads;
  manifest.config() = {{"samples", cfg.samples},       {"policies", cfg.policies},
                       {"horizon", cfg.horizon},       {"check_grid", cfg.check_grid},
                       {"disturbance_grid", cfg.disturbance_grid},
                       {"sample_tol", cfg.sample_tol}};
  manifest.AddStageSeed("certify-states", model::StageSeed(c.seed, "certify-states"));
  if (!cert.ok()) {
    out << "certificate status is " << sos::ToString(cert.status) << "; nothing to certify\n";
    return kExitFailure;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const roa::CertReport rep = roa::Certify(cert, m, cfg);
  manifest.AddTiming("certify", Seconds(t0));
  out << rep.summary << "\n";
  for (const auto& v : rep.constraint_violations) {
    out << "  " << v.check << " at (";
    for (std::size_t i = 0; i < v.point.size(); ++i) out << (i ? ", " : "") << v.point[i];
    out << ") by " << v.value << "\n";
  }
  for (const auto& f : rep.trajectory_failures) {
    out << "  " << f.kind << " from (";
    for (std::size_t i = 0; i < f.x0.size(); ++i) out << (i ? ", " : "") << f.x0[i];
    out << ") under policy " << f.policy << " at step " << f.step << "\n";
  }

  const fs::path path = fs::path(c.out_dir) / "certify_report.json";
  nlohmann::ordered_json j;
  j["pass"] = rep.pass;
  j["summary"] = rep.summary;
  j["constraint_samples"] = {{"decrease", rep.decrease_points},
                             {"outside_X", rep.outside_points},
                             {"closure", rep.closure_points},
                             {"violations", rep.constraint_violation_count},
                             {"worst_decrease", rep.worst_decrease},
                             {"worst_outside", rep.worst_outside},
                             {"worst_closure", rep.worst_closure}};
  j["trajectories"] = {{"states", rep.states},           {"rejection_draws", rep.rejection_draws},
                       {"policies", rep.policy_count},   {"total", rep.trajectories},
                       {"stayed_in_X", rep.stayed_in_X}, {"hit_seed_set", rep.hit_Xinf},
                       {"exits", rep.exit_count},        {"timeouts", rep.timeout_count}};
  fs::create_directories(path.parent_path());
  std::ofstream(path) << j.dump(2) << "\n";
  manifest.AddOutput(path);
  return rep.pass ? kExitOk : kExitFailure;
}

// --------------------------------------------------------------------------
// oracle

struct OracleArgs {
  std::string model;
  bool vi{false};
  bool sim{false};
  int nodes{0};
  int disturbance_nodes{11};
  double threshold{1e-6};
  int max_iterations{10000};
  int resolution{0};
  int horizon{200};
  int policies{50};
  std::vector<std::string> slices;
};

oracle::GridField SimGrid(const SystemModel& m, int resolution, const SliceSpec* slice) {
  const double r = std::sqrt(m.R2);
  if (slice == nullptr) return oracle::GridField::Box(m.n, -r, r, resolution);
  std::vector<int> rest;
  for (int i = 0; i < 3; ++i) {
    if (i != slice->axis) rest.push_back(i);
  }
  std::vector<double> base(3, 0.0);
  base[slice->axis] = slice->value;
  return oracle::GridField::Slice(base, rest[0], rest[1], -r, r, resolution);
}

int Oracle(const OracleArgs& a, const Common& c, RunManifest& manifest, std::ostream& out) {
  const SystemModel m = Load(a.model, manifest);
  const bool vi = a.vi || !a.sim;
  const bool sim = a.sim || !a.vi;
  const auto slices = Slices(a.slices, m);

  oracle::ViSettings vs;
  vs.state_nodes = a.nodes;
  vs.disturbance_nodes = a.disturbance_nodes;
  vs.threshold = a.threshold;
  vs.max_iterations = a.max_iterations;
  vs.threads = c.threads;
  manifest.config() = {{"state_nodes", oracle::StateNodes(vs, m.n)},
                       {"disturbance_nodes", vs.disturbance_nodes},
                       {"threshold", vs.threshold},
                       {"max_iterations", vs.max_iterations}};
  auto t0 = std::chrono::steady_clock::now();
  const oracle::ViResult r = oracle::ValueIteration(m, vs);
  manifest.AddTiming("value_iteration", Seconds(t0));
  char line[256];
  std::snprintf(line, sizeof(line), "value iteration: %s after %d sweeps, last change %.2e\n",
                r.converged ? "converged" : "NOT converged", r.iterations,
                r.deltas.empty() ? 0.0 : r.deltas.back());
  out << line;
  if (vi) {
    const fs::path vpath = fs::path(c.out_dir) / "vi_value.csv";
    const fs::path lpath = fs::path(c.out_dir) / "vi_convergence.csv";
    r.v.WriteCsv(vpath, m.names);
    oracle::WriteConvergenceLog(r, lpath);
    manifest.AddOutput(vpath);
    manifest.AddOutput(lpath);
    const auto bell = oracle::BellmanResidual(m, r.v, vs.disturbance_nodes);
    std::snprintf(line, sizeof(line),
                  "  Bellman residual: %.2e at nodes, %.2e at cell centres\n",
                  bell.node_residual, bell.midpoint_residual);
    out << line;
  }
  if (sim) {
    oracle::MaxRoaSettings ms;
    ms.horizon = a.horizon;
    ms.disturbance_nodes = a.disturbance_nodes;
    ms.policies = a.policies;
    ms.seed = c.seed;
    ms.threads = c.threads;
    manifest.AddStageSeed("grid_max_roa", model::StageSeed(c.seed, "grid_max_roa"));
    manifest.config()["horizon"] = ms.horizon;
    manifest.config()["policies"] = ms.policies;
    const int res = a.resolution > 0 ? a.resolution : oracle::StateNodes(vs, m.n);
    manifest.config()["resolution"] = res;
    std::vector<const SliceSpec*> planes;
    for (const auto& s : slices) planes.push_back(&s);
    if (planes.empty()) planes.push_back(nullptr);
    t0 = std::chrono::steady_clock::now();
    for (const SliceSpec* s : planes) {
      oracle::GridField mask = SimGrid(m, res, s);
      oracle::GridMaxRoa(m, r.v, ms, mask);
      const fs::path p = fs::path(c.out_dir) /
                         (s ? "max_roa_" + s->label + ".csv" : std::string("max_roa.csv"));
      mask.WriteCsv(p, m.names);
      manifest.AddOutput(p);
      out << "  simulated maximal ROA" << (s ? " on " + s->label : std::string()) << ": "
          << mask.Count(0.5) << " of " << mask.size() << " nodes\n";
    }
    manifest.AddTiming("grid_max_roa", Seconds(t0));
  }
  return r.converged ? kExitOk : kExitFailure;
}

// --------------------------------------------------------------------------
// plot-data

struct PlotArgs {
  std::string cert;
  std::string model;
  std::vector<std::string> extra_certs;
  int resolution{401};
  std::vector<std::string> slices;
  bool overlay{false};
  bool values{false};
};

void WriteOverlay(const fs::path& path, const std::vector<oracle::GridField>& layers,
                  const std::vector<std::string>& names, const SystemModel& m) {
  std::ofstream o(path);
  if (!o) throw std::runtime_error("cannot write " + path.string());
  const auto& g = layers.front();
  for (int a = 0; a < g.dims(); ++a) o << m.names[g.state_axes[a]] << ",";
  for (std::size_t l = 0; l < names.size(); ++l) o << names[l] << (l + 1 < names.size() ? "," : "\n");
  char buf[64];
  for (std::size_t f = 0; f < g.size(); ++f) {
    const auto idx = g.Index(f);
    for (int a = 0; a < g.dims(); ++a) {
      std::snprintf(buf, sizeof(buf), "%.10g,", g.axes[a].at(idx[a]));
      o << buf;
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
      o << (layers[l].values[f] > 0.5 ? 1 : 0) << (l + 1 < layers.size() ? "," : "\n");
    }
  }
}

int PlotData(const PlotArgs& a, const Common& c, RunManifest& manifest, std::ostream& out) {
  std::vector<roa::RoaCertificate> certs;
  certs.push_back(LoadCert(a.cert, manifest));
  for (const auto& p : a.extra_certs) certs.push_back(LoadCert(p, manifest));
  const SystemModel m = Load(a.model, manifest);
  for (const auto& cert : certs) CheckPair(cert, m, out);
  const auto slices = Slices(a.slices, m);
  manifest.config() = {{"resolution", a.resolution}, {"overlay", a.overlay}};

  std::vector<const SliceSpec*> planes;
  for (const auto& s : slices) planes.push_back(&s);
  if (planes.empty()) planes.push_back(nullptr);

  std::optional<oracle::ViResult> vi;
  oracle::MaxRoaSettings ms;
  ms.seed = c.seed;
  ms.threads = c.threads;
  if (a.overlay) {
    oracle::ViSettings vs;
    vs.threads = c.threads;
    const auto t0 = std::chrono::steady_clock::now();
    vi = oracle::ValueIteration(m, vs);
    manifest.AddTiming("value_iteration", Seconds(t0));
    manifest.AddStageSeed("grid_max_roa", model::StageSeed(c.seed, "grid_max_roa"));
  }

  const auto t0 = std::chrono::steady_clock::now();
  for (const SliceSpec* s : planes) {
    const std::string suffix = s ? "_" + s->label : std::string();
    std::optional<int> axis;
    double value = 0.0;
    if (s) {
      axis = s->axis;
      value = s->value;
    }
    std::vector<oracle::GridField> layers;
    std::vector<std::string> names;
    for (const auto& cert : certs) {
      const std::string tag = "k" + std::to_string(cert.config.k);
      oracle::GridField sign = roa::SignGrid(cert, a.resolution, axis, value);
      const fs::path p = fs::path(c.out_dir) / ("sign_" + tag + suffix + ".csv");
      sign.WriteCsv(p, m.names);
      manifest.AddOutput(p);
      out << "sign grid " << tag << (s ? " on " + s->label : std::string()) << ": "
          << sign.Count(0.5) << " of " << sign.size() << " nodes inside\n";
      if (a.values) {
        const fs::path vp = fs::path(c.out_dir) / ("value_" + tag + suffix + ".csv");
        roa::ValueGrid(cert, a.resolution, axis, value).WriteCsv(vp, m.names);
        manifest.AddOutput(vp);
      }
      layers.push_back(std::move(sign));
      names.push_back("u_" + tag);
    }
    if (a.overlay) {
      oracle::GridField mask = SimGrid(m, a.resolution, s);
      oracle::GridMaxRoa(m, vi->v, ms, mask);
      layers.push_back(std::move(mask));
      names.push_back("simulated");
      const fs::path p = fs::path(c.out_dir) / ("overlay" + suffix + ".csv");
      WriteOverlay(p, layers, names, m);
      manifest.AddOutput(p);
    }
  }
  manifest.AddTiming("grids", Seconds(t0));
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Inner approximations of robust regions of attraction", "rroa"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out-dir", common.out_dir, "Directory for outputs and manifest.json")
        ->capture_default_str();
    sub->add_option("--seed", common.seed, "Master seed")->capture_default_str();
    sub->add_option("--threads", common.threads, "Worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  };

  CheckArgs check;
  auto* c_check = app.add_subcommand("check", "Check the model assumptions");
  c_check->add_option("model", check.model, "Problem file")->required()->check(CLI::ExistingFile);
  c_check->add_option("--extra-degree", check.extra_degree,
                      "Raise the certificate degrees of the SOS checks");
  add_common(c_check);

  SolveArgs solve;
  auto* c_solve = app.add_subcommand("solve", "Solve the SOS program for one or more degrees");
  c_solve->add_option("model", solve.model, "Problem file")->required()->check(CLI::ExistingFile);
  c_solve->add_option("--degree,-k", solve.degrees, "Degree of u (repeatable)");
  c_solve->add_option("--mult-degree", solve.mult_degree,
                      "Degree of multipliers on non-constant constraints");
  c_solve->add_option("--out", solve.out, "Certificate path (single degree)");
  c_solve->add_flag("--force", solve.force, "Skip the stability pre-check");
  c_solve->add_option("--gap-tol", solve.gap_tol, "Relative duality gap tolerance");
  c_solve->add_option("--feasibility-tol", solve.feasibility_tol, "Relative feasibility tolerance");
  c_solve->add_option("--max-iterations", solve.max_iterations, "Solver iteration cap");
  c_solve->add_flag("--dump-sdp", solve.dump_sdp, "Write the compiled SDP in sparse text form");
  c_solve->add_flag("--verbose,-v", solve.verbose, "Print solver iterations");
  add_common(c_solve);

  CertifyArgs certify;
  auto* c_cert = app.add_subcommand("certify", "Sample-check a certificate");
  c_cert->add_option("certificate", certify.cert, "Certificate JSON")->required();
  c_cert->add_option("model", certify.model, "Problem file")->required()->check(CLI::ExistingFile);
  c_cert->add_option("--samples,-N", certify.samples, "Initial states")->capture_default_str();
  c_cert->add_option("--policies,-M", certify.policies, "Random policies")->capture_default_str();
  c_cert->add_option("--horizon,-K", certify.horizon, "Steps to reach the seed set")
      ->capture_default_str();
  c_cert->add_option("--check-grid", certify.check_grid,
                     "Nodes per axis of the constraint-sampling grid");
  c_cert->add_option("--disturbance-grid", certify.disturbance_grid,
                     "Points per disturbance dimension");
  add_common(c_cert);

  OracleArgs orc;
  auto* c_orc = app.add_subcommand("oracle", "Value iteration and simulated maximal ROA");
  c_orc->add_option("model", orc.model, "Problem file")->required()->check(CLI::ExistingFile);
  c_orc->add_flag("--vi", orc.vi, "Write the value field and convergence log");
  c_orc->add_flag("--sim", orc.sim, "Write the simulated maximal ROA mask");
  c_orc->add_option("--nodes", orc.nodes, "State nodes per axis (default 101, 61 for n = 3)");
  c_orc->add_option("--disturbance-nodes", orc.disturbance_nodes,
                    "Points per disturbance dimension")->capture_default_str();
  c_orc->add_option("--threshold", orc.threshold, "Sup-norm stopping threshold")
      ->capture_default_str();
  c_orc->add_option("--max-iterations", orc.max_iterations, "Sweep cap")->capture_default_str();
  c_orc->add_option("--resolution", orc.resolution, "Nodes per axis of the simulation grid");
  c_orc->add_option("--horizon,-K", orc.horizon, "Steps to reach the seed set")
      ->capture_default_str();
  c_orc->add_option("--policies,-M", orc.policies, "Random policies")->capture_default_str();
  c_orc->add_option("--slice", orc.slices, "Plane axis=value for n = 3 (repeatable)");
  add_common(c_orc);

  PlotArgs plot;
  auto* c_plot = app.add_subcommand("plot-data", "Sign grids of certificates as CSV");
  c_plot->add_option("certificate", plot.cert, "Certificate JSON")->required();
  c_plot->add_option("model", plot.model, "Problem file")->required()->check(CLI::ExistingFile);
  c_plot->add_option("--with", plot.extra_certs, "More certificates for the overlay");
  c_plot->add_option("--resolution", plot.resolution, "Nodes per axis")->capture_default_str();
  c_plot->add_option("--slice", plot.slices, "Plane axis=value for n = 3 (repeatable)");
  c_plot->add_flag("--overlay", plot.overlay,
                   "Add the simulated maximal ROA and write one combined CSV");
  c_plot->add_flag("--values", plot.values, "Also write u on the grid");
  add_common(c_plot);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    if (!app.get_subcommands().empty()) err << app.get_subcommands()[0]->help();
    return kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  RunManifest manifest(sub->get_name(), args, common.seed);
  manifest.config()["threads"] = common.threads;
  int code = kExitFailure;
  try {
    if (sub == c_check) code = Check(check, common, manifest, out);
    if (sub == c_solve) code = Solve(solve, common, manifest, out);
    if (sub == c_cert) code = Certify(certify, common, manifest, out);
    if (sub == c_orc) code = Oracle(orc, common, manifest, out);
    if (sub == c_plot) code = PlotData(plot, common, manifest, out);
  } catch (const model::ModelParseError& e) {
    err << "parse error at line " << e.line() << ", column " << e.column() << ": "
        << e.what() << "\n";
    return kExitUsage;
  } catch (const model::ModelValidationError& e) {
    err << "invalid model (" << e.check() << "): " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    code = kExitFailure;
  }
  manifest.set_exit_code(code);
  const fs::path mpath = fs::path(common.out_dir) / "manifest.json";
  try {
    manifest.Write(mpath);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return code;
}

}  // namespace cli
}  // namespace rroa
