#include "rroa/oracle/value_iteration.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "rroa/util/parallel.h"

namespace rroa {
namespace oracle {

using model::SystemModel;

namespace {

// Where f(x_i, d_j) lands: the cell's lowest corner and the fractional
// offsets along each axis. base < 0 marks a point off the grid box.
struct Stencil {
  std::int64_t base{-1};
  double frac[3]{0.0, 0.0, 0.0};
};

Stencil Locate(const GridField& grid, std::span<const double> y) {
  Stencil s;
  std::int64_t flat = 0;
  for (int a = 0; a < grid.dims(); ++a) {
    const auto& ax = grid.axes[a];
    const double v = y[grid.state_axes[a]];
    if (!(v >= ax.lo && v <= ax.hi)) return s;
    const double t = (v - ax.lo) / ax.step();
    int i = static_cast<int>(std::floor(t));
    i = std::clamp(i, 0, ax.nodes - 2);
    s.frac[a] = t - i;
    flat = flat * ax.nodes + i;
  }
  s.base = flat;
  return s;
}

// Flat offsets of the 2^n cell corners relative to the base node.
std::vector<std::int64_t> CornerOffsets(const GridField& grid) {
  const int d = grid.dims();
  std::vector<std::int64_t> out(std::size_t{1} << d);
  for (std::size_t c = 0; c < out.size(); ++c) {
    std::int64_t off = 0;
    for (int a = 0; a < d; ++a) off = off * grid.axes[a].nodes + ((c >> a) & 1);
    out[c] = off;
  }
  return out;
}

double Gather(const std::vector<double>& v, const Stencil& s,
              const std::vector<std::int64_t>& corners, int dims) {
  if (s.base < 0) return 1.0;
  double acc = 0.0;
  for (std::size_t c = 0; c < corners.size(); ++c) {
    double w = 1.0;
    for (int a = 0; a < dims; ++a) w *= ((c >> a) & 1) ? s.frac[a] : 1.0 - s.frac[a];
    if (w != 0.0) acc += w * v[s.base + corners[c]];
  }
  return acc;
}

// 1 − min_j l(1 − h_j(x)), l(s) = max(s, 0).
double ConstraintBranch(const std::vector<poly::Polynomial>& hx,
                        std::span<const double> x) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& h : hx) lo = std::min(lo, std::max(1.0 - h.eval(x), 0.0));
  return 1.0 - lo;
}

}  // namespace

int StateNodes(const ViSettings& settings, int n) {
  if (settings.state_nodes > 0) return settings.state_nodes;
  return n <= 2 ? 101 : 61;
}

GridField StateBox(const SystemModel& model, int nodes, double fill) {
  const double r = std::sqrt(model.R2);
  return GridField::Box(model.n, -r, r, nodes, fill);
}

ViResult ValueIteration(const SystemModel& model, const ViSettings& settings) {
  if (settings.disturbance_nodes < 1 || settings.max_iterations < 1 ||
      !(settings.threshold > 0)) {
    throw std::invalid_argument("ValueIteration: settings must be positive");
  }
  if (model.n > 3) throw std::invalid_argument("ValueIteration: n > 3 not supported");
  const int n = model.n;
  ViResult out;
  out.v = StateBox(model, StateNodes(settings, n));
  const GridField& grid = out.v;
  const std::size_t N = grid.size();
  const auto dgrid = model.DisturbanceGrid(settings.disturbance_nodes);
  const std::size_t nd = dgrid.size();
  if (nd == 0) throw std::invalid_argument("ValueIteration: empty disturbance grid");
  const auto hx = model.XPolys();
  const auto corners = CornerOffsets(grid);

  // Static data: lower branch, cost and the landing cells of f(x_i, d_j).
  std::vector<double> lower(N), cost(N);
  std::vector<char> active(N, 0);
  std::vector<Stencil> stencil(N * nd);
  util::ParallelFor(N, settings.threads, [&](std::size_t i) {
    const auto x = grid.Point(i);
    lower[i] = ConstraintBranch(hx, x);
    cost[i] = model.g.eval(x);
    // Nodes outside X stay at 1.
    if (lower[i] >= 1.0) return;
    active[i] = 1;
    for (std::size_t j = 0; j < nd; ++j) {
      stencil[i * nd + j] = Locate(grid, model.Step(x, dgrid[j]));
    }
  });

  std::vector<double> v(N), next(N);
  for (std::size_t i = 0; i < N; ++i) v[i] = std::clamp(lower[i], 0.0, 1.0);
  std::vector<double> delta(N), drop(N);
  for (int it = 0; it < settings.max_iterations; ++it) {
    util::ParallelFor(N, settings.threads, [&](std::size_t i) {
      double val = v[i];
      if (active[i]) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < nd; ++j) {
          best = std::max(best, Gather(v, stencil[i * nd + j], corners, n));
        }
        val = std::clamp(std::max((best + cost[i]) / (1.0 + cost[i]), lower[i]), 0.0, 1.0);
      }
      next[i] = val;
      delta[i] = std::abs(val - v[i]);
      drop[i] = v[i] - val;
    });
    double d = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      d = std::max(d, delta[i]);
      out.max_decrease = std::max(out.max_decrease, drop[i]);
    }
    v.swap(next);
    out.deltas.push_back(d);
    out.iterations = it + 1;
    if (d < settings.threshold) {
      out.converged = true;
      break;
    }
  }
  out.v.values = std::move(v);
  return out;
}

void WriteConvergenceLog(const ViResult& result, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os.precision(17);
  os << "iteration,delta\n";
  for (std::size_t i = 0; i < result.deltas.size(); ++i) {
    os << i + 1 << ',' << result.deltas[i] << '\n';
  }
}

BellmanReport BellmanResidual(const SystemModel& model, const GridField& v,
                              int disturbance_nodes) {
  const auto dgrid = model.DisturbanceGrid(disturbance_nodes);
  const auto hx = model.XPolys();
  auto residual = [&](std::span<const double> x, double vx) {
    const double g = model.g.eval(x);
    double first = std::numeric_limits<double>::infinity();
    for (const auto& d : dgrid) {
      first = std::min(first, vx - v.Interpolate(model.Step(x, d)) - g * (1.0 - vx));
    }
    const double second = vx - ConstraintBranch(hx, x);
    return std::abs(std::min(first, second));
  };

  BellmanReport rep;
  const int dims = v.dims();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto idx = v.Index(i);
    bool interior = true;
    for (int a = 0; a < dims; ++a) {
      interior = interior && idx[a] > 0 && idx[a] < v.axes[a].nodes - 1;
    }
    if (!interior) continue;
    const auto x = v.Point(i);
    const double r = residual(x, v.values[i]);
    ++rep.nodes_checked;
    if (r > rep.node_residual) {
      rep.node_residual = r;
      rep.node_location = x;
    }
    // Centre of the cell above this node.
    bool has_cell = true;
    for (int a = 0; a < dims; ++a) has_cell = has_cell && idx[a] < v.axes[a].nodes - 2;
    if (!has_cell) continue;
    auto c = x;
    for (int a = 0; a < dims; ++a) c[v.state_axes[a]] += 0.5 * v.axes[a].step();
    rep.midpoint_residual = std::max(rep.midpoint_residual, residual(c, v.Interpolate(c)));
  }
  return rep;
}

UpperReport CompareUpper(const poly::Polynomial& u, const GridField& v, double R2,
                         bool interior_only) {
  UpperReport rep;
  const int dims = v.dims();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (interior_only) {
      const auto idx = v.Index(i);
      bool interior = true;
      for (int a = 0; a < dims; ++a) {
        interior = interior && idx[a] > 0 && idx[a] < v.axes[a].nodes - 1;
      }
      if (!interior) continue;
    }
    const auto x = v.Point(i);
    double h0 = 0.0;
    for (double c : x) h0 += c * c;
    if (h0 > R2) continue;
    ++rep.nodes_checked;
    const double excess = v.values[i] - u.eval(x);
    if (excess > rep.max_excess) {
      rep.max_excess = excess;
      rep.location = x;
    }
  }
  return rep;
}

}  // namespace oracle
}  // namespace rroa
