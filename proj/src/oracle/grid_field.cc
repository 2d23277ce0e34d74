#include "rroa/oracle/grid_field.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace rroa {
namespace oracle {

GridField GridField::Box(int n, double lo, double hi, int nodes, double fill) {
  if (nodes < 2) throw std::invalid_argument("GridField: need >= 2 nodes per axis");
  GridField g;
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) {
    g.axes.push_back({lo, hi, nodes});
    g.state_axes.push_back(i);
    total *= nodes;
  }
  g.base_point.assign(n, 0.0);
  g.values.assign(total, fill);
  return g;
}

GridField GridField::Slice(std::vector<double> base, int a, int b, double lo,
                           double hi, int nodes, double fill) {
  if (nodes < 2) throw std::invalid_argument("GridField: need >= 2 nodes per axis");
  const int n = static_cast<int>(base.size());
  if (a < 0 || b < 0 || a >= n || b >= n || a == b) {
    throw std::invalid_argument("GridField::Slice: bad axes");
  }
  GridField g;
  g.axes = {{lo, hi, nodes}, {lo, hi, nodes}};
  g.state_axes = {a, b};
  g.base_point = std::move(base);
  g.values.assign(static_cast<std::size_t>(nodes) * nodes, fill);
  return g;
}

std::vector<int> GridField::Index(std::size_t flat) const {
  std::vector<int> idx(axes.size());
  for (int a = dims() - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % axes[a].nodes);
    flat /= axes[a].nodes;
  }
  return idx;
}

std::size_t GridField::Flat(std::span<const int> index) const {
  std::size_t flat = 0;
  for (int a = 0; a < dims(); ++a) flat = flat * axes[a].nodes + index[a];
  return flat;
}

std::vector<double> GridField::Point(std::size_t flat) const {
  std::vector<double> x = base_point;
  const auto idx = Index(flat);
  for (int a = 0; a < dims(); ++a) x[state_axes[a]] = axes[a].at(idx[a]);
  return x;
}

double GridField::Interpolate(std::span<const double> x, double outside) const {
  const int d = dims();
  int base[8];
  double frac[8];
  if (d > 8) throw std::invalid_argument("GridField::Interpolate: > 8 dims");
  for (int a = 0; a < d; ++a) {
    const auto& ax = axes[a];
    const double v = x[state_axes[a]];
    if (!(v >= ax.lo && v <= ax.hi)) return outside;
    double t = (v - ax.lo) / ax.step();
    int i = static_cast<int>(std::floor(t));
    if (i >= ax.nodes - 1) i = ax.nodes - 2;
    if (i < 0) i = 0;
    base[a] = i;
    frac[a] = t - i;
  }
  double acc = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1.0;
    std::size_t flat = 0;
    for (int a = 0; a < d; ++a) {
      const int bit = (corner >> a) & 1;
      w *= bit ? frac[a] : 1.0 - frac[a];
      flat = flat * axes[a].nodes + base[a] + bit;
    }
    if (w != 0.0) acc += w * values[flat];
  }
  return acc;
}

double GridField::cell_volume() const {
  double v = 1.0;
  for (const auto& a : axes) v *= a.step();
  return v;
}

std::size_t GridField::Count(double threshold) const {
  std::size_t c = 0;
  for (double v : values) c += v > threshold;
  return c;
}

bool GridField::SameShape(const GridField& o) const {
  if (axes.size() != o.axes.size() || state_axes != o.state_axes) return false;
  for (std::size_t a = 0; a < axes.size(); ++a) {
    if (axes[a].lo != o.axes[a].lo || axes[a].hi != o.axes[a].hi ||
        axes[a].nodes != o.axes[a].nodes) {
      return false;
    }
  }
  return true;
}

void GridField::WriteCsv(const std::filesystem::path& path,
                         const std::vector<std::string>& names) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  char buf[64];
  auto name = [&](int a) {
    const int s = state_axes[a];
    return s < static_cast<int>(names.size()) ? names[s] : "x" + std::to_string(s + 1);
  };
  if (dims() == 2) {
    out << name(1) << "\\" << name(0);
    for (int i = 0; i < axes[0].nodes; ++i) {
      std::snprintf(buf, sizeof(buf), ",%.10g", axes[0].at(i));
      out << buf;
    }
    out << "\n";
    for (int j = 0; j < axes[1].nodes; ++j) {
      std::snprintf(buf, sizeof(buf), "%.10g", axes[1].at(j));
      out << buf;
      for (int i = 0; i < axes[0].nodes; ++i) {
        std::snprintf(buf, sizeof(buf), ",%.10g",
                      values[static_cast<std::size_t>(i) * axes[1].nodes + j]);
        out << buf;
      }
      out << "\n";
    }
    return;
  }
  for (int a = 0; a < dims(); ++a) out << name(a) << ",";
  out << "value\n";
  for (std::size_t f = 0; f < values.size(); ++f) {
    const auto idx = Index(f);
    for (int a = 0; a < dims(); ++a) {
      std::snprintf(buf, sizeof(buf), "%.10g,", axes[a].at(idx[a]));
      out << buf;
    }
    std::snprintf(buf, sizeof(buf), "%.10g\n", values[f]);
    out << buf;
  }
}

namespace {

template <typename Fn>
void ForNeighbours(const GridField& g, std::size_t flat, int band, Fn fn) {
  const auto idx = g.Index(flat);
  const int d = g.dims();
  std::vector<int> off(d, -band);
  std::vector<int> cur(d);
  for (;;) {
    bool inside = true;
    for (int a = 0; a < d; ++a) {
      cur[a] = idx[a] + off[a];
      inside &= cur[a] >= 0 && cur[a] < g.axes[a].nodes;
    }
    if (inside) fn(g.Flat(cur));
    int a = d - 1;
    while (a >= 0 && ++off[a] > band) off[a--] = -band;
    if (a < 0) break;
  }
}

}  // namespace

std::size_t CountViolations(const GridField& inner, const GridField& outer) {
  if (!inner.SameShape(outer)) throw std::invalid_argument("grid shapes differ");
  std::size_t c = 0;
  for (std::size_t f = 0; f < inner.size(); ++f) {
    c += inner.values[f] > 0.5 && !(outer.values[f] > 0.5);
  }
  return c;
}

std::size_t CountInteriorViolations(const GridField& inner, const GridField& outer,
                                    int band) {
  if (!inner.SameShape(outer)) throw std::invalid_argument("grid shapes differ");
  std::size_t c = 0;
  for (std::size_t f = 0; f < inner.size(); ++f) {
    if (!(inner.values[f] > 0.5) || outer.values[f] > 0.5) continue;
    bool near_boundary = false;
    ForNeighbours(outer, f, band, [&](std::size_t nb) {
      near_boundary |= outer.values[nb] > 0.5;
    });
    // A violating node next to a set node of `outer` lies in the band.
    if (!near_boundary) ++c;
  }
  return c;
}

std::size_t CountBoundaryNodes(const GridField& mask) {
  std::size_t c = 0;
  for (std::size_t f = 0; f < mask.size(); ++f) {
    if (!(mask.values[f] > 0.5)) continue;
    bool edge = false;
    ForNeighbours(mask, f, 1, [&](std::size_t nb) { edge |= !(mask.values[nb] > 0.5); });
    c += edge;
  }
  return c;
}

}  // namespace oracle
}  // namespace rroa
