#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace rroa {
namespace oracle {

struct GridAxis {
  double lo{0.0};
  double hi{0.0};
  int nodes{2};

  double at(int i) const {
    return nodes == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (nodes - 1);
  }
  double step() const { return nodes == 1 ? 0.0 : (hi - lo) / (nodes - 1); }
};

/// Scalar field on a rectangular grid, stored row-major (last axis fastest).
/// Grid axis a runs along state coordinate state_axes[a]; the remaining
/// state coordinates are fixed at base_point (used for slices).
struct GridField {
  std::vector<GridAxis> axes;
  std::vector<int> state_axes;
  std::vector<double> base_point;
  std::vector<double> values;

  /// Full-dimensional grid over the box [lo, hi]^n with `nodes` per axis.
  static GridField Box(int n, double lo, double hi, int nodes, double fill = 0.0);
  /// Grid over [lo, hi]² in coordinates (a, b) of an n-dimensional state,
  /// with the other coordinates fixed at `base`.
  static GridField Slice(std::vector<double> base, int a, int b, double lo,
                         double hi, int nodes, double fill = 0.0);

  std::size_t size() const { return values.size(); }
  int dims() const { return static_cast<int>(axes.size()); }
  /// Grid multi-index of flat index `flat`.
  std::vector<int> Index(std::size_t flat) const;
  std::size_t Flat(std::span<const int> index) const;
  /// State-space point of node `flat`.
  std::vector<double> Point(std::size_t flat) const;
  /// Multilinear interpolation at a full state point (only state_axes are
  /// read); returns `outside` if the point leaves the grid box.
  double Interpolate(std::span<const double> x, double outside = 1.0) const;

  double cell_volume() const;
  std::size_t Count(double threshold = 0.5) const;  // nodes with value > threshold
  bool SameShape(const GridField& o) const;

  /// Two-dimensional fields: a header row `y\x,x_0,...,x_{N-1}` then one row
  /// per second-axis node, `y_j,v_0j,...`. Other dimensions: long format
  /// with one `coord...,value` line per node.
  void WriteCsv(const std::filesystem::path& path,
                const std::vector<std::string>& names = {}) const;
};

/// Nodes set in `inner` but not in `outer`, excluding those within `band`
/// grid cells (Chebyshev distance) of an unset node of `outer`.
std::size_t CountInteriorViolations(const GridField& inner, const GridField& outer,
                                    int band = 1);
/// Set nodes of `inner` not set in `outer`.
std::size_t CountViolations(const GridField& inner, const GridField& outer);
/// Set nodes of `mask` with an unset neighbour (Chebyshev distance 1).
std::size_t CountBoundaryNodes(const GridField& mask);

}  // namespace oracle
}  // namespace rroa
