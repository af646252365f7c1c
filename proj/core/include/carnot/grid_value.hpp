#pragma once

#include <span>
#include <vector>

#include "carnot/dynamics.hpp"

namespace carnot {

struct GridSpec {
  double x_min = -1.0, x_max = 1.0;
  double y_min = -1.0, y_max = 1.0;
  int nx = 101, ny = 101;
  /// Stencil radius: moves to every node offset (i, j) with max(|i|, |j|) <= radius and gcd(i, j) = 1.
  int radius = 3;
};

struct GridValue {
  GridSpec spec;
  std::vector<double> values;  // row-major, index j * nx + i; +inf where unreachable
  int source_i = 0, source_j = 0;

  double hx() const { return (spec.x_max - spec.x_min) / (spec.nx - 1); }
  double hy() const { return (spec.y_max - spec.y_min) / (spec.ny - 1); }
  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * static_cast<std::size_t>(spec.nx) + static_cast<std::size_t>(i)]; }
  /// Value at the grid node nearest to (x, y).
  double nearest(double x, double y) const;
};

/// Dijkstra over the grid graph of a driftless 2D system. An edge with displacement d costs the
/// minimum |u| with F(midpoint) u = d, and is absent when d is not in the span of the generators.
GridValue grid_value_2d(const SystemSpec& sys, std::span<const double> q, const GridSpec& spec);

}  // namespace carnot
