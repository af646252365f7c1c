#include "carnot/grid_value.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "carnot/errors.hpp"

namespace carnot {

double GridValue::nearest(double x, double y) const {
  const int i = static_cast<int>(std::lround((x - spec.x_min) / hx()));
  const int j = static_cast<int>(std::lround((y - spec.y_min) / hy()));
  if (i < 0 || j < 0 || i >= spec.nx || j >= spec.ny) throw Error(ErrorCode::kIndexOutOfRange, "point outside the grid");
  return at(i, j);
}

GridValue grid_value_2d(const SystemSpec& sys, std::span<const double> q, const GridSpec& spec) {
  if (sys.dim() != 2) throw Error(ErrorCode::kDimensionMismatch, "grid oracle needs a two-dimensional system");
  if (sys.drift() || sys.time_varying())
    throw Error(ErrorCode::kInvalidArgument, "grid oracle handles driftless autonomous systems only");
  if (spec.nx < 2 || spec.ny < 2 || spec.radius < 1 || !(spec.x_max > spec.x_min) || !(spec.y_max > spec.y_min))
    throw Error(ErrorCode::kInvalidArgument, "invalid grid specification");

  GridValue gv;
  gv.spec = spec;
  const double hx = gv.hx();
  const double hy = gv.hy();
  gv.source_i = static_cast<int>(std::lround((q[0] - spec.x_min) / hx));
  gv.source_j = static_cast<int>(std::lround((q[1] - spec.y_min) / hy));
  if (gv.source_i < 0 || gv.source_j < 0 || gv.source_i >= spec.nx || gv.source_j >= spec.ny)
    throw Error(ErrorCode::kIndexOutOfRange, "source outside the grid");

  std::vector<std::pair<int, int>> offsets;
  for (int di = -spec.radius; di <= spec.radius; ++di)
    for (int dj = -spec.radius; dj <= spec.radius; ++dj)
      if ((di != 0 || dj != 0) && std::gcd(std::abs(di), std::abs(dj)) == 1) offsets.emplace_back(di, dj);

  const int m = sys.controls();
  const auto gens = sys.generators_at_zero();
  std::vector<CompiledField> compiled;
  for (const auto& g : gens) compiled.emplace_back(g);

  auto edge_cost = [&](double xm, double ym, double dx, double dy) {
    Eigen::MatrixXd F(2, m);
    const double p[2] = {xm, ym};
    for (int i = 0; i < m; ++i) {
      double v[2];
      compiled[static_cast<std::size_t>(i)].evaluate(p, v);
      F(0, i) = v[0];
      F(1, i) = v[1];
    }
    Eigen::Vector2d d(dx, dy);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(F);
    cod.setThreshold(1e-12);
    const Eigen::VectorXd u = cod.solve(d);
    if ((F * u - d).norm() > 1e-9 * std::max(1.0, d.norm())) return std::numeric_limits<double>::infinity();
    return u.norm();
  };

  const std::size_t N = static_cast<std::size_t>(spec.nx) * static_cast<std::size_t>(spec.ny);
  gv.values.assign(N, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  const std::size_t src = static_cast<std::size_t>(gv.source_j) * static_cast<std::size_t>(spec.nx) + static_cast<std::size_t>(gv.source_i);
  gv.values[src] = 0.0;
  heap.emplace(0.0, src);
  while (!heap.empty()) {
    const auto [d, idx] = heap.top();
    heap.pop();
    if (d > gv.values[idx]) continue;
    const int i = static_cast<int>(idx % static_cast<std::size_t>(spec.nx));
    const int j = static_cast<int>(idx / static_cast<std::size_t>(spec.nx));
    const double x = spec.x_min + i * hx;
    const double y = spec.y_min + j * hy;
    for (const auto& [di, dj] : offsets) {
      const int ni = i + di;
      const int nj = j + dj;
      if (ni < 0 || nj < 0 || ni >= spec.nx || nj >= spec.ny) continue;
      const double c = edge_cost(x + 0.5 * di * hx, y + 0.5 * dj * hy, di * hx, dj * hy);
      if (!std::isfinite(c)) continue;
      const std::size_t nidx = static_cast<std::size_t>(nj) * static_cast<std::size_t>(spec.nx) + static_cast<std::size_t>(ni);
      if (d + c < gv.values[nidx]) {
        gv.values[nidx] = d + c;
        heap.emplace(d + c, nidx);
      }
    }
  }
  return gv;
}

}  // namespace carnot
