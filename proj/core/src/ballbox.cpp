#include "carnot/ballbox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "carnot/errors.hpp"

namespace carnot {

void BoxFamily::require_complete() const {
  if (!k || !s) throw Error(ErrorCode::kIncompleteFamily, "box family needs the drift axis k and order s");
  if (*k < 0 || *k >= weights.size()) throw Error(ErrorCode::kIncompleteFamily, "drift axis outside the weight vector");
  if (weights[*k] != *s)
    throw Error(ErrorCode::kIncompleteFamily,
                "w_k = " + std::to_string(weights[*k]) + " differs from s = " + std::to_string(*s));
  if (T < 0.0) throw Error(ErrorCode::kIncompleteFamily, "horizon must be nonnegative");
}

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::kBox:
      return "box";
    case FamilyKind::kXi:
      return "xi";
    case FamilyKind::kPi:
      return "pi";
    case FamilyKind::kPiHat:
      return "pi-hat";
    case FamilyKind::kTdEstimate:
      return "td";
    case FamilyKind::kTdEstimateHomogeneous:
      return "td-homogeneous";
  }
  return "unknown";
}

FamilyKind family_kind_from_string(const std::string& name) {
  for (auto k : {FamilyKind::kBox, FamilyKind::kXi, FamilyKind::kPi, FamilyKind::kPiHat, FamilyKind::kTdEstimate,
                 FamilyKind::kTdEstimateHomogeneous})
    if (to_string(k) == name) return k;
  throw Error(ErrorCode::kConfig, "unknown family '" + name + "'");
}

bool in_box(std::span<const double> z, double eta, const WeightVector& w) {
  if (static_cast<int>(z.size()) != w.size()) throw Error(ErrorCode::kDimensionMismatch, "point and weights differ in size");
  if (eta < 0.0) throw Error(ErrorCode::kInvalidArgument, "eta must be nonnegative");
  for (int i = 0; i < w.size(); ++i)
    if (std::abs(z[static_cast<std::size_t>(i)]) > std::pow(eta, w[i])) return false;
  return true;
}

bool in_xi(std::span<const double> z, double eta, const BoxFamily& fam) {
  fam.require_complete();
  const int k = *fam.k;
  std::vector<double> shifted(z.begin(), z.end());
  const double xi = std::clamp(shifted[static_cast<std::size_t>(k)], 0.0, fam.T);
  shifted[static_cast<std::size_t>(k)] -= xi;
  return in_box(shifted, eta, fam.weights);
}

namespace {

bool in_slice(std::span<const double> z, double eta, const BoxFamily& fam, bool hat) {
  fam.require_complete();
  if (in_box(z, eta, fam.weights)) return true;
  const int k = *fam.k;
  const int s = *fam.s;
  const double xi = z[static_cast<std::size_t>(k)];
  // slices run past T by eta^s to absorb the far-end overshoot
  if (!(xi > 0.0) || xi > fam.T + std::pow(eta, s)) return false;
  for (int i = 0; i < fam.weights.size(); ++i) {
    if (i == k) continue;
    const int w = fam.weights[i];
    double bound;
    if (w <= s) {
      bound = hat ? std::pow(eta, w) : std::pow(eta, w) + eta * std::pow(xi, static_cast<double>(w) / s);
    } else {
      bound = eta * std::pow(eta + std::pow(xi, 1.0 / s), w - 1);
    }
    if (std::abs(z[static_cast<std::size_t>(i)]) > bound) return false;
  }
  return true;
}

}  // namespace

bool in_pi(std::span<const double> z, double eta, const BoxFamily& fam) { return in_slice(z, eta, fam, false); }
bool in_pi_hat(std::span<const double> z, double eta, const BoxFamily& fam) { return in_slice(z, eta, fam, true); }

double td_bound(int i, double eps, double T, const BoxFamily& fam, bool homogeneous) {
  if (!fam.s) throw Error(ErrorCode::kIncompleteFamily, "time-dependent bound needs the drift order s");
  const int s = *fam.s;
  const int w = fam.weights[i];
  if (w <= s) return homogeneous ? std::pow(eps, w) : std::pow(eps, w) + eps * std::pow(T, static_cast<double>(w) / s);
  return eps * std::pow(eps + std::pow(T, 1.0 / s), w - 1);
}

bool in_family(std::span<const double> z, double eta, FamilyKind kind, const BoxFamily& fam, double eps) {
  switch (kind) {
    case FamilyKind::kBox:
      return in_box(z, eta, fam.weights);
    case FamilyKind::kXi:
      return in_xi(z, eta, fam);
    case FamilyKind::kPi:
      return in_pi(z, eta, fam);
    case FamilyKind::kPiHat:
      return in_pi_hat(z, eta, fam);
    case FamilyKind::kTdEstimate:
    case FamilyKind::kTdEstimateHomogeneous: {
      const bool hom = kind == FamilyKind::kTdEstimateHomogeneous;
      for (int i = 0; i < fam.weights.size(); ++i)
        if (std::abs(z[static_cast<std::size_t>(i)]) > eta * td_bound(i, eps, fam.T, fam, hom)) return false;
      return true;
    }
  }
  return false;
}

OuterFit fit_outer_constant(const std::vector<std::vector<double>>& points, FamilyKind kind, const BoxFamily& fam,
                            double eps) {
  if (points.empty()) throw Error(ErrorCode::kInsufficientData, "empty cloud");
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps must be positive");
  const bool td = kind == FamilyKind::kTdEstimate || kind == FamilyKind::kTdEstimateHomogeneous;
  const double unit = td ? 1.0 : eps;
  OuterFit fit;
  fit.points = points.size();
  for (std::size_t p = 0; p < points.size(); ++p) {
    const auto& z = points[p];
    const bool zero = std::all_of(z.begin(), z.end(), [](double x) { return x == 0.0; });
    if (zero) continue;
    double hi = 1.0;
    while (!in_family(z, hi * unit, kind, fam, eps)) {
      hi *= 2.0;
      if (hi > 1e12) {
        hi = std::numeric_limits<double>::infinity();
        break;
      }
    }
    if (std::isfinite(hi)) {
      double lo = 0.0;
      while (hi - lo > 1e-3 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (in_family(z, mid * unit, kind, fam, eps))
          hi = mid;
        else
          lo = mid;
      }
    }
    if (fit.argmax < 0 || hi > fit.C) {
      fit.C = hi;
      fit.argmax = static_cast<int>(p);
      fit.extremal_point = z;
    }
  }
  return fit;
}

std::vector<double> halton(std::size_t index, int dim) {
  static constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
  if (dim < 1 || dim > 10) throw Error(ErrorCode::kInvalidArgument, "halton dimension must be 1..10");
  std::vector<double> out;
  for (int d = 0; d < dim; ++d) {
    const int b = kPrimes[d];
    double f = 1.0;
    double r = 0.0;
    for (std::size_t i = index; i > 0; i /= static_cast<std::size_t>(b)) {
      f /= b;
      r += f * static_cast<double>(i % static_cast<std::size_t>(b));
    }
    out.push_back(r);
  }
  return out;
}

InnerCoverage verify_inner_inclusion(const SystemSpec& sys, std::span<const double> q, const BoxFamily& fam,
                                     double eps, double C, int density, const ValueBudget& budget,
                                     const std::function<std::vector<double>(std::span<const double>)>& to_original,
                                     unsigned threads) {
  fam.require_complete();
  if (!(eps > 0.0) || !(C > 0.0) || density < 1) throw Error(ErrorCode::kInvalidArgument, "need eps, C > 0 and density >= 1");
  const int n = fam.weights.size();
  const int k = *fam.k;
  const double eta = eps / C;
  std::size_t count = 1;
  for (int i = 0; i < n; ++i) count *= static_cast<std::size_t>(density);
  InnerCoverage cov;
  cov.targets.resize(count);
  parallel_for(
      count,
      [&](std::size_t idx) {
        const auto h = halton(idx + 1, n + 1);
        std::vector<double> z(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = (2.0 * h[static_cast<std::size_t>(i)] - 1.0) * std::pow(eta, fam.weights[i]);
        z[static_cast<std::size_t>(k)] += fam.T * h[static_cast<std::size_t>(n)];
        auto& t = cov.targets[idx];
        t.z = z;
        ValueBudget b = budget;
        b.seed = derive_seed(budget.seed, idx);
        b.stop_below = eps;
        try {
          const auto target = to_original(z);
          const auto est = estimate_value(sys, q, target, fam.T, b);
          t.cost = est.upper;
          t.horizon = est.horizon_used;
          t.certified = est.upper <= eps;
          if (!t.certified) t.diagnostic = "best cost " + std::to_string(est.upper);
        } catch (const Error& e) {
          t.cost = std::numeric_limits<double>::infinity();
          t.diagnostic = e.what();
        }
      },
      threads);
  std::size_t ok = 0;
  for (const auto& t : cov.targets) ok += t.certified ? 1 : 0;
  cov.fraction = static_cast<double>(ok) / static_cast<double>(count);
  return cov;
}

TimeBoundFit time_bound_check(const std::vector<TimeRecord>& records, int s) {
  if (records.empty()) throw Error(ErrorCode::kInsufficientData, "no time records");
  if (s < 1) throw Error(ErrorCode::kInvalidArgument, "drift order must be >= 1");
  TimeBoundFit fit;
  std::vector<double> ratios;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const double denom = std::pow(r.eps, s) + std::max(r.z_k, 0.0);
    double ratio;
    if (denom > 0.0) {
      ratio = r.T_used / denom;
    } else {
      ratio = r.T_used > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    ratios.push_back(ratio);
    if (fit.argmax < 0 || ratio > fit.C) {
      fit.C = ratio;
      fit.argmax = static_cast<int>(i);
    }
  }
  fit.finite = std::isfinite(fit.C);
  auto sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  for (double r : ratios)
    if (r > 10.0 * median) ++fit.outliers;
  return fit;
}

HolderFit holder_fit(const std::vector<std::pair<double, double>>& pairs, int r) {
  if (r < 1) throw Error(ErrorCode::kInvalidArgument, "degree of non-holonomy must be >= 1");
  std::vector<std::pair<double, double>> logs;
  double dmin = std::numeric_limits<double>::infinity();
  double dmax = 0.0;
  for (const auto& [d, v] : pairs) {
    if (!(d > 0.0) || !(v > 0.0) || !std::isfinite(d) || !std::isfinite(v)) continue;
    logs.emplace_back(std::log(d), std::log(v));
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  HolderFit fit;
  fit.pairs = logs.size();
  fit.decades = logs.empty() ? 0.0 : std::log10(dmax / dmin);
  if (fit.pairs < 8) throw Error(ErrorCode::kInsufficientData, "holder fit needs at least 8 positive pairs");
  if (fit.decades < 2.0) throw Error(ErrorCode::kInsufficientData, "distances span fewer than 2 decades");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : logs) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double N = static_cast<double>(logs.size());
  fit.alpha = (N * sxy - sx * sy) / (N * sxx - sx * sx);
  fit.intercept = (sy - fit.alpha * sx) / N;
  for (const auto& [d, v] : pairs) {
    if (!(d > 0.0) || !(v > 0.0)) continue;
    fit.C1 = std::max(fit.C1, d / v);
    fit.C2 = std::max(fit.C2, v / std::pow(d, 1.0 / r));
  }
  return fit;
}

double distance_to_drift_segment(std::span<const double> z, int k, double T) {
  if (k < 0 || k >= static_cast<int>(z.size())) throw Error(ErrorCode::kIndexOutOfRange, "drift axis out of range");
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    double d = z[i];
    if (static_cast<int>(i) == k) d -= std::clamp(z[i], 0.0, T);
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace carnot
