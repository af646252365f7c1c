#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "carnot/value.hpp"
#include "carnot/vector_field.hpp"

namespace carnot {

struct BoxFamily {
  WeightVector weights;
  std::optional<int> k;  // 0-based rectified axis
  std::optional<int> s;  // drift order, w_k = s
  double T = 0.0;

  /// Throws IncompleteFamily unless k and s are set consistently.
  void require_complete() const;
};

enum class FamilyKind {
  kBox,
  kXi,
  kPi,
  kPiHat,
  /// |z_i| <= eta * b_i(eps, T) with the time-dependent bound b_i; eta plays the role of C.
  kTdEstimate,
  /// Same, with the sharper series-homogeneous bound eps^{w_i} for w_i <= s.
  kTdEstimateHomogeneous,
};

std::string to_string(FamilyKind kind);
FamilyKind family_kind_from_string(const std::string& name);

/// |z_i| <= eta^{w_i} for all i.
bool in_box(std::span<const double> z, double eta, const WeightVector& w);
/// Exists xi in [0, T] with z - xi e_k in Box(eta).
bool in_xi(std::span<const double> z, double eta, const BoxFamily& fam);
/// Box(eta), or z_k = xi in (0, T + eta^s] with the widened slice bounds.
bool in_pi(std::span<const double> z, double eta, const BoxFamily& fam);
/// As in_pi with |z_i| <= eta^{w_i} for w_i <= s.
bool in_pi_hat(std::span<const double> z, double eta, const BoxFamily& fam);

/// Bound b_i(eps, T): eps^{w_i} + eps T^{w_i/s} (w_i <= s), eps (eps + T^{1/s})^{w_i - 1} (w_i > s).
double td_bound(int i, double eps, double T, const BoxFamily& fam, bool homogeneous);

/// Membership for any family kind at parameter eta. TD kinds need eps.
bool in_family(std::span<const double> z, double eta, FamilyKind kind, const BoxFamily& fam, double eps = 0.0);

struct OuterFit {
  double C = 0.0;
  int argmax = -1;  // index of the extremal point, -1 for an all-zero cloud
  std::vector<double> extremal_point;
  std::size_t points = 0;
};

/// Smallest C (bisection to 1e-3 relative) with every point in the family at parameter C*eps
/// (or C itself for the TD kinds). Points are in chart coordinates.
OuterFit fit_outer_constant(const std::vector<std::vector<double>>& points, FamilyKind kind, const BoxFamily& fam,
                            double eps);

struct InnerTarget {
  std::vector<double> z;
  bool certified = false;
  double cost = 0.0;  // +inf when no witness was found
  double horizon = 0.0;
  std::string diagnostic;
};

struct InnerCoverage {
  double fraction = 0.0;
  std::vector<InnerTarget> targets;
};

/// Low-discrepancy targets in Xi_T(eps / C) (chart coordinates). to_original maps chart points to
/// original coordinates; each target counts when estimate_value certifies cost <= eps.
InnerCoverage verify_inner_inclusion(const SystemSpec& sys, std::span<const double> q, const BoxFamily& fam,
                                     double eps, double C, int density, const ValueBudget& budget,
                                     const std::function<std::vector<double>(std::span<const double>)>& to_original,
                                     unsigned threads = 0);

/// i-th point (1-based index i) of the Halton sequence in dim dimensions.
std::vector<double> halton(std::size_t index, int dim);

struct TimeRecord {
  double T_used = 0.0;
  double eps = 0.0;
  double z_k = 0.0;
};

struct TimeBoundFit {
  double C = 0.0;
  bool finite = true;
  int argmax = -1;
  /// Records whose ratio exceeds ten times the median ratio.
  int outliers = 0;
};

/// Smallest C with T_used <= C (eps^s + max(z_k, 0)) for all records.
TimeBoundFit time_bound_check(const std::vector<TimeRecord>& records, int s);

struct HolderFit {
  double alpha = 0.0;
  double intercept = 0.0;
  double C1 = 0.0;  // max d / v
  double C2 = 0.0;  // max v / d^{1/r}
  std::size_t pairs = 0;
  double decades = 0.0;
};

/// Least-squares slope of log v against log d. Needs >= 8 pairs spanning >= 2 decades in d.
HolderFit holder_fit(const std::vector<std::pair<double, double>>& pairs, int r);

/// Euclidean distance from z to the segment [0, T] e_k.
double distance_to_drift_segment(std::span<const double> z, int k, double T);

}  // namespace carnot
