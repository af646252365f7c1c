#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "carnot/flag.hpp"
#include "carnot/vector_field.hpp"

namespace carnot {

/// Polynomial coordinates z centred at `center`.
///
/// `forward` expresses z in terms of y = x - center, `inverse` expresses y in terms of z.
/// Both are stored one degree above `cap`, so fields pushed into the chart are exact modulo
/// monomials of total degree > cap.
struct PrivilegedChart {
  RationalPoint center;
  int cap = 0;
  std::vector<TruncatedPolynomial> forward;
  std::vector<TruncatedPolynomial> inverse;
  WeightVector weights;
  int r = 0;
  std::optional<int> rectified_axis;  // 0-based k with z_* f0 = d/dz_k
  std::optional<int> drift_order;     // s, set by rectify_drift
  FlagReport flag;

  int dim() const { return static_cast<int>(center.size()); }

  /// Expresses a field given in original coordinates in chart coordinates, truncated at `cap`.
  PolyVectorField push(const PolyVectorField& f) const;
  PolyVectorField push(const PolyVectorField& f, int cap_override) const;

  std::vector<double> to_chart(std::span<const double> x) const;
  std::vector<double> from_chart(std::span<const double> z) const;
};

struct ChartOptions {
  int r_max = 6;
  /// Default r + 3.
  std::optional<int> cap;
};

/// Smallest k with (f_{i1}...f_{ik} a)(0) != 0; fields and a share coordinates centred at the
/// base point. Throws OrderExceedsCap when no such k <= max_depth is found, or when truncation
/// makes deeper derivatives unreliable.
int order_of_function(const TruncatedPolynomial& a, std::span<const PolyVectorField> fields, int max_depth);

/// Same, with a and fields in original coordinates and the base point q.
int order_of_function(const TruncatedPolynomial& a, std::span<const PolyVectorField> fields,
                      std::span<const Rational> q, int max_depth);

/// min weighted degree of a field already in chart coordinates; ZeroField for f = 0.
int order_of_field(const PolyVectorField& f, const PrivilegedChart& chart);

PrivilegedChart build_chart(std::span<const PolyVectorField> fields, std::span<const Rational> q,
                            const ChartOptions& options = {});

/// Straightens f0 (original coordinates) to a coordinate field d/dz_k with w_k = s, then
/// restores the privileged property. Throws ZeroDriftAtPoint or RectificationFailed.
PrivilegedChart rectify_drift(const PrivilegedChart& chart, const PolyVectorField& f0,
                              std::span<const PolyVectorField> fields);

/// Weighted-degree -1 parts of the generators in chart coordinates.
std::vector<PolyVectorField> nilpotent_approximation(std::span<const PolyVectorField> fields,
                                                     const PrivilegedChart& chart);

struct DriftDecomposition {
  int s = 0;
  PolyVectorField principal;
  PolyVectorField remainder;
};

/// f0 in chart coordinates split as (degree -s part) + (higher part).
DriftDecomposition drift_decomposition(const PolyVectorField& f0_in_chart, const PrivilegedChart& chart);

struct SeriesApproxSystem {
  int s = 0;
  int rho = 0;
  WeightVector weights;
  /// terms[j] = ((0, f_j^0), (1, f_j^1), ..., (rho, f_j^rho)); f_j^l has weighted degree -l*s-1.
  std::vector<std::vector<std::pair<int, PolyVectorField>>> terms;

  int generators() const { return static_cast<int>(terms.size()); }
};

/// fields and f0 in original coordinates.
SeriesApproxSystem homogeneous_series_approx(std::span<const PolyVectorField> fields, const PolyVectorField& f0,
                                             const PrivilegedChart& chart);

struct PrivilegedReport {
  std::vector<int> orders;  // -1 when the order could not be certified
  std::vector<bool> pass;
  bool all_pass = true;
};

/// Checks ord(z_i) = w_i for each chart coordinate with the generators in original coordinates.
PrivilegedReport verify_privileged(const PrivilegedChart& chart, std::span<const PolyVectorField> fields);

/// Inverse of a polynomial map with invertible linear part and no constant term, exact modulo
/// degree > cap.
std::vector<TruncatedPolynomial> invert_series(std::span<const TruncatedPolynomial> map, int cap);

}  // namespace carnot
