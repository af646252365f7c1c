#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "carnot/vector_field.hpp"

namespace carnot {

struct PrivilegedChart;

/// Right-nested bracket [f_{i1},[f_{i2},...,[f_{ik-1},f_{ik}]]]; letters are 0-based.
struct BracketWord {
  std::vector<int> letters;

  int length() const { return static_cast<int>(letters.size()); }
  friend bool operator==(const BracketWord&, const BracketWord&) = default;
};

struct AdaptedVector {
  BracketWord word;
  int weight = 0;
  RationalPoint value;       // exact; empty on the floating-point path
  std::vector<double> approx;  // always filled
};

struct FlagReport {
  std::vector<int> growth;  // (n_1, ..., n_r)
  int r = 0;
  WeightVector weights;
  std::vector<AdaptedVector> adapted_basis;
  /// Set when rank decisions used a pivot tolerance instead of exact arithmetic.
  bool approximate_rank = false;
};

struct FlagOptions {
  int r_max = 6;
  double pivot_tolerance = 1e-10;
};

/// Flag at a rational point, decided with exact Gaussian elimination.
/// Throws NotBracketGenerating if the rank stays below n at depth r_max.
FlagReport growth_vector(std::span<const PolyVectorField> fields, std::span<const Rational> q,
                         const FlagOptions& options = {});

/// Floating-point variant; rank decisions use options.pivot_tolerance and the report is
/// marked approximate_rank.
FlagReport growth_vector(std::span<const PolyVectorField> fields, std::span<const double> q,
                         const FlagOptions& options = {});

/// The n independent bracket vectors of the report, in enumeration order.
const std::vector<AdaptedVector>& adapted_basis(const FlagReport& report);

/// Symbolic field of a bracket word.
PolyVectorField bracket_field(std::span<const PolyVectorField> fields, const BracketWord& word);

/// s = -ord_q(f0) for a drift already expressed in chart coordinates.
/// NonNegativeOrder when ord >= 0, ZeroDriftAtPoint when f0(q) = 0.
int drift_order(const PolyVectorField& f0_in_chart, const PrivilegedChart& chart);

struct RegularityReport {
  bool regular = true;
  int order_at_q = 0;
  std::set<int> orders_seen;
  std::vector<std::vector<double>> sample_points;
  std::vector<int> sample_orders;
};

/// Recomputes ord(f0) on a chart built at each of n_samples points drawn from a Euclidean
/// ball; the point is regular iff every order equals the one at q.
RegularityReport is_regular_drift(const PolyVectorField& f0, std::span<const PolyVectorField> fields,
                                  std::span<const Rational> q, double radius, int n_samples, std::uint64_t seed,
                                  int r_max = 6);

}  // namespace carnot
