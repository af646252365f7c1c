#include "carnot/flag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "carnot/errors.hpp"
#include "carnot/privileged.hpp"

namespace carnot {
namespace {

void check_inputs(std::span<const PolyVectorField> fields, std::size_t q_size, const FlagOptions& options) {
  if (fields.empty()) throw Error(ErrorCode::kInvalidArgument, "flag needs at least one generator");
  if (options.r_max < 1) throw Error(ErrorCode::kInvalidArgument, "r_max must be >= 1");
  const int n = fields.front().dim();
  for (const auto& f : fields)
    if (f.dim() != n) throw Error(ErrorCode::kDimensionMismatch, "generators have different dimensions");
  if (static_cast<int>(q_size) != n) throw Error(ErrorCode::kDimensionMismatch, "base point dimension");
}

// Incremental row echelon form; each stored row is zero at the pivots of earlier rows.
template <class Scalar, class IsZero>
class Echelon {
 public:
  Echelon(int n, IsZero is_zero) : n_(n), is_zero_(is_zero) {}

  int rank() const { return static_cast<int>(rows_.size()); }

  bool insert(std::vector<Scalar> v) {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const int p = pivots_[i];
      if (v[static_cast<std::size_t>(p)] == Scalar(0)) continue;
      const Scalar c = v[static_cast<std::size_t>(p)];
      for (int j = 0; j < n_; ++j) v[static_cast<std::size_t>(j)] -= c * rows_[i][static_cast<std::size_t>(j)];
    }
    int pivot = -1;
    for (int j = 0; j < n_; ++j) {
      if (is_zero_(v[static_cast<std::size_t>(j)])) {
        v[static_cast<std::size_t>(j)] = Scalar(0);
        continue;
      }
      if (pivot < 0 || magnitude(v[static_cast<std::size_t>(j)]) > magnitude(v[static_cast<std::size_t>(pivot)]))
        pivot = j;
    }
    if (pivot < 0) return false;
    const Scalar c = v[static_cast<std::size_t>(pivot)];
    for (auto& x : v) x /= c;
    // keep earlier rows zero at the new pivot
    for (auto& row : rows_) {
      const Scalar d = row[static_cast<std::size_t>(pivot)];
      if (d == Scalar(0)) continue;
      for (int j = 0; j < n_; ++j) row[static_cast<std::size_t>(j)] -= d * v[static_cast<std::size_t>(j)];
    }
    rows_.push_back(std::move(v));
    pivots_.push_back(pivot);
    return true;
  }

 private:
  static double magnitude(const Scalar& x) {
    if constexpr (std::is_same_v<Scalar, double>) {
      return std::abs(x);
    } else {
      return std::abs(x.get_d());
    }
  }

  int n_;
  IsZero is_zero_;
  std::vector<std::vector<Scalar>> rows_;
  std::vector<int> pivots_;
};

struct Node {
  BracketWord word;
  PolyVectorField field;
};

// Walks bracket words by length then lexicographically. `value` maps a bracket field to
// its vector at q; `rank_step` tries to add that vector and returns whether it was new.
template <class ValueFn, class InsertFn>
FlagReport run_flag(std::span<const PolyVectorField> gens, int n, int r_max, ValueFn value, InsertFn insert) {
  FlagReport report;
  const int m = static_cast<int>(gens.size());
  std::vector<Node> level;
  int rank = 0;
  for (int k = 1; k <= r_max && rank < n; ++k) {
    std::vector<Node> next;
    if (k == 1) {
      for (int i = 0; i < m; ++i) next.push_back({BracketWord{{i}}, gens[static_cast<std::size_t>(i)]});
    } else {
      next.reserve(level.size() * static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) {
        for (const auto& node : level) {
          BracketWord w;
          w.letters.reserve(node.word.letters.size() + 1);
          w.letters.push_back(i);
          w.letters.insert(w.letters.end(), node.word.letters.begin(), node.word.letters.end());
          next.push_back({std::move(w), lie_bracket(gens[static_cast<std::size_t>(i)], node.field)});
        }
      }
    }
    for (const auto& node : next) {
      if (rank == n) break;
      AdaptedVector candidate = value(node.field);
      if (insert(candidate)) {
        candidate.word = node.word;
        candidate.weight = k;
        report.adapted_basis.push_back(std::move(candidate));
        ++rank;
      }
    }
    report.growth.push_back(rank);
    level = std::move(next);
  }
  if (rank < n)
    throw Error(ErrorCode::kNotBracketGenerating,
                "rank " + std::to_string(rank) + " < " + std::to_string(n) + " at bracket depth " + std::to_string(r_max));
  report.r = static_cast<int>(report.growth.size());
  report.weights = WeightVector::from_growth(report.growth);
  return report;
}

}  // namespace

FlagReport growth_vector(std::span<const PolyVectorField> fields, std::span<const Rational> q,
                         const FlagOptions& options) {
  check_inputs(fields, q.size(), options);
  const int n = fields.front().dim();
  // Constant terms of length-k brackets only need the fields modulo degree > k - 1.
  const int cap = std::max(options.r_max - 1, 0);
  std::vector<PolyVectorField> centered;
  centered.reserve(fields.size());
  for (const auto& f : fields) centered.push_back(translate(f, q).with_cap(cap));

  auto is_zero = [](const Rational& x) { return sgn(x) == 0; };
  Echelon<Rational, decltype(is_zero)> echelon(n, is_zero);
  auto value = [&](const PolyVectorField& f) {
    AdaptedVector v;
    v.value.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) v.value.push_back(f[j].constant_term());
    v.approx = to_doubles(v.value);
    return v;
  };
  auto insert = [&](const AdaptedVector& v) { return echelon.insert(v.value); };
  return run_flag(centered, n, options.r_max, value, insert);
}

FlagReport growth_vector(std::span<const PolyVectorField> fields, std::span<const double> q,
                         const FlagOptions& options) {
  check_inputs(fields, q.size(), options);
  const int n = fields.front().dim();
  int max_deg = 0;
  for (const auto& f : fields) max_deg = std::max(max_deg, f.total_degree());
  const int cap = std::max(1, max_deg) * options.r_max;
  std::vector<PolyVectorField> widened;
  widened.reserve(fields.size());
  for (const auto& f : fields) widened.push_back(f.with_cap(std::max(cap, f.cap())));

  const double tol = options.pivot_tolerance;
  auto is_zero = [tol](double x) { return std::abs(x) <= tol; };
  Echelon<double, decltype(is_zero)> echelon(n, is_zero);
  std::vector<double> point(q.begin(), q.end());
  auto value = [&](const PolyVectorField& f) {
    AdaptedVector v;
    v.approx = f.evaluate(std::span<const double>(point));
    return v;
  };
  auto insert = [&](const AdaptedVector& v) {
    double scale = 0.0;
    for (double x : v.approx) scale = std::max(scale, std::abs(x));
    if (scale <= tol) return false;
    std::vector<double> normalized = v.approx;
    for (auto& x : normalized) x /= scale;
    return echelon.insert(std::move(normalized));
  };
  auto report = run_flag(widened, n, options.r_max, value, insert);
  report.approximate_rank = true;
  return report;
}

const std::vector<AdaptedVector>& adapted_basis(const FlagReport& report) { return report.adapted_basis; }

PolyVectorField bracket_field(std::span<const PolyVectorField> fields, const BracketWord& word) {
  if (word.letters.empty()) throw Error(ErrorCode::kInvalidArgument, "empty bracket word");
  for (int i : word.letters)
    if (i < 0 || i >= static_cast<int>(fields.size()))
      throw Error(ErrorCode::kIndexOutOfRange, "bracket word letter out of range");
  PolyVectorField out = fields[static_cast<std::size_t>(word.letters.back())];
  for (auto it = word.letters.rbegin() + 1; it != word.letters.rend(); ++it)
    out = lie_bracket(fields[static_cast<std::size_t>(*it)], out);
  return out;
}

int drift_order(const PolyVectorField& f0_in_chart, const PrivilegedChart& chart) {
  auto ord = min_weighted_degree(f0_in_chart, chart.weights);
  if (!ord) throw Error(ErrorCode::kZeroDriftAtPoint, "drift is identically zero");
  if (*ord >= 0) throw Error(ErrorCode::kNonNegativeOrder, "drift has order " + std::to_string(*ord) + " >= 0");
  bool vanishes = true;
  for (int j = 0; j < f0_in_chart.dim(); ++j)
    if (sgn(f0_in_chart[j].constant_term()) != 0) vanishes = false;
  if (vanishes) throw Error(ErrorCode::kZeroDriftAtPoint, "drift vanishes at the base point");
  return -*ord;
}

RegularityReport is_regular_drift(const PolyVectorField& f0, std::span<const PolyVectorField> fields,
                                  std::span<const Rational> q, double radius, int n_samples, std::uint64_t seed,
                                  int r_max) {
  if (!(radius > 0.0)) throw Error(ErrorCode::kInvalidArgument, "radius must be positive");
  if (n_samples < 0) throw Error(ErrorCode::kInvalidArgument, "n_samples must be nonnegative");
  auto order_at = [&](std::span<const Rational> p) {
    ChartOptions opts;
    opts.r_max = r_max;
    const auto chart = build_chart(fields, p, opts);
    auto ord = min_weighted_degree(chart.push(f0), chart.weights);
    if (!ord) throw Error(ErrorCode::kZeroField, "drift is identically zero");
    return *ord;
  };
  RegularityReport report;
  report.order_at_q = order_at(q);
  report.orders_seen.insert(report.order_at_q);

  const int n = static_cast<int>(q.size());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  constexpr double kGrid = 1048576.0;  // dyadic rounding keeps rational arithmetic cheap
  for (int s = 0; s < n_samples; ++s) {
    std::vector<double> dir(static_cast<std::size_t>(n));
    double norm = 0.0;
    for (auto& d : dir) {
      d = normal(rng);
      norm += d * d;
    }
    norm = std::sqrt(norm);
    const double rad = radius * std::pow(uniform(rng), 1.0 / n);
    RationalPoint p;
    std::vector<double> pd;
    for (int i = 0; i < n; ++i) {
      const double x = q[static_cast<std::size_t>(i)].get_d() + rad * dir[static_cast<std::size_t>(i)] / norm;
      const double rounded = std::round(x * kGrid) / kGrid;
      p.push_back(exact_rational(rounded));
      pd.push_back(rounded);
    }
    const int ord = order_at(p);
    report.sample_points.push_back(std::move(pd));
    report.sample_orders.push_back(ord);
    report.orders_seen.insert(ord);
    if (ord != report.order_at_q) report.regular = false;
  }
  return report;
}

}  // namespace carnot
