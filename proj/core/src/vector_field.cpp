#include "carnot/vector_field.hpp"

#include <algorithm>
#include <set>

#include "carnot/errors.hpp"

namespace carnot {

WeightVector::WeightVector(std::vector<int> weights) : w_(std::move(weights)) {
  for (std::size_t i = 0; i < w_.size(); ++i) {
    if (w_[i] < 1) throw Error(ErrorCode::kInvalidArgument, "weights must be positive");
    if (i > 0 && w_[i] < w_[i - 1]) throw Error(ErrorCode::kInvalidArgument, "weights must be nondecreasing");
  }
}

WeightVector WeightVector::from_growth(std::span<const int> growth) {
  std::vector<int> w;
  int prev = 0;
  for (std::size_t s = 0; s < growth.size(); ++s) {
    if (growth[s] < prev) throw Error(ErrorCode::kInvalidArgument, "growth vector must be nondecreasing");
    for (int i = prev; i < growth[s]; ++i) w.push_back(static_cast<int>(s) + 1);
    prev = growth[s];
  }
  return WeightVector(std::move(w));
}

PolyVectorField::PolyVectorField(int dim, int cap) {
  comps_.reserve(static_cast<std::size_t>(dim));
  for (int j = 0; j < dim; ++j) comps_.emplace_back(dim, cap);
}

PolyVectorField::PolyVectorField(std::vector<TruncatedPolynomial> components) : comps_(std::move(components)) {
  if (comps_.empty()) throw Error(ErrorCode::kInvalidArgument, "vector field needs at least one component");
  const int n = static_cast<int>(comps_.size());
  const int cap = comps_.front().cap();
  for (const auto& c : comps_) {
    if (c.dim() != n) throw Error(ErrorCode::kDimensionMismatch, "component dimension differs from field dimension");
    if (c.cap() != cap) throw Error(ErrorCode::kInvalidArgument, "components must share a truncation cap");
  }
}

PolyVectorField PolyVectorField::coordinate(int dim, int cap, int axis) {
  PolyVectorField f(dim, cap);
  if (axis < 0 || axis >= dim) throw Error(ErrorCode::kIndexOutOfRange, "coordinate axis out of range");
  f[axis] = TruncatedPolynomial::constant(dim, cap, Rational(1));
  return f;
}

bool PolyVectorField::truncated() const {
  return std::any_of(comps_.begin(), comps_.end(), [](const auto& c) { return c.truncated(); });
}

bool PolyVectorField::is_zero() const {
  return std::all_of(comps_.begin(), comps_.end(), [](const auto& c) { return c.is_zero(); });
}

PolyVectorField& PolyVectorField::operator+=(const PolyVectorField& other) {
  if (dim() != other.dim()) throw Error(ErrorCode::kDimensionMismatch, "vector field dimensions differ");
  for (int j = 0; j < dim(); ++j) (*this)[j] += other[j];
  return *this;
}

PolyVectorField& PolyVectorField::operator-=(const PolyVectorField& other) {
  if (dim() != other.dim()) throw Error(ErrorCode::kDimensionMismatch, "vector field dimensions differ");
  for (int j = 0; j < dim(); ++j) (*this)[j] -= other[j];
  return *this;
}

PolyVectorField& PolyVectorField::operator*=(const Rational& c) {
  for (auto& comp : comps_) comp *= c;
  return *this;
}

TruncatedPolynomial PolyVectorField::apply(const TruncatedPolynomial& a) const {
  if (a.dim() != dim()) throw Error(ErrorCode::kDimensionMismatch, "derivation applied to polynomial of other dimension");
  TruncatedPolynomial out(dim(), std::min(cap(), a.cap()));
  if (a.truncated()) out.mark_truncated();
  for (int j = 0; j < dim(); ++j) {
    if (comps_[static_cast<std::size_t>(j)].is_zero()) {
      if (comps_[static_cast<std::size_t>(j)].truncated()) out.mark_truncated();
      continue;
    }
    auto da = a.derive(j);
    if (da.is_zero()) continue;
    out += comps_[static_cast<std::size_t>(j)] * da;
  }
  return out;
}

std::vector<double> PolyVectorField::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) throw Error(ErrorCode::kDimensionMismatch, "evaluation point dimension");
  std::vector<double> v;
  v.reserve(comps_.size());
  for (const auto& c : comps_) v.push_back(c.evaluate(x));
  return v;
}

RationalPoint PolyVectorField::evaluate(std::span<const Rational> x) const {
  if (static_cast<int>(x.size()) != dim()) throw Error(ErrorCode::kDimensionMismatch, "evaluation point dimension");
  RationalPoint v;
  v.reserve(comps_.size());
  for (const auto& c : comps_) v.push_back(c.evaluate(x));
  return v;
}

PolyVectorField PolyVectorField::with_cap(int cap) const {
  std::vector<TruncatedPolynomial> comps;
  comps.reserve(comps_.size());
  for (const auto& c : comps_) comps.push_back(c.with_cap(cap));
  return PolyVectorField(std::move(comps));
}

int PolyVectorField::total_degree() const {
  int d = -1;
  for (const auto& c : comps_) d = std::max(d, c.total_degree());
  return d;
}

PolyVectorField lie_bracket(const PolyVectorField& f, const PolyVectorField& g) {
  if (f.dim() != g.dim()) throw Error(ErrorCode::kDimensionMismatch, "bracket of fields with different dimensions");
  std::vector<TruncatedPolynomial> comps;
  comps.reserve(static_cast<std::size_t>(f.dim()));
  for (int j = 0; j < f.dim(); ++j) comps.push_back(f.apply(g[j]) - g.apply(f[j]));
  return PolyVectorField(std::move(comps));
}

PolyVectorField ad_power(const PolyVectorField& f0, const PolyVectorField& f, int l) {
  if (l < 0) throw Error(ErrorCode::kInvalidArgument, "ad power must be nonnegative");
  PolyVectorField out = f;
  for (int k = 0; k < l; ++k) out = lie_bracket(f0, out);
  return out;
}

int weighted_degree(const MultiIndex& alpha, int j, const WeightVector& w) {
  if (j < 0 || j >= w.size()) throw Error(ErrorCode::kIndexOutOfRange, "weighted_degree axis out of range");
  return weighted_degree(alpha, w.values()) - w[j];
}

PolyVectorField homogeneous_part(const PolyVectorField& f, const WeightVector& w, int d) {
  if (w.size() != f.dim()) throw Error(ErrorCode::kDimensionMismatch, "weights do not match field dimension");
  std::vector<TruncatedPolynomial> comps;
  comps.reserve(static_cast<std::size_t>(f.dim()));
  for (int j = 0; j < f.dim(); ++j) comps.push_back(f[j].weighted_part(w.values(), d + w[j]));
  return PolyVectorField(std::move(comps));
}

std::vector<int> weighted_degrees(const PolyVectorField& f, const WeightVector& w) {
  if (w.size() != f.dim()) throw Error(ErrorCode::kDimensionMismatch, "weights do not match field dimension");
  std::set<int> seen;
  for (int j = 0; j < f.dim(); ++j)
    for (const auto& [alpha, c] : f[j].terms()) seen.insert(weighted_degree(alpha, j, w));
  return {seen.begin(), seen.end()};
}

std::optional<int> min_weighted_degree(const PolyVectorField& f, const WeightVector& w) {
  auto degs = weighted_degrees(f, w);
  if (degs.empty()) return std::nullopt;
  return degs.front();
}

std::vector<std::pair<int, PolyVectorField>> pushforward_series(const PolyVectorField& f0, const PolyVectorField& f,
                                                                int L) {
  if (L < 0) throw Error(ErrorCode::kInvalidArgument, "series order must be nonnegative");
  std::vector<std::pair<int, PolyVectorField>> out;
  PolyVectorField ad = f;
  for (int l = 0; l <= L; ++l) {
    if (l > 0) ad = lie_bracket(f0, ad);
    out.emplace_back(l, ad * Rational(Rational(1) / factorial(l)));
  }
  return out;
}

PolyVectorField push_through(const PolyVectorField& f, std::span<const TruncatedPolynomial> forward,
                             std::span<const TruncatedPolynomial> inverse, int cap) {
  const int n = f.dim();
  if (static_cast<int>(forward.size()) != n || static_cast<int>(inverse.size()) != n)
    throw Error(ErrorCode::kDimensionMismatch, "push_through: map dimension mismatch");
  std::vector<TruncatedPolynomial> f_new;
  f_new.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) f_new.push_back(compose(f[i], inverse, cap));
  std::vector<TruncatedPolynomial> comps;
  comps.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    TruncatedPolynomial acc(n, cap);
    for (int i = 0; i < n; ++i) {
      auto dphi = forward[static_cast<std::size_t>(j)].derive(i);
      if (dphi.is_zero()) continue;
      acc += compose(dphi, inverse, cap) * f_new[static_cast<std::size_t>(i)];
    }
    comps.push_back(std::move(acc));
  }
  return PolyVectorField(std::move(comps));
}

PolyVectorField translate(const PolyVectorField& f, std::span<const Rational> center) {
  std::vector<TruncatedPolynomial> comps;
  comps.reserve(static_cast<std::size_t>(f.dim()));
  for (int j = 0; j < f.dim(); ++j) comps.push_back(translate(f[j], center));
  return PolyVectorField(std::move(comps));
}

PolyVectorField parse_vector_field(std::span<const std::string> components, int cap) {
  const int n = static_cast<int>(components.size());
  if (n < 1 || n > kMaxDim)
    throw Error(ErrorCode::kParse, "vector field needs 1.." + std::to_string(kMaxDim) + " components");
  std::vector<TruncatedPolynomial> comps;
  comps.reserve(components.size());
  for (const auto& s : components) comps.push_back(parse_polynomial(s, n, cap));
  return PolyVectorField(std::move(comps));
}

std::vector<std::string> format_vector_field(const PolyVectorField& f) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(f.dim()));
  for (const auto& c : f.components()) out.push_back(format_polynomial(c));
  return out;
}

}  // namespace carnot
