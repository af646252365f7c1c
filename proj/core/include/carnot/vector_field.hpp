#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "carnot/polynomial.hpp"

namespace carnot {

/// Nondecreasing positive integer weights w_1 <= ... <= w_n.
class WeightVector {
 public:
  WeightVector() = default;
  explicit WeightVector(std::vector<int> weights);

  int size() const { return static_cast<int>(w_.size()); }
  int operator[](int i) const { return w_[static_cast<std::size_t>(i)]; }
  int max() const { return w_.empty() ? 0 : w_.back(); }
  std::span<const int> values() const { return w_; }

  /// w_i = s iff n_{s-1} < i <= n_s.
  static WeightVector from_growth(std::span<const int> growth);

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<int> w_;
};

/// Polynomial vector field sum_j f_j(z) d/dz_j; all components share dim and cap.
class PolyVectorField {
 public:
  PolyVectorField() = default;
  PolyVectorField(int dim, int cap);
  explicit PolyVectorField(std::vector<TruncatedPolynomial> components);

  /// d/dz_axis (0-based axis).
  static PolyVectorField coordinate(int dim, int cap, int axis);

  int dim() const { return static_cast<int>(comps_.size()); }
  int cap() const { return comps_.empty() ? 0 : comps_.front().cap(); }
  bool truncated() const;
  bool is_zero() const;

  const TruncatedPolynomial& operator[](int j) const { return comps_[static_cast<std::size_t>(j)]; }
  TruncatedPolynomial& operator[](int j) { return comps_[static_cast<std::size_t>(j)]; }
  const std::vector<TruncatedPolynomial>& components() const { return comps_; }

  PolyVectorField& operator+=(const PolyVectorField& other);
  PolyVectorField& operator-=(const PolyVectorField& other);
  PolyVectorField& operator*=(const Rational& c);
  friend PolyVectorField operator+(PolyVectorField a, const PolyVectorField& b) { return a += b; }
  friend PolyVectorField operator-(PolyVectorField a, const PolyVectorField& b) { return a -= b; }
  friend PolyVectorField operator*(const Rational& c, PolyVectorField a) { return a *= c; }
  friend PolyVectorField operator*(PolyVectorField a, const Rational& c) { return a *= c; }
  friend bool operator==(const PolyVectorField& a, const PolyVectorField& b) { return a.comps_ == b.comps_; }

  /// Derivation: (f a) = sum_j f_j d_j a, truncated at the common cap.
  TruncatedPolynomial apply(const TruncatedPolynomial& a) const;

  std::vector<double> evaluate(std::span<const double> x) const;
  RationalPoint evaluate(std::span<const Rational> x) const;

  PolyVectorField with_cap(int cap) const;
  int total_degree() const;

 private:
  std::vector<TruncatedPolynomial> comps_;
};

/// [f, g]_j = f(g_j) - g(f_j).
PolyVectorField lie_bracket(const PolyVectorField& f, const PolyVectorField& g);

/// ad^l(f0) f, with ad^0(f0) f = f.
PolyVectorField ad_power(const PolyVectorField& f0, const PolyVectorField& f, int l);

/// w(alpha) - w_j for the monomial field z^alpha d/dz_j (j 0-based).
int weighted_degree(const MultiIndex& alpha, int j, const WeightVector& w);

/// Keeps exactly the monomial terms of weighted degree d.
PolyVectorField homogeneous_part(const PolyVectorField& f, const WeightVector& w, int d);

/// All weighted degrees present in f, ascending.
std::vector<int> weighted_degrees(const PolyVectorField& f, const WeightVector& w);

/// min{ w(alpha) - w_j : f_{alpha,j} != 0 }; nullopt for the zero field.
std::optional<int> min_weighted_degree(const PolyVectorField& f, const WeightVector& w);

/// Coefficients g_l = ad^l(f0) f / l!, l = 0..L, of (e^{-t f0})_* f ~ sum_l t^l g_l.
std::vector<std::pair<int, PolyVectorField>> pushforward_series(const PolyVectorField& f0, const PolyVectorField& f,
                                                                int L);

/// Pushes f through an invertible polynomial change of variables.
/// `forward` gives the new coordinates as functions of the old, `inverse` the old as
/// functions of the new; the result is (D forward)(inverse(z)) f(inverse(z)).
PolyVectorField push_through(const PolyVectorField& f, std::span<const TruncatedPolynomial> forward,
                             std::span<const TruncatedPolynomial> inverse, int cap);

/// Re-expresses f in coordinates centred at `center`.
PolyVectorField translate(const PolyVectorField& f, std::span<const Rational> center);

PolyVectorField parse_vector_field(std::span<const std::string> components, int cap);
std::vector<std::string> format_vector_field(const PolyVectorField& f);

}  // namespace carnot
