#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "carnot/rational.hpp"

namespace carnot {

inline constexpr int kMaxDim = 8;

/// Exponent vector alpha. Entries past the ambient dimension stay zero.
struct MultiIndex {
  std::array<std::uint8_t, kMaxDim> exponents{};

  int operator[](int i) const { return exponents[static_cast<std::size_t>(i)]; }
  int total_degree() const;
  static MultiIndex unit(int axis);

  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b);

/// Weighted degree w(alpha) = sum_i w_i alpha_i.
int weighted_degree(const MultiIndex& alpha, std::span<const int> weights);

/// Multivariate polynomial over exact rationals, truncated at a total-degree cap.
///
/// Terms above the cap are dropped on insertion. Arithmetic results carry a sticky
/// truncated() flag: set when this value or any operand ever lost a term, so callers can
/// tell whether a result is exact or only exact modulo monomials of degree > cap.
class TruncatedPolynomial {
 public:
  using Terms = std::map<MultiIndex, Rational>;

  TruncatedPolynomial() = default;
  TruncatedPolynomial(int dim, int cap);

  static TruncatedPolynomial constant(int dim, int cap, const Rational& c);
  static TruncatedPolynomial variable(int dim, int cap, int axis);
  static TruncatedPolynomial monomial(int dim, int cap, const MultiIndex& alpha, const Rational& c);

  int dim() const { return dim_; }
  int cap() const { return cap_; }
  bool truncated() const { return truncated_; }
  void mark_truncated() { truncated_ = true; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Rational coefficient(const MultiIndex& alpha) const;
  Rational constant_term() const;
  /// Highest total degree present; -1 for the zero polynomial.
  int total_degree() const;
  /// Lowest total degree present; -1 for the zero polynomial.
  int min_total_degree() const;

  /// Adds c * z^alpha; zero results are erased, over-cap terms set truncated().
  void add_term(const MultiIndex& alpha, const Rational& c);

  TruncatedPolynomial& operator+=(const TruncatedPolynomial& other);
  TruncatedPolynomial& operator-=(const TruncatedPolynomial& other);
  TruncatedPolynomial& operator*=(const Rational& c);

  friend TruncatedPolynomial operator+(TruncatedPolynomial a, const TruncatedPolynomial& b) { return a += b; }
  friend TruncatedPolynomial operator-(TruncatedPolynomial a, const TruncatedPolynomial& b) { return a -= b; }
  friend TruncatedPolynomial operator*(TruncatedPolynomial a, const Rational& c) { return a *= c; }
  friend TruncatedPolynomial operator*(const Rational& c, TruncatedPolynomial a) { return a *= c; }
  friend TruncatedPolynomial operator-(TruncatedPolynomial a) { return a *= Rational(-1); }
  friend TruncatedPolynomial operator*(const TruncatedPolynomial& a, const TruncatedPolynomial& b);

  /// Coefficient-level equality (the truncated flag is not compared).
  friend bool operator==(const TruncatedPolynomial& a, const TruncatedPolynomial& b);

  /// Exact partial derivative along a 0-based axis; cap is preserved.
  TruncatedPolynomial derive(int axis) const;
  TruncatedPolynomial with_cap(int cap) const;
  /// Terms whose weighted degree equals `degree`.
  TruncatedPolynomial weighted_part(std::span<const int> weights, int degree) const;

  double evaluate(std::span<const double> x) const;
  Rational evaluate(std::span<const Rational> x) const;

 private:
  void check_compatible(const TruncatedPolynomial& other) const;

  int dim_ = 0;
  int cap_ = 0;
  bool truncated_ = false;
  Terms terms_;
};

/// p(subs_1(z), ..., subs_n(z)), truncated at `cap`. Exact modulo monomials of degree > cap.
TruncatedPolynomial compose(const TruncatedPolynomial& p, std::span<const TruncatedPolynomial> subs, int cap);

/// Re-expresses p in coordinates centred at `center`: returns p(z + center).
TruncatedPolynomial translate(const TruncatedPolynomial& p, std::span<const Rational> center);

/// Parses `c * x1^a1*...*xn^an` sums, e.g. "1/2*x1^2 - x2*x3 + 3".
TruncatedPolynomial parse_polynomial(std::string_view text, int dim, int cap);
std::string format_polynomial(const TruncatedPolynomial& p);

}  // namespace carnot
