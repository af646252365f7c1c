#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <carnot/polynomial.hpp>
#include <carnot/rational.hpp>
#include <carnot/vector_field.hpp>

namespace carnot::test {

inline nlohmann::json load_oracles() {
  std::ifstream in(CARNOT_ORACLE_FILE);
  return nlohmann::json::parse(in);
}

inline PolyVectorField field(const std::vector<std::string>& comps, int cap = 6) {
  return parse_vector_field(comps, cap);
}

inline TruncatedPolynomial poly(const std::string& text, int dim, int cap = 6) { return parse_polynomial(text, dim, cap); }

inline PolyVectorField heis_f1(int cap = 6) { return field({"1", "0", "0"}, cap); }
inline PolyVectorField heis_f2(int cap = 6) { return field({"0", "1", "x1"}, cap); }
inline PolyVectorField grushin_f1(int cap = 6) { return field({"1", "0"}, cap); }
inline PolyVectorField grushin_f2(int cap = 6) { return field({"0", "x1"}, cap); }

inline RationalPoint rpoint(std::initializer_list<int> xs) {
  RationalPoint p;
  for (int x : xs) p.emplace_back(x);
  return p;
}

/// Random polynomial with small rational coefficients and total degree <= max_deg.
inline TruncatedPolynomial random_poly(std::mt19937_64& rng, int n, int cap, int max_deg, int terms) {
  TruncatedPolynomial p(n, cap);
  std::uniform_int_distribution<int> deg(0, max_deg), axis(0, n - 1), num(-9, 9), den(1, 5);
  for (int t = 0; t < terms; ++t) {
    MultiIndex a;
    const int d = deg(rng);
    for (int k = 0; k < d; ++k) a.exponents[static_cast<std::size_t>(axis(rng))] += 1;
    Rational c(num(rng), den(rng));
    c.canonicalize();
    p.add_term(a, c);
  }
  return p;
}

inline PolyVectorField random_field(std::mt19937_64& rng, int n, int cap, int max_deg, int terms) {
  std::vector<TruncatedPolynomial> comps;
  for (int j = 0; j < n; ++j) comps.push_back(random_poly(rng, n, cap, max_deg, terms));
  return PolyVectorField(std::move(comps));
}

inline Rational random_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
  Rational c(num(rng), den(rng));
  c.canonicalize();
  return c;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace carnot::test
