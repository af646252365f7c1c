#pragma once

#include <gmpxx.h>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace carnot {

using Rational = mpq_class;
using RationalPoint = std::vector<Rational>;

/// Accepts "3", "-1/2", "0.125", "2e-3". Decimal input is converted exactly.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& value);

inline double to_double(const Rational& value) { return value.get_d(); }

/// Exact conversion: every finite double is a dyadic rational.
Rational exact_rational(double value);

RationalPoint exact_point(std::span<const double> x);
std::vector<double> to_doubles(std::span<const Rational> x);

Rational factorial(int n);

}  // namespace carnot
