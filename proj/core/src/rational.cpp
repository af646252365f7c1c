#include "carnot/rational.hpp"

#include <cctype>
#include <cmath>

#include "carnot/errors.hpp"

namespace carnot {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNotBracketGenerating: return "NotBracketGenerating";
    case ErrorCode::kOrderExceedsCap: return "OrderExceedsCap";
    case ErrorCode::kCapTooSmall: return "CapTooSmall";
    case ErrorCode::kZeroField: return "ZeroField";
    case ErrorCode::kZeroDriftAtPoint: return "ZeroDriftAtPoint";
    case ErrorCode::kNonNegativeOrder: return "NonNegativeOrder";
    case ErrorCode::kRectificationFailed: return "RectificationFailed";
    case ErrorCode::kLeftDomain: return "LeftDomain";
    case ErrorCode::kProfileSingularity: return "ProfileSingularity";
    case ErrorCode::kNoFeasibleWitness: return "NoFeasibleWitness";
    case ErrorCode::kIncompleteFamily: return "IncompleteFamily";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kConfig: return "ConfigError";
  }
  return "Unknown";
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

Rational parse_decimal(std::string_view s) {
  // [digits][.digits][e[+-]digits]
  std::string mantissa;
  long exponent = 0;
  auto epos = s.find_first_of("eE");
  std::string_view mant = s.substr(0, epos);
  if (epos != std::string_view::npos) {
    std::string_view ex = s.substr(epos + 1);
    bool neg = false;
    if (!ex.empty() && (ex.front() == '+' || ex.front() == '-')) {
      neg = ex.front() == '-';
      ex.remove_prefix(1);
    }
    if (!all_digits(ex)) throw Error(ErrorCode::kParse, "bad exponent in '" + std::string(s) + "'");
    exponent = std::stol(std::string(ex));
    if (neg) exponent = -exponent;
  }
  auto dot = mant.find('.');
  std::string_view ipart = mant.substr(0, dot);
  std::string_view fpart = dot == std::string_view::npos ? std::string_view{} : mant.substr(dot + 1);
  if ((ipart.empty() && fpart.empty()) || (!ipart.empty() && !all_digits(ipart)) ||
      (!fpart.empty() && !all_digits(fpart)))
    throw Error(ErrorCode::kParse, "bad number '" + std::string(s) + "'");
  mantissa = std::string(ipart) + std::string(fpart);
  exponent -= static_cast<long>(fpart.size());
  mpz_class num(mantissa.empty() ? "0" : mantissa, 10);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
  Rational r = exponent >= 0 ? Rational(num * scale) : Rational(num, scale);
  r.canonicalize();
  return r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = trim(text);
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s = trim(s.substr(1));
  }
  if (s.empty()) throw Error(ErrorCode::kParse, "empty number");
  Rational r;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Rational num = parse_decimal(trim(s.substr(0, slash)));
    Rational den = parse_decimal(trim(s.substr(slash + 1)));
    if (den == 0) throw Error(ErrorCode::kParse, "zero denominator in '" + std::string(text) + "'");
    r = num / den;
  } else {
    r = parse_decimal(s);
  }
  return neg ? Rational(-r) : r;
}

std::string to_string(const Rational& value) { return value.get_str(10); }

Rational exact_rational(double value) {
  if (!std::isfinite(value)) throw Error(ErrorCode::kInvalidArgument, "non-finite coordinate");
  return Rational(value);
}

RationalPoint exact_point(std::span<const double> x) {
  RationalPoint p;
  p.reserve(x.size());
  for (double v : x) p.push_back(exact_rational(v));
  return p;
}

std::vector<double> to_doubles(std::span<const Rational> x) {
  std::vector<double> out;
  out.reserve(x.size());
  for (const auto& v : x) out.push_back(v.get_d());
  return out;
}

Rational factorial(int n) {
  mpz_class f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return Rational(f);
}

}  // namespace carnot
