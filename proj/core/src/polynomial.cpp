#include "carnot/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "carnot/errors.hpp"

namespace carnot {

int MultiIndex::total_degree() const {
  int d = 0;
  for (auto e : exponents) d += e;
  return d;
}

MultiIndex MultiIndex::unit(int axis) {
  MultiIndex m;
  m.exponents.at(static_cast<std::size_t>(axis)) = 1;
  return m;
}

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
  MultiIndex m;
  for (std::size_t i = 0; i < m.exponents.size(); ++i)
    m.exponents[i] = static_cast<std::uint8_t>(a.exponents[i] + b.exponents[i]);
  return m;
}

int weighted_degree(const MultiIndex& alpha, std::span<const int> weights) {
  int d = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) d += weights[i] * alpha.exponents[i];
  return d;
}

TruncatedPolynomial::TruncatedPolynomial(int dim, int cap) : dim_(dim), cap_(cap) {
  if (dim < 1 || dim > kMaxDim)
    throw Error(ErrorCode::kInvalidArgument, "dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  if (cap < 0) throw Error(ErrorCode::kInvalidArgument, "negative truncation cap");
}

TruncatedPolynomial TruncatedPolynomial::constant(int dim, int cap, const Rational& c) {
  TruncatedPolynomial p(dim, cap);
  p.add_term(MultiIndex{}, c);
  return p;
}

TruncatedPolynomial TruncatedPolynomial::variable(int dim, int cap, int axis) {
  if (axis < 0 || axis >= dim) throw Error(ErrorCode::kIndexOutOfRange, "variable axis out of range");
  TruncatedPolynomial p(dim, cap);
  p.add_term(MultiIndex::unit(axis), Rational(1));
  return p;
}

TruncatedPolynomial TruncatedPolynomial::monomial(int dim, int cap, const MultiIndex& alpha, const Rational& c) {
  TruncatedPolynomial p(dim, cap);
  for (int i = dim; i < kMaxDim; ++i)
    if (alpha[i] != 0) throw Error(ErrorCode::kIndexOutOfRange, "exponent beyond dimension");
  p.add_term(alpha, c);
  return p;
}

Rational TruncatedPolynomial::coefficient(const MultiIndex& alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? Rational(0) : it->second;
}

Rational TruncatedPolynomial::constant_term() const { return coefficient(MultiIndex{}); }

int TruncatedPolynomial::total_degree() const {
  int d = -1;
  for (const auto& [alpha, c] : terms_) d = std::max(d, alpha.total_degree());
  return d;
}

int TruncatedPolynomial::min_total_degree() const {
  int d = -1;
  for (const auto& [alpha, c] : terms_) {
    int t = alpha.total_degree();
    if (d < 0 || t < d) d = t;
  }
  return d;
}

void TruncatedPolynomial::add_term(const MultiIndex& alpha, const Rational& c) {
  if (c == 0) return;
  if (alpha.total_degree() > cap_) {
    truncated_ = true;
    return;
  }
  auto [it, inserted] = terms_.try_emplace(alpha, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void TruncatedPolynomial::check_compatible(const TruncatedPolynomial& other) const {
  if (dim_ != other.dim_)
    throw Error(ErrorCode::kDimensionMismatch,
                "polynomial dimensions " + std::to_string(dim_) + " vs " + std::to_string(other.dim_));
}

TruncatedPolynomial& TruncatedPolynomial::operator+=(const TruncatedPolynomial& other) {
  check_compatible(other);
  truncated_ = truncated_ || other.truncated_;
  for (const auto& [alpha, c] : other.terms_) add_term(alpha, c);
  return *this;
}

TruncatedPolynomial& TruncatedPolynomial::operator-=(const TruncatedPolynomial& other) {
  check_compatible(other);
  truncated_ = truncated_ || other.truncated_;
  for (const auto& [alpha, c] : other.terms_) add_term(alpha, -c);
  return *this;
}

TruncatedPolynomial& TruncatedPolynomial::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [alpha, coeff] : terms_) coeff *= c;
  return *this;
}

TruncatedPolynomial operator*(const TruncatedPolynomial& a, const TruncatedPolynomial& b) {
  a.check_compatible(b);
  TruncatedPolynomial out(a.dim_, std::min(a.cap_, b.cap_));
  out.truncated_ = a.truncated_ || b.truncated_;
  Rational prod;
  for (const auto& [aa, ca] : a.terms_) {
    const int da = aa.total_degree();
    for (const auto& [bb, cb] : b.terms_) {
      if (da + bb.total_degree() > out.cap_) {
        out.truncated_ = true;
        continue;
      }
      prod = ca * cb;
      out.add_term(aa + bb, prod);
    }
  }
  return out;
}

bool operator==(const TruncatedPolynomial& a, const TruncatedPolynomial& b) {
  return a.dim_ == b.dim_ && a.terms_ == b.terms_;
}

TruncatedPolynomial TruncatedPolynomial::derive(int axis) const {
  if (axis < 0 || axis >= dim_)
    throw Error(ErrorCode::kIndexOutOfRange,
                "derivative axis " + std::to_string(axis + 1) + " outside 1.." + std::to_string(dim_));
  TruncatedPolynomial out(dim_, cap_);
  out.truncated_ = truncated_;
  for (const auto& [alpha, c] : terms_) {
    int e = alpha[axis];
    if (e == 0) continue;
    MultiIndex beta = alpha;
    beta.exponents[static_cast<std::size_t>(axis)] = static_cast<std::uint8_t>(e - 1);
    out.add_term(beta, c * e);
  }
  return out;
}

TruncatedPolynomial TruncatedPolynomial::with_cap(int cap) const {
  TruncatedPolynomial out(dim_, cap);
  out.truncated_ = truncated_;
  for (const auto& [alpha, c] : terms_) out.add_term(alpha, c);
  return out;
}

TruncatedPolynomial TruncatedPolynomial::weighted_part(std::span<const int> weights, int degree) const {
  TruncatedPolynomial out(dim_, cap_);
  out.truncated_ = truncated_;
  for (const auto& [alpha, c] : terms_)
    if (weighted_degree(alpha, weights) == degree) out.add_term(alpha, c);
  return out;
}

double TruncatedPolynomial::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_)
    throw Error(ErrorCode::kDimensionMismatch, "evaluation point has wrong dimension");
  // Power table per axis, then one product per monomial.
  std::array<std::array<double, 32>, kMaxDim> pw{};
  const int maxdeg = std::min(31, std::max(0, total_degree()));
  for (int i = 0; i < dim_; ++i) {
    auto& row = pw[static_cast<std::size_t>(i)];
    row[0] = 1.0;
    for (int e = 1; e <= maxdeg; ++e) row[static_cast<std::size_t>(e)] = row[static_cast<std::size_t>(e - 1)] * x[static_cast<std::size_t>(i)];
  }
  double sum = 0.0;
  for (const auto& [alpha, c] : terms_) {
    double term = c.get_d();
    for (int i = 0; i < dim_; ++i) term *= pw[static_cast<std::size_t>(i)][alpha.exponents[static_cast<std::size_t>(i)]];
    sum += term;
  }
  return sum;
}

Rational TruncatedPolynomial::evaluate(std::span<const Rational> x) const {
  if (static_cast<int>(x.size()) != dim_)
    throw Error(ErrorCode::kDimensionMismatch, "evaluation point has wrong dimension");
  Rational sum = 0;
  for (const auto& [alpha, c] : terms_) {
    Rational term = c;
    for (int i = 0; i < dim_; ++i) {
      mpq_class p;
      mpz_pow_ui(p.get_num_mpz_t(), x[static_cast<std::size_t>(i)].get_num_mpz_t(), alpha.exponents[static_cast<std::size_t>(i)]);
      mpz_pow_ui(p.get_den_mpz_t(), x[static_cast<std::size_t>(i)].get_den_mpz_t(), alpha.exponents[static_cast<std::size_t>(i)]);
      term *= p;
    }
    sum += term;
  }
  return sum;
}

TruncatedPolynomial compose(const TruncatedPolynomial& p, std::span<const TruncatedPolynomial> subs, int cap) {
  if (static_cast<int>(subs.size()) != p.dim())
    throw Error(ErrorCode::kDimensionMismatch, "compose: need one substitution per variable");
  if (subs.empty()) throw Error(ErrorCode::kDimensionMismatch, "compose: empty substitution");
  const int out_dim = subs.front().dim();
  for (const auto& s : subs)
    if (s.dim() != out_dim) throw Error(ErrorCode::kDimensionMismatch, "compose: substitutions differ in dimension");

  // powers[i][e] = subs_i^e, built lazily up to the largest exponent used.
  std::vector<std::vector<TruncatedPolynomial>> powers(subs.size());
  auto power = [&](std::size_t i, int e) -> const TruncatedPolynomial& {
    auto& row = powers[i];
    if (row.empty()) row.push_back(TruncatedPolynomial::constant(out_dim, cap, Rational(1)));
    while (static_cast<int>(row.size()) <= e) row.push_back(row.back() * subs[i].with_cap(cap));
    return row[static_cast<std::size_t>(e)];
  };

  TruncatedPolynomial out(out_dim, cap);
  if (p.truncated()) out.mark_truncated();
  for (const auto& s : subs)
    if (s.truncated()) out.mark_truncated();
  for (const auto& [alpha, c] : p.terms()) {
    TruncatedPolynomial term = TruncatedPolynomial::constant(out_dim, cap, c);
    for (int i = 0; i < p.dim(); ++i) {
      if (alpha[i] == 0) continue;
      term = term * power(static_cast<std::size_t>(i), alpha[i]);
    }
    out += term;
  }
  return out;
}

TruncatedPolynomial translate(const TruncatedPolynomial& p, std::span<const Rational> center) {
  if (static_cast<int>(center.size()) != p.dim())
    throw Error(ErrorCode::kDimensionMismatch, "translate: centre has wrong dimension");
  std::vector<TruncatedPolynomial> subs;
  subs.reserve(center.size());
  for (int i = 0; i < p.dim(); ++i) {
    auto s = TruncatedPolynomial::variable(p.dim(), p.cap(), i);
    s += TruncatedPolynomial::constant(p.dim(), p.cap(), center[static_cast<std::size_t>(i)]);
    subs.push_back(std::move(s));
  }
  return compose(p, subs, p.cap());
}

// ---------------------------------------------------------------------------
// Text format

namespace {

class TermParser {
 public:
  TermParser(std::string_view text, int dim) : s_(text), dim_(dim) {}

  TruncatedPolynomial parse(int cap) {
    TruncatedPolynomial out(dim_, cap);
    skip_ws();
    if (at_end()) throw error("empty polynomial");
    bool first = true;
    while (!at_end()) {
      Rational sign = 1;
      if (peek() == '+' || peek() == '-') {
        if (peek() == '-') sign = -1;
        ++pos_;
        skip_ws();
      } else if (!first) {
        throw error("expected '+' or '-'");
      }
      auto [alpha, coeff] = parse_term();
      if (alpha.total_degree() > cap) throw Error(ErrorCode::kCapTooSmall, "term of degree " +
                                                  std::to_string(alpha.total_degree()) + " exceeds cap " +
                                                  std::to_string(cap) + " in '" + std::string(s_) + "'");
      out.add_term(alpha, sign * coeff);
      first = false;
      skip_ws();
    }
    return out;
  }

 private:
  std::pair<MultiIndex, Rational> parse_term() {
    MultiIndex alpha;
    Rational coeff = 1;
    bool any = false;
    while (true) {
      skip_ws();
      if (at_end()) break;
      char c = peek();
      if (c == 'x') {
        ++pos_;
        int axis = parse_uint();
        if (axis < 1 || axis > dim_) throw error("variable x" + std::to_string(axis) + " outside 1.." + std::to_string(dim_));
        int e = 1;
        skip_ws();
        if (!at_end() && peek() == '^') {
          ++pos_;
          skip_ws();
          e = parse_uint();
        }
        alpha.exponents[static_cast<std::size_t>(axis - 1)] =
            static_cast<std::uint8_t>(alpha.exponents[static_cast<std::size_t>(axis - 1)] + e);
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        coeff *= parse_number();
      } else if (c == '(') {
        // parenthesised signed rational, e.g. (-1/2)
        ++pos_;
        auto close = s_.find(')', pos_);
        if (close == std::string_view::npos) throw error("unbalanced '('");
        coeff *= parse_rational(s_.substr(pos_, close - pos_));
        pos_ = close + 1;
      } else {
        throw error(std::string("unexpected '") + c + "'");
      }
      any = true;
      skip_ws();
      if (!at_end() && peek() == '*') {
        ++pos_;
        continue;
      }
      break;
    }
    if (!any) throw error("empty term");
    return {alpha, coeff};
  }

  Rational parse_number() {
    std::size_t start = pos_;
    auto accept_digits = [&] {
      while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')) ++pos_;
    };
    accept_digits();
    if (!at_end() && (peek() == 'e' || peek() == 'E')) {
      ++pos_;
      if (!at_end() && (peek() == '+' || peek() == '-')) ++pos_;
      accept_digits();
    }
    if (!at_end() && peek() == '/') {
      ++pos_;
      accept_digits();
    }
    return parse_rational(s_.substr(start, pos_ - start));
  }

  int parse_uint() {
    std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (start == pos_) throw error("expected integer");
    return std::stoi(std::string(s_.substr(start, pos_ - start)));
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  Error error(const std::string& msg) const {
    return Error(ErrorCode::kParse, msg + " at column " + std::to_string(pos_ + 1) + " of '" + std::string(s_) + "'");
  }

  std::string_view s_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace

TruncatedPolynomial parse_polynomial(std::string_view text, int dim, int cap) {
  return TermParser(text, dim).parse(cap);
}

std::string format_polynomial(const TruncatedPolynomial& p) {
  if (p.is_zero()) return "0";
  // Graded order: by total degree, then descending lexicographic exponents.
  std::vector<std::pair<MultiIndex, Rational>> terms(p.terms().begin(), p.terms().end());
  std::stable_sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
    int da = a.first.total_degree(), db = b.first.total_degree();
    if (da != db) return da < db;
    return a.first > b.first;
  });
  std::ostringstream os;
  bool first = true;
  for (const auto& [alpha, c] : terms) {
    Rational mag = abs(c);
    if (first) {
      if (c < 0) os << '-';
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    bool wrote = false;
    if (mag != 1 || alpha.total_degree() == 0) {
      os << to_string(mag);
      wrote = true;
    }
    for (int i = 0; i < p.dim(); ++i) {
      int e = alpha[i];
      if (e == 0) continue;
      if (wrote) os << '*';
      os << 'x' << (i + 1);
      if (e > 1) os << '^' << e;
      wrote = true;
    }
  }
  return os.str();
}

}  // namespace carnot
