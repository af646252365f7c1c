#include "carnot/privileged.hpp"

#include <algorithm>
#include <climits>
#include <functional>

#include "carnot/errors.hpp"

namespace carnot {
namespace {

using Matrix = std::vector<std::vector<Rational>>;

constexpr int kUnbounded = INT_MAX / 4;

// Reduced row echelon solve of M c = b. Free variables are set to zero.
std::optional<std::vector<Rational>> solve_exact(Matrix M, std::vector<Rational> b, int cols) {
  const int rows = static_cast<int>(M.size());
  std::vector<int> pivot_col;
  int row = 0;
  for (int col = 0; col < cols && row < rows; ++col) {
    int sel = -1;
    for (int i = row; i < rows; ++i)
      if (sgn(M[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)]) != 0) {
        sel = i;
        break;
      }
    if (sel < 0) continue;
    std::swap(M[static_cast<std::size_t>(sel)], M[static_cast<std::size_t>(row)]);
    std::swap(b[static_cast<std::size_t>(sel)], b[static_cast<std::size_t>(row)]);
    auto& prow = M[static_cast<std::size_t>(row)];
    const Rational inv = Rational(1) / prow[static_cast<std::size_t>(col)];
    for (auto& x : prow) x *= inv;
    b[static_cast<std::size_t>(row)] *= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == row) continue;
      auto& r = M[static_cast<std::size_t>(i)];
      const Rational f = r[static_cast<std::size_t>(col)];
      if (sgn(f) == 0) continue;
      for (int j = 0; j < cols; ++j) r[static_cast<std::size_t>(j)] -= f * prow[static_cast<std::size_t>(j)];
      b[static_cast<std::size_t>(i)] -= f * b[static_cast<std::size_t>(row)];
    }
    pivot_col.push_back(col);
    ++row;
  }
  for (int i = row; i < rows; ++i)
    if (sgn(b[static_cast<std::size_t>(i)]) != 0) return std::nullopt;
  std::vector<Rational> x(static_cast<std::size_t>(cols), Rational(0));
  for (int i = 0; i < row; ++i) x[static_cast<std::size_t>(pivot_col[static_cast<std::size_t>(i)])] = b[static_cast<std::size_t>(i)];
  return x;
}

Matrix invert_matrix(const Matrix& A) {
  const int n = static_cast<int>(A.size());
  Matrix inv(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(n)));
  for (int c = 0; c < n; ++c) {
    std::vector<Rational> e(static_cast<std::size_t>(n), Rational(0));
    e[static_cast<std::size_t>(c)] = 1;
    auto col = solve_exact(A, e, n);
    if (!col) throw Error(ErrorCode::kInvalidArgument, "singular linear part");
    for (int r = 0; r < n; ++r) inv[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = (*col)[static_cast<std::size_t>(r)];
  }
  // solve_exact leaves free variables at zero, so a singular A slips through; check A*inv = I.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Rational s = 0;
      for (int k = 0; k < n; ++k) s += A[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] * inv[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
      if (s != (i == j ? 1 : 0)) throw Error(ErrorCode::kInvalidArgument, "singular linear part");
    }
  return inv;
}

std::vector<TruncatedPolynomial> linear_map(const Matrix& M, int cap) {
  const int n = static_cast<int>(M.size());
  std::vector<TruncatedPolynomial> out;
  for (int i = 0; i < n; ++i) {
    TruncatedPolynomial p(n, cap);
    for (int j = 0; j < n; ++j) p.add_term(MultiIndex::unit(j), M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<TruncatedPolynomial> compose_all(std::span<const TruncatedPolynomial> outer,
                                             std::span<const TruncatedPolynomial> inner, int cap) {
  std::vector<TruncatedPolynomial> out;
  out.reserve(outer.size());
  for (const auto& p : outer) out.push_back(compose(p, inner, cap));
  return out;
}

std::vector<PolyVectorField> translated(std::span<const PolyVectorField> fields, std::span<const Rational> q) {
  std::vector<PolyVectorField> out;
  out.reserve(fields.size());
  for (const auto& f : fields) out.push_back(translate(f, q));
  return out;
}

// Constant terms of all iterated derivatives f_{i1}...f_{ik} h, k = 1..depth, in a fixed order.
std::vector<Rational> derivative_constants(const TruncatedPolynomial& h, std::span<const PolyVectorField> fields,
                                           int depth) {
  std::vector<Rational> out;
  std::vector<TruncatedPolynomial> level{h};
  for (int k = 1; k <= depth; ++k) {
    std::vector<TruncatedPolynomial> next;
    next.reserve(level.size() * fields.size());
    for (const auto& f : fields)
      for (const auto& p : level) {
        next.push_back(f.apply(p));
        out.push_back(next.back().constant_term());
      }
    level = std::move(next);
  }
  return out;
}

void enumerate_monomials(const WeightVector& w, int axis, int lo, int hi, std::optional<int> exclude,
                         MultiIndex& current, int current_weight, std::vector<MultiIndex>& out, int max_axis) {
  if (axis == max_axis) {
    if (current_weight >= lo && current_weight <= hi) out.push_back(current);
    return;
  }
  if (exclude && *exclude == axis) {
    enumerate_monomials(w, axis + 1, lo, hi, exclude, current, current_weight, out, max_axis);
    return;
  }
  for (int e = 0; current_weight + e * w[axis] <= hi; ++e) {
    current.exponents[static_cast<std::size_t>(axis)] = static_cast<std::uint8_t>(e);
    enumerate_monomials(w, axis + 1, lo, hi, exclude, current, current_weight + e * w[axis], out, max_axis);
  }
  current.exponents[static_cast<std::size_t>(axis)] = 0;
}

struct Triangular {
  std::vector<TruncatedPolynomial> forward;  // z(u)
  std::vector<TruncatedPolynomial> inverse;  // u(z)
};

// z_i = u_i - p_i(u) with p_i built from monomials in lower-weight u's of weighted degree
// 2..w_i-1, chosen so that every derivative of z_i of length < w_i vanishes at 0.
Triangular triangular_correction(std::span<const PolyVectorField> fields_u, const WeightVector& w, int cap,
                                 std::optional<int> exclude) {
  const int n = w.size();
  Triangular t;
  for (int i = 0; i < n; ++i) {
    const auto ui = TruncatedPolynomial::variable(n, cap, i);
    TruncatedPolynomial correction(n, cap);
    if (w[i] >= 3) {
      int lower = 0;
      while (lower < n && w[lower] < w[i]) ++lower;
      std::vector<MultiIndex> monomials;
      MultiIndex cur;
      enumerate_monomials(w, 0, 2, w[i] - 1, exclude, cur, 0, monomials, lower);
      if (!monomials.empty()) {
        const auto rhs = derivative_constants(ui, fields_u, w[i] - 1);
        Matrix M(rhs.size(), std::vector<Rational>(monomials.size()));
        for (std::size_t c = 0; c < monomials.size(); ++c) {
          const auto col = derivative_constants(TruncatedPolynomial::monomial(n, cap, monomials[c], Rational(1)), fields_u,
                                                w[i] - 1);
          for (std::size_t r = 0; r < col.size(); ++r) M[r][c] = col[r];
        }
        auto coeffs = solve_exact(std::move(M), rhs, static_cast<int>(monomials.size()));
        if (!coeffs)
          throw Error(ErrorCode::kRectificationFailed,
                      "no triangular correction makes coordinate " + std::to_string(i + 1) + " privileged");
        for (std::size_t c = 0; c < monomials.size(); ++c) correction.add_term(monomials[c], (*coeffs)[c]);
      }
    }
    t.forward.push_back(ui - correction);
    // u_i = z_i + p_i(u(z)); p_i only involves already-inverted lower coordinates.
    std::vector<TruncatedPolynomial> subs = t.inverse;
    for (int j = i; j < n; ++j) subs.push_back(TruncatedPolynomial(n, cap));
    t.inverse.push_back(TruncatedPolynomial::variable(n, cap, i) + compose(correction, subs, cap));
  }
  return t;
}

PrivilegedChart assemble(const PrivilegedChart& base, std::vector<TruncatedPolynomial> forward,
                         std::vector<TruncatedPolynomial> inverse) {
  PrivilegedChart c = base;
  c.forward = std::move(forward);
  c.inverse = std::move(inverse);
  return c;
}

}  // namespace

PolyVectorField PrivilegedChart::push(const PolyVectorField& f) const { return push(f, cap); }

PolyVectorField PrivilegedChart::push(const PolyVectorField& f, int cap_override) const {
  if (f.dim() != dim()) throw Error(ErrorCode::kDimensionMismatch, "field dimension differs from chart");
  return push_through(translate(f, center), forward, inverse, cap_override);
}

std::vector<double> PrivilegedChart::to_chart(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) throw Error(ErrorCode::kDimensionMismatch, "point dimension");
  std::vector<double> y(x.begin(), x.end());
  for (int i = 0; i < dim(); ++i) y[static_cast<std::size_t>(i)] -= center[static_cast<std::size_t>(i)].get_d();
  std::vector<double> z;
  for (const auto& p : forward) z.push_back(p.evaluate(std::span<const double>(y)));
  return z;
}

std::vector<double> PrivilegedChart::from_chart(std::span<const double> z) const {
  if (static_cast<int>(z.size()) != dim()) throw Error(ErrorCode::kDimensionMismatch, "point dimension");
  std::vector<double> x;
  for (int i = 0; i < dim(); ++i)
    x.push_back(inverse[static_cast<std::size_t>(i)].evaluate(z) + center[static_cast<std::size_t>(i)].get_d());
  return x;
}

int order_of_function(const TruncatedPolynomial& a, std::span<const PolyVectorField> fields, int max_depth) {
  if (a.is_zero()) throw Error(ErrorCode::kInvalidArgument, "order of the zero function is undefined");
  if (sgn(a.constant_term()) != 0) return 0;
  // Track the degree up to which the current derivatives are exact.
  int field_exact = kUnbounded;
  for (const auto& f : fields)
    if (f.truncated()) field_exact = std::min(field_exact, f.cap());
  int exact = a.truncated() ? a.cap() : kUnbounded;
  std::vector<TruncatedPolynomial> level{a};
  for (int k = 1; k <= max_depth; ++k) {
    std::vector<TruncatedPolynomial> next;
    int level_exact = std::min(exact - 1, field_exact);
    for (const auto& f : fields)
      for (const auto& p : level) {
        auto d = f.apply(p);
        if (d.truncated()) level_exact = std::min(level_exact, d.cap());
        if (!d.is_zero()) next.push_back(std::move(d));
      }
    exact = level_exact;
    if (exact < 0)
      throw Error(ErrorCode::kOrderExceedsCap,
                  "derivatives of length " + std::to_string(k) + " exceed the truncation cap");
    for (const auto& p : next)
      if (sgn(p.constant_term()) != 0) return k;
    if (next.empty()) break;
    level = std::move(next);
  }
  throw Error(ErrorCode::kOrderExceedsCap, "no nonzero derivative up to depth " + std::to_string(max_depth));
}

int order_of_function(const TruncatedPolynomial& a, std::span<const PolyVectorField> fields,
                      std::span<const Rational> q, int max_depth) {
  const auto centered = translated(fields, q);
  return order_of_function(translate(a, q), centered, max_depth);
}

int order_of_field(const PolyVectorField& f, const PrivilegedChart& chart) {
  auto ord = min_weighted_degree(f, chart.weights);
  if (!ord) throw Error(ErrorCode::kZeroField, "order of the zero field is undefined");
  return *ord;
}

PrivilegedChart build_chart(std::span<const PolyVectorField> fields, std::span<const Rational> q,
                            const ChartOptions& options) {
  FlagOptions fo;
  fo.r_max = options.r_max;
  PrivilegedChart chart;
  chart.flag = growth_vector(fields, q, fo);
  chart.center.assign(q.begin(), q.end());
  chart.r = chart.flag.r;
  chart.weights = chart.flag.weights;
  chart.cap = options.cap.value_or(chart.r + 3);
  if (chart.cap < chart.r)
    throw Error(ErrorCode::kCapTooSmall,
                "cap " + std::to_string(chart.cap) + " below the degree of non-holonomy " + std::to_string(chart.r));
  const int n = chart.dim();
  const int cap_int = chart.cap + 1;

  Matrix A(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(n)));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = chart.flag.adapted_basis[static_cast<std::size_t>(j)].value[static_cast<std::size_t>(i)];
  const auto lin_fwd = linear_map(invert_matrix(A), cap_int);
  const auto lin_inv = linear_map(A, cap_int);

  std::vector<PolyVectorField> G;
  for (const auto& f : translated(fields, q)) G.push_back(push_through(f, lin_fwd, lin_inv, cap_int));
  const auto tri = triangular_correction(G, chart.weights, cap_int, std::nullopt);
  chart.forward = compose_all(tri.forward, lin_fwd, cap_int);
  chart.inverse = compose_all(lin_inv, tri.inverse, cap_int);

  const auto report = verify_privileged(chart, fields);
  if (!report.all_pass) {
    for (int i = 0; i < n; ++i)
      if (!report.pass[static_cast<std::size_t>(i)])
        throw Error(ErrorCode::kRectificationFailed,
                    "coordinate " + std::to_string(i + 1) + " has order " +
                        std::to_string(report.orders[static_cast<std::size_t>(i)]) + ", expected " +
                        std::to_string(chart.weights[i]));
  }
  return chart;
}

std::vector<TruncatedPolynomial> invert_series(std::span<const TruncatedPolynomial> map, int cap) {
  const int n = static_cast<int>(map.size());
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "empty map");
  Matrix M(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(n)));
  std::vector<TruncatedPolynomial> nonlinear;
  for (int i = 0; i < n; ++i) {
    const auto& p = map[static_cast<std::size_t>(i)];
    if (sgn(p.constant_term()) != 0) throw Error(ErrorCode::kInvalidArgument, "map must fix the origin");
    TruncatedPolynomial rest(n, cap);
    for (const auto& [alpha, c] : p.terms()) {
      if (alpha.total_degree() == 1) {
        for (int j = 0; j < n; ++j)
          if (alpha[j] == 1) M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = c;
      } else {
        rest.add_term(alpha, c);
      }
    }
    nonlinear.push_back(std::move(rest));
  }
  const Matrix Minv = invert_matrix(M);
  std::vector<TruncatedPolynomial> z;
  for (int i = 0; i < n; ++i) z.push_back(TruncatedPolynomial::variable(n, cap, i));
  auto apply_minv = [&](const std::vector<TruncatedPolynomial>& v) {
    std::vector<TruncatedPolynomial> out;
    for (int i = 0; i < n; ++i) {
      TruncatedPolynomial acc(n, cap);
      for (int j = 0; j < n; ++j) {
        const auto& m = Minv[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        if (sgn(m) != 0) acc += v[static_cast<std::size_t>(j)] * m;
      }
      out.push_back(std::move(acc));
    }
    return out;
  };
  auto inv = apply_minv(z);
  // Each pass fixes one more degree.
  for (int it = 1; it < cap; ++it) {
    std::vector<TruncatedPolynomial> rhs;
    for (int i = 0; i < n; ++i) rhs.push_back(z[static_cast<std::size_t>(i)] - compose(nonlinear[static_cast<std::size_t>(i)], inv, cap));
    inv = apply_minv(rhs);
  }
  return inv;
}

PrivilegedChart rectify_drift(const PrivilegedChart& chart, const PolyVectorField& f0,
                              std::span<const PolyVectorField> fields) {
  const int n = chart.dim();
  const int cap_int = chart.cap + 1;
  const auto g = chart.push(f0, cap_int);
  bool vanishes = true;
  for (int j = 0; j < n; ++j)
    if (sgn(g[j].constant_term()) != 0) vanishes = false;
  if (vanishes) throw Error(ErrorCode::kZeroDriftAtPoint, "drift vanishes at the base point");
  const int s = -*min_weighted_degree(g, chart.weights);
  int k = -1;
  for (int j = 0; j < n && k < 0; ++j)
    if (chart.weights[j] == s && sgn(g[j].constant_term()) != 0) k = j;
  if (k < 0)
    throw Error(ErrorCode::kRectificationFailed,
                "the degree -" + std::to_string(s) + " part of the drift does not contain a coordinate direction at q");

  if (g == PolyVectorField::coordinate(n, cap_int, k)) {
    PrivilegedChart out = chart;
    out.rectified_axis = k;
    out.drift_order = s;
    return out;
  }

  // Flow box: Psi(zeta) = exp(zeta_k g)(zeta with zeta_k = 0), as a Lie series.
  std::vector<TruncatedPolynomial> section;
  for (int l = 0; l < n; ++l)
    section.push_back(l == k ? TruncatedPolynomial(n, cap_int) : TruncatedPolynomial::variable(n, cap_int, l));
  const auto zk = TruncatedPolynomial::variable(n, cap_int, k);
  std::vector<TruncatedPolynomial> psi;
  for (int i = 0; i < n; ++i) {
    TruncatedPolynomial L = TruncatedPolynomial::variable(n, cap_int, i);
    TruncatedPolynomial acc(n, cap_int);
    TruncatedPolynomial zk_pow = TruncatedPolynomial::constant(n, cap_int, Rational(1));
    for (int j = 0; j <= cap_int && !L.is_zero(); ++j) {
      acc += compose(L, section, cap_int) * zk_pow * Rational(Rational(1) / factorial(j));
      zk_pow = zk_pow * zk;
      L = g.apply(L);
    }
    psi.push_back(std::move(acc));
  }
  const auto psi_inv = invert_series(psi, cap_int);
  const auto fwd_zeta = compose_all(psi_inv, chart.forward, cap_int);
  const auto inv_zeta = compose_all(chart.inverse, psi, cap_int);

  std::vector<PolyVectorField> H;
  for (const auto& f : translated(fields, chart.center)) H.push_back(push_through(f, fwd_zeta, inv_zeta, cap_int));
  const auto tri = triangular_correction(H, chart.weights, cap_int, k);

  PrivilegedChart out = assemble(chart, compose_all(tri.forward, fwd_zeta, cap_int), compose_all(inv_zeta, tri.inverse, cap_int));
  out.rectified_axis = k;
  out.drift_order = s;

  const auto report = verify_privileged(out, fields);
  for (int i = 0; i < n; ++i)
    if (!report.pass[static_cast<std::size_t>(i)])
      throw Error(ErrorCode::kRectificationFailed,
                  "after straightening the drift, coordinate " + std::to_string(i + 1) + " has order " +
                      std::to_string(report.orders[static_cast<std::size_t>(i)]) + " instead of " +
                      std::to_string(out.weights[i]));
  const auto residual = out.push(f0) - PolyVectorField::coordinate(n, out.cap, k);
  for (int j = 0; j < n; ++j)
    for (const auto& [alpha, c] : residual[j].terms())
      if (alpha.total_degree() < out.cap)
        throw Error(ErrorCode::kRectificationFailed, "pushed drift differs from the coordinate field below the cap");
  return out;
}

std::vector<PolyVectorField> nilpotent_approximation(std::span<const PolyVectorField> fields,
                                                     const PrivilegedChart& chart) {
  std::vector<PolyVectorField> out;
  out.reserve(fields.size());
  for (const auto& f : fields) out.push_back(homogeneous_part(chart.push(f), chart.weights, -1));
  return out;
}

DriftDecomposition drift_decomposition(const PolyVectorField& f0_in_chart, const PrivilegedChart& chart) {
  DriftDecomposition d;
  d.s = drift_order(f0_in_chart, chart);
  d.principal = homogeneous_part(f0_in_chart, chart.weights, -d.s);
  d.remainder = f0_in_chart - d.principal;
  return d;
}

SeriesApproxSystem homogeneous_series_approx(std::span<const PolyVectorField> fields, const PolyVectorField& f0,
                                             const PrivilegedChart& chart) {
  const auto g0 = chart.push(f0);
  SeriesApproxSystem sys;
  sys.s = drift_decomposition(g0, chart).s;
  sys.rho = (chart.r - 1) / sys.s;
  sys.weights = chart.weights;
  for (int l = 0; l <= sys.rho; ++l) {
    // ad^l loses l degrees of exactness; degree -l*s-1 terms have total degree <= r-1-l*s.
    if (chart.cap - l < chart.r - 1 - l * sys.s)
      throw Error(ErrorCode::kCapTooSmall, "chart cap too small for the series term of order " + std::to_string(l));
  }
  for (const auto& f : fields) {
    std::vector<std::pair<int, PolyVectorField>> terms;
    PolyVectorField ad = chart.push(f);
    for (int l = 0; l <= sys.rho; ++l) {
      if (l > 0) ad = lie_bracket(g0, ad);
      terms.emplace_back(l, homogeneous_part(ad * Rational(Rational(1) / factorial(l)), chart.weights, -l * sys.s - 1));
    }
    sys.terms.push_back(std::move(terms));
  }
  return sys;
}

PrivilegedReport verify_privileged(const PrivilegedChart& chart, std::span<const PolyVectorField> fields) {
  PrivilegedReport report;
  const auto centered = translated(fields, chart.center);
  for (int i = 0; i < chart.dim(); ++i) {
    int ord = -1;
    try {
      ord = order_of_function(chart.forward[static_cast<std::size_t>(i)], centered, chart.r + 2);
    } catch (const Error&) {
      ord = -1;
    }
    const bool ok = ord == chart.weights[i];
    report.orders.push_back(ord);
    report.pass.push_back(ok);
    report.all_pass = report.all_pass && ok;
  }
  return report;
}

}  // namespace carnot
