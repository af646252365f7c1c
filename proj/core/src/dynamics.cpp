#include "carnot/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "carnot/errors.hpp"

namespace carnot {

// ---------------------------------------------------------------- ControlSignal

ControlSignal::ControlSignal(std::vector<double> breakpoints, std::vector<std::vector<double>> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorCode::kInvalidArgument, "control needs at least one segment");
  if (breakpoints_.size() != values_.size() + 1)
    throw Error(ErrorCode::kDimensionMismatch, "control needs K+1 breakpoints for K segments");
  if (breakpoints_.front() != 0.0) throw Error(ErrorCode::kInvalidArgument, "control must start at t = 0");
  for (std::size_t k = 0; k + 1 < breakpoints_.size(); ++k)
    if (!(breakpoints_[k + 1] > breakpoints_[k]))
      throw Error(ErrorCode::kInvalidArgument, "breakpoints must be strictly increasing");
  const std::size_t m = values_.front().size();
  if (m == 0) throw Error(ErrorCode::kInvalidArgument, "control values must be nonempty");
  for (const auto& v : values_) {
    if (v.size() != m) throw Error(ErrorCode::kDimensionMismatch, "control segments differ in size");
    for (double x : v)
      if (!std::isfinite(x)) throw Error(ErrorCode::kInvalidArgument, "control value is not finite");
  }
}

ControlSignal ControlSignal::uniform(double T, std::vector<std::vector<double>> values) {
  if (!(T > 0.0)) throw Error(ErrorCode::kInvalidArgument, "control horizon must be positive");
  const std::size_t K = values.size();
  std::vector<double> bp(K + 1);
  for (std::size_t k = 0; k <= K; ++k) bp[k] = T * static_cast<double>(k) / static_cast<double>(K);
  bp[K] = T;
  return ControlSignal(std::move(bp), std::move(values));
}

ControlSignal ControlSignal::constant(double T, std::vector<double> value) { return uniform(T, {std::move(value)}); }

double ControlSignal::cost() const {
  double c = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    double norm2 = 0.0;
    for (double x : values_[k]) norm2 += x * x;
    c += std::sqrt(norm2) * (breakpoints_[k + 1] - breakpoints_[k]);
  }
  return c;
}

ControlSignal ControlSignal::concatenate(const ControlSignal& next) const {
  if (next.controls() != controls()) throw Error(ErrorCode::kDimensionMismatch, "concatenating controls of different size");
  auto bp = breakpoints_;
  const double shift = horizon();
  for (std::size_t k = 1; k < next.breakpoints_.size(); ++k) bp.push_back(shift + next.breakpoints_[k]);
  auto vals = values_;
  vals.insert(vals.end(), next.values_.begin(), next.values_.end());
  return ControlSignal(std::move(bp), std::move(vals));
}

// ---------------------------------------------------------------- TimeProfile

TimeProfile TimeProfile::constant(double c) { return TimeProfile{Kind::kPolynomial, {c}, 1.0}; }

TimeProfile TimeProfile::monomial(int degree, double c) {
  if (degree < 0) throw Error(ErrorCode::kInvalidArgument, "profile degree must be nonnegative");
  std::vector<double> coeffs(static_cast<std::size_t>(degree) + 1, 0.0);
  coeffs.back() = c;
  return TimeProfile{Kind::kPolynomial, std::move(coeffs), 1.0};
}

TimeProfile TimeProfile::inverse_square(double c) { return TimeProfile{Kind::kInverseSquare, {}, c}; }
TimeProfile TimeProfile::exp_decay(double c) { return TimeProfile{Kind::kExpDecay, {}, c}; }

double TimeProfile::operator()(double t) const {
  switch (kind) {
    case Kind::kPolynomial: {
      double v = 0.0;
      for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) v = v * t + *it;
      return v;
    }
    case Kind::kInverseSquare:
      return scale / ((1.0 - t) * (1.0 - t));
    case Kind::kExpDecay:
      return scale * std::exp(-t);
  }
  return 0.0;
}

std::optional<double> TimeProfile::singularity() const {
  if (kind == Kind::kInverseSquare) return 1.0;
  return std::nullopt;
}

std::string TimeProfile::name() const {
  switch (kind) {
    case Kind::kPolynomial:
      return "polynomial";
    case Kind::kInverseSquare:
      return "inverse-square";
    case Kind::kExpDecay:
      return "exp-decay";
  }
  return "unknown";
}

std::string to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::kSubRiemannian:
      return "SR";
    case SystemKind::kTimeDependent:
      return "TD";
    case SystemKind::kApproxTimeDependent:
      return "ATD";
    case SystemKind::kAffine:
      return "Affine";
  }
  return "unknown";
}

// ---------------------------------------------------------------- SystemSpec

namespace {

void check_generators(const std::vector<std::vector<ProfiledField>>& gens) {
  if (gens.empty()) throw Error(ErrorCode::kInvalidArgument, "system needs at least one generator");
  const int n = gens.front().empty() ? 0 : gens.front().front().field.dim();
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "generator without terms");
  for (const auto& g : gens) {
    if (g.empty()) throw Error(ErrorCode::kInvalidArgument, "generator without terms");
    for (const auto& t : g)
      if (t.field.dim() != n) throw Error(ErrorCode::kDimensionMismatch, "generator dimensions differ");
  }
}

std::vector<std::vector<ProfiledField>> autonomous(std::vector<PolyVectorField> fields) {
  std::vector<std::vector<ProfiledField>> gens;
  for (auto& f : fields) gens.push_back({ProfiledField{TimeProfile::constant(), std::move(f)}});
  return gens;
}

}  // namespace

void SystemSpec::compile() {
  check_generators(generators_);
  dim_ = generators_.front().front().field.dim();
  compiled_.clear();
  for (const auto& g : generators_) {
    std::vector<CompiledTerm> terms;
    for (const auto& t : g) terms.push_back({t.profile, CompiledField(t.field)});
    compiled_.push_back(std::move(terms));
  }
  if (drift_) {
    if (drift_->dim() != dim_) throw Error(ErrorCode::kDimensionMismatch, "drift dimension differs from generators");
    compiled_drift_ = CompiledField(*drift_);
  }
}

SystemSpec SystemSpec::sub_riemannian(std::vector<PolyVectorField> generators) {
  SystemSpec s;
  s.kind_ = SystemKind::kSubRiemannian;
  s.generators_ = autonomous(std::move(generators));
  s.compile();
  return s;
}

SystemSpec SystemSpec::affine(std::vector<PolyVectorField> generators, PolyVectorField drift) {
  SystemSpec s;
  s.kind_ = SystemKind::kAffine;
  s.generators_ = autonomous(std::move(generators));
  s.drift_ = std::move(drift);
  s.compile();
  return s;
}

SystemSpec SystemSpec::time_dependent(std::vector<std::vector<ProfiledField>> generators) {
  SystemSpec s;
  s.kind_ = SystemKind::kTimeDependent;
  s.generators_ = std::move(generators);
  s.compile();
  return s;
}

SystemSpec SystemSpec::approx_time_dependent(const SeriesApproxSystem& series) {
  SystemSpec s;
  s.kind_ = SystemKind::kApproxTimeDependent;
  for (const auto& terms : series.terms) {
    std::vector<ProfiledField> g;
    for (const auto& [l, f] : terms)
      if (!f.is_zero() || l == 0) g.push_back({TimeProfile::monomial(l, 1.0), f});
    s.generators_.push_back(std::move(g));
  }
  s.compile();
  return s;
}

SystemSpec SystemSpec::pullback(const std::vector<PolyVectorField>& generators, const PolyVectorField& drift, int L) {
  if (L < 0) throw Error(ErrorCode::kInvalidArgument, "series order must be nonnegative");
  int deg = std::max(1, drift.total_degree());
  for (const auto& f : generators) deg = std::max(deg, f.total_degree());
  // wide enough that no bracket up to order L is truncated
  const int cap = std::max(deg, 1) * (L + 1) + 1;
  const auto f0 = drift.with_cap(std::max(cap, drift.cap()));
  SystemSpec s;
  s.kind_ = SystemKind::kTimeDependent;
  bool exact = true;
  for (const auto& f : generators) {
    auto series = pushforward_series(f0, f.with_cap(std::max(cap, f.cap())), L + 1);
    std::vector<ProfiledField> g;
    for (const auto& [l, term] : series) {
      if (l == L + 1) {
        if (!term.is_zero()) exact = false;
        break;
      }
      if (term.is_zero() && l > 0) continue;
      g.push_back({TimeProfile::monomial(l, 1.0), term});
    }
    s.generators_.push_back(std::move(g));
  }
  s.exact_series_ = exact;
  s.compile();
  return s;
}

std::vector<PolyVectorField> SystemSpec::generators_at_zero() const {
  std::vector<PolyVectorField> out;
  for (const auto& g : generators_) {
    PolyVectorField acc(dim_, g.front().field.cap());
    for (const auto& t : g) acc += t.field * exact_rational(t.profile(0.0));
    out.push_back(std::move(acc));
  }
  return out;
}

bool SystemSpec::time_varying() const {
  for (const auto& g : generators_)
    for (const auto& t : g) {
      if (t.profile.kind != TimeProfile::Kind::kPolynomial) return true;
      for (std::size_t l = 1; l < t.profile.coefficients.size(); ++l)
        if (t.profile.coefficients[l] != 0.0) return true;
    }
  return false;
}

std::optional<double> SystemSpec::singularity() const {
  std::optional<double> best;
  for (const auto& g : generators_)
    for (const auto& t : g)
      if (auto s = t.profile.singularity(); s && (!best || *s < *best)) best = s;
  return best;
}

void SystemSpec::set_domain_half_width(double w) {
  if (!(w > 0.0)) throw Error(ErrorCode::kInvalidArgument, "domain half-width must be positive");
  half_width_ = w;
}

void SystemSpec::velocity(double t, const double* x, const double* u, double* out) const {
  std::fill(out, out + dim_, 0.0);
  if (compiled_drift_) compiled_drift_->accumulate(x, 1.0, out);
  for (std::size_t i = 0; i < compiled_.size(); ++i) {
    if (u[i] == 0.0) continue;
    for (const auto& term : compiled_[i]) term.field.accumulate(x, u[i] * term.profile(t), out);
  }
}

// ---------------------------------------------------------------- integration

namespace {

class Rk4 {
 public:
  explicit Rk4(int n) : n_(n), k1_(n), k2_(n), k3_(n), k4_(n), tmp_(n) {}

  template <class Rhs>
  void step(Rhs&& rhs, double t, double h, std::vector<double>& x) {
    rhs(t, x.data(), k1_.data());
    for (int i = 0; i < n_; ++i) tmp_[i] = x[i] + 0.5 * h * k1_[i];
    rhs(t + 0.5 * h, tmp_.data(), k2_.data());
    for (int i = 0; i < n_; ++i) tmp_[i] = x[i] + 0.5 * h * k2_[i];
    rhs(t + 0.5 * h, tmp_.data(), k3_.data());
    for (int i = 0; i < n_; ++i) tmp_[i] = x[i] + h * k3_[i];
    rhs(t + h, tmp_.data(), k4_.data());
    for (int i = 0; i < n_; ++i) x[i] += h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
  }

 private:
  int n_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

void check_domain(const std::vector<double>& x, double half_width, double t) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || std::abs(x[i]) > half_width) {
      std::ostringstream os;
      os << "trajectory left the box |x_i| <= " << half_width << " at t = " << t << " (coordinate " << i + 1 << ")";
      throw Error(ErrorCode::kLeftDomain, os.str());
    }
}

Trajectory run(const SystemSpec& sys, std::span<const double> q0, const ControlSignal& u,
               const IntegrateOptions& options, bool record) {
  if (!(options.step > 0.0)) throw Error(ErrorCode::kInvalidArgument, "integration step must be positive");
  if (static_cast<int>(q0.size()) != sys.dim()) throw Error(ErrorCode::kDimensionMismatch, "initial point dimension");
  if (u.controls() != sys.controls())
    throw Error(ErrorCode::kDimensionMismatch, "control has " + std::to_string(u.controls()) + " components, system has " +
                                                   std::to_string(sys.controls()));
  const double T = u.horizon();
  std::optional<double> singular = options.frozen_time ? std::nullopt : sys.singularity();
  if (options.frozen_time && sys.singularity() && *options.frozen_time >= *sys.singularity())
    throw Error(ErrorCode::kProfileSingularity, "frozen time at a profile singularity");
  if (singular && T >= *singular) {
    std::ostringstream os;
    os << "time profile blows up at t = " << *singular << " within [0, " << T << "]";
    throw Error(ErrorCode::kProfileSingularity, os.str());
  }

  const double t_star = singular.value_or(0.0);
  Trajectory tr;
  tr.control = u;
  tr.step = options.step;
  std::vector<double> x(q0.begin(), q0.end());
  check_domain(x, sys.domain_half_width(), 0.0);
  if (record) {
    tr.times.push_back(0.0);
    tr.states.push_back(x);
  }
  Rk4 rk(sys.dim());
  const auto& bp = u.breakpoints();
  for (int k = 0; k < u.segments(); ++k) {
    const double* uk = u.values()[static_cast<std::size_t>(k)].data();
    auto rhs = [&](double t, const double* y, double* out) {
      sys.velocity(options.frozen_time ? *options.frozen_time : t, y, uk, out);
    };
    const double a = bp[static_cast<std::size_t>(k)];
    const double b = bp[static_cast<std::size_t>(k) + 1];
    if (!singular) {
      const long nsub = std::max(1L, static_cast<long>(std::ceil((b - a) / options.step - 1e-9)));
      const double h = (b - a) / static_cast<double>(nsub);
      for (long j = 0; j < nsub; ++j) {
        const double t = a + h * static_cast<double>(j);
        rk.step(rhs, t, h, x);
        check_domain(x, sys.domain_half_width(), t + h);
        if (record) {
          tr.times.push_back(j + 1 == nsub ? b : t + h);
          tr.states.push_back(x);
        }
      }
    } else {
      double t = a;
      while (t < b) {
        double h = std::min(options.step, options.graded_fraction * (t_star - t));
        if (t + h >= b || b - (t + h) < 1e-12 * std::max(1.0, b)) h = b - t;
        rk.step(rhs, t, h, x);
        t = (t + h >= b) ? b : t + h;
        check_domain(x, sys.domain_half_width(), t);
        if (record) {
          tr.times.push_back(t);
          tr.states.push_back(x);
        }
      }
    }
  }
  tr.endpoint = x;
  return tr;
}

}  // namespace

Trajectory integrate(const SystemSpec& sys, std::span<const double> q0, const ControlSignal& u,
                     const IntegrateOptions& options) {
  return run(sys, q0, u, options, options.record);
}

State endpoint(const SystemSpec& sys, std::span<const double> q0, const ControlSignal& u,
               const IntegrateOptions& options) {
  return run(sys, q0, u, options, false).endpoint;
}

ControlSignal switching_control(int controls, double T, std::span<const int> word, std::span<const double> xi) {
  if (word.size() != xi.size()) throw Error(ErrorCode::kDimensionMismatch, "word and times differ in length");
  if (word.empty()) throw Error(ErrorCode::kInvalidArgument, "empty switching word");
  if (T < 0.0) throw Error(ErrorCode::kInvalidArgument, "switching horizon must be nonnegative");
  const double D = T > 0.0 ? T : 1.0;
  const auto l = static_cast<double>(word.size());
  std::vector<std::vector<double>> values;
  for (std::size_t j = 0; j < word.size(); ++j) {
    if (word[j] < 0 || word[j] >= controls) throw Error(ErrorCode::kIndexOutOfRange, "switching word letter out of range");
    std::vector<double> v(static_cast<std::size_t>(controls), 0.0);
    v[static_cast<std::size_t>(word[j])] = l * xi[j] / D;
    values.push_back(std::move(v));
  }
  return ControlSignal::uniform(D, std::move(values));
}

State switching_endpoint(const SystemSpec& sys, std::span<const double> q, double T, std::span<const int> word,
                         std::span<const double> xi, double step) {
  if (word.empty()) return State(q.begin(), q.end());
  IntegrateOptions opts;
  opts.step = step;
  if (T == 0.0) opts.frozen_time = 0.0;
  return endpoint(sys, q, switching_control(sys.controls(), T, word, xi), opts);
}

State drift_flow(const PolyVectorField& f0, std::span<const double> q, double t, double step, double half_width) {
  if (!(step > 0.0)) throw Error(ErrorCode::kInvalidArgument, "integration step must be positive");
  if (static_cast<int>(q.size()) != f0.dim()) throw Error(ErrorCode::kDimensionMismatch, "point dimension");
  std::vector<double> x(q.begin(), q.end());
  if (t == 0.0) return x;
  const CompiledField F(f0);
  const double sign = t > 0.0 ? 1.0 : -1.0;
  const long nsub = std::max(1L, static_cast<long>(std::ceil(std::abs(t) / step - 1e-9)));
  const double h = std::abs(t) / static_cast<double>(nsub);
  auto rhs = [&](double, const double* y, double* out) {
    F.evaluate(y, out);
    for (int i = 0; i < F.dim(); ++i) out[i] *= sign;
  };
  Rk4 rk(f0.dim());
  for (long j = 0; j < nsub; ++j) {
    rk.step(rhs, h * static_cast<double>(j), h, x);
    check_domain(x, half_width, sign * h * static_cast<double>(j + 1));
  }
  return x;
}

SplitResult affine_split_check(const SystemSpec& affine_sys, std::span<const double> q, const ControlSignal& u, int L,
                               const IntegrateOptions& options) {
  if (affine_sys.kind() != SystemKind::kAffine || !affine_sys.drift())
    throw Error(ErrorCode::kInvalidArgument, "split check needs an affine system with drift");
  const auto td = SystemSpec::pullback(affine_sys.generators_at_zero(), *affine_sys.drift(), L);
  SplitResult res;
  res.exact_series = td.exact_series();
  res.affine_endpoint = endpoint(affine_sys, q, u, options);
  const auto td_end = endpoint(td, q, u, options);
  res.split_endpoint = drift_flow(*affine_sys.drift(), td_end, u.horizon(), options.step, affine_sys.domain_half_width());
  double r2 = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double d = res.affine_endpoint[i] - res.split_endpoint[i];
    r2 += d * d;
  }
  res.residual = std::sqrt(r2);
  return res;
}

namespace {

// Coefficients (ascending) of s^{k+1}(1-s)^{k+1}.
std::vector<double> bump(int k) {
  std::vector<double> p{1.0};
  for (int i = 0; i < k + 1; ++i) {
    std::vector<double> q(p.size() + 1, 0.0);
    for (std::size_t j = 0; j < p.size(); ++j) {
      q[j] += p[j];
      q[j + 1] -= p[j];
    }
    p = std::move(q);
  }
  std::vector<double> out(static_cast<std::size_t>(k) + 1, 0.0);
  out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::vector<double> differentiate(const std::vector<double>& p) {
  std::vector<double> d;
  for (std::size_t j = 1; j < p.size(); ++j) d.push_back(static_cast<double>(j) * p[j]);
  if (d.empty()) d.push_back(0.0);
  return d;
}

std::vector<double> antiderivative(const std::vector<double>& p) {
  std::vector<double> a{0.0};
  for (std::size_t j = 0; j < p.size(); ++j) a.push_back(p[j] / static_cast<double>(j + 1));
  return a;
}

double horner(const std::vector<double>& p, double s) {
  double v = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * s + *it;
  return v;
}

}  // namespace

ControlSignal probe_control(int controls, int i, int k, double eps, double t, int segments) {
  if (k < 0) throw Error(ErrorCode::kInvalidArgument, "probe derivative order must be nonnegative");
  if (i < 0 || i >= controls) throw Error(ErrorCode::kIndexOutOfRange, "probe generator out of range");
  if (!(t > 0.0) || !(eps >= 0.0) || segments < 1) throw Error(ErrorCode::kInvalidArgument, "probe needs t > 0, eps >= 0");
  // P' = Phi^{(k)}, so segment averages are differences of P.
  std::vector<double> P = bump(k);
  if (k == 0) {
    P = antiderivative(P);
  } else {
    for (int d = 0; d < k - 1; ++d) P = differentiate(P);
  }
  std::vector<double> avg(static_cast<std::size_t>(segments));
  double l1 = 0.0;
  for (int j = 0; j < segments; ++j) {
    const double a = static_cast<double>(j) / segments;
    const double b = static_cast<double>(j + 1) / segments;
    avg[static_cast<std::size_t>(j)] = (horner(P, b) - horner(P, a)) * segments;
    l1 += std::abs(avg[static_cast<std::size_t>(j)]) / segments;
  }
  const double eta = eps / (t * l1);
  std::vector<std::vector<double>> values;
  for (int j = 0; j < segments; ++j) {
    std::vector<double> v(static_cast<std::size_t>(controls), 0.0);
    v[static_cast<std::size_t>(i)] = eta * avg[static_cast<std::size_t>(j)];
    values.push_back(std::move(v));
  }
  return ControlSignal::uniform(t, std::move(values));
}

State inner_direction_probe(const SystemSpec& sys, std::span<const double> q, int i, int k, double eps, double t,
                            const IntegrateOptions& options, int segments) {
  return endpoint(sys, q, probe_control(sys.controls(), i, k, eps, t, segments), options);
}

double probe_gain(int k) {
  if (k < 0) throw Error(ErrorCode::kInvalidArgument, "probe derivative order must be nonnegative");
  const auto phi = bump(k);
  const auto integral = antiderivative(phi);
  const double mass = horner(integral, 1.0);
  auto d = phi;
  for (int j = 0; j < k; ++j) d = differentiate(d);
  // ||Phi^{(k)}||_1 via sign changes of Phi^{(k)} located on a fine grid, integrated exactly
  // with the antiderivative Phi^{(k-1)} (or the integral of Phi for k = 0).
  auto prim = k == 0 ? integral : phi;
  for (int j = 0; j < k - 1; ++j) prim = differentiate(prim);
  constexpr int kGrid = 4096;
  std::vector<double> roots{0.0};
  for (int j = 0; j < kGrid; ++j) {
    double a = static_cast<double>(j) / kGrid;
    double b = static_cast<double>(j + 1) / kGrid;
    double fa = horner(d, a);
    double fb = horner(d, b);
    if (fa == 0.0 && j > 0) {
      roots.push_back(a);
      continue;
    }
    if (fa * fb < 0.0) {
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = horner(d, mid);
        if ((fa < 0.0) == (fm < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
  }
  roots.push_back(1.0);
  double l1 = 0.0;
  for (std::size_t j = 0; j + 1 < roots.size(); ++j) l1 += std::abs(horner(prim, roots[j + 1]) - horner(prim, roots[j]));
  return ((k % 2 == 0) ? 1.0 : -1.0) * mass / l1;
}

}  // namespace carnot
