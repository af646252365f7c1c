#include "carnot/value.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "carnot/errors.hpp"

namespace carnot {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

enum class CostMode { kL1, kEnergy };

// Decision vector: K*m segment displacements v_k (|v_k| is the cost of segment k), followed by
// a horizon parameter when the horizon is free.
class Problem {
 public:
  Problem(const SystemSpec& sys, std::span<const double> q, std::span<const double> target, double T,
          const ValueBudget& budget)
      : sys_(sys),
        q_(q.begin(), q.end()),
        target_(target.begin(), target.end()),
        K_(budget.segments),
        m_(sys.controls()),
        free_horizon_(sys.kind() != SystemKind::kSubRiemannian),
        T_(sys.kind() == SystemKind::kSubRiemannian && T <= 0.0 ? 1.0 : T) {
    if (K_ < 1) throw Error(ErrorCode::kInvalidArgument, "segment count must be >= 1");
    if (!(T_ > 0.0)) throw Error(ErrorCode::kInvalidArgument, "horizon must be positive");
    if (static_cast<int>(q.size()) != sys.dim() || static_cast<int>(target.size()) != sys.dim())
      throw Error(ErrorCode::kDimensionMismatch, "point dimension differs from system");
    opts_.step = budget.step;
    opts_.record = false;
    // never reach the blow-up time of a profile
    if (auto s = sys.singularity(); s && T_ >= *s) throw Error(ErrorCode::kProfileSingularity, "horizon reaches a profile singularity");
  }

  int dims() const { return K_ * m_ + (free_horizon_ ? 1 : 0); }
  int segments() const { return K_; }
  int controls() const { return m_; }
  bool free_horizon() const { return free_horizon_; }
  double T() const { return T_; }
  const State& target() const { return target_; }
  const State& origin() const { return q_; }

  double horizon(const Eigen::VectorXd& th) const {
    if (!free_horizon_) return T_;
    return std::max(1e-6 * T_, T_ * logistic(th[K_ * m_]));
  }

  ControlSignal control(const Eigen::VectorXd& th) const {
    const double Tp = horizon(th);
    std::vector<std::vector<double>> values(static_cast<std::size_t>(K_), std::vector<double>(static_cast<std::size_t>(m_)));
    for (int k = 0; k < K_; ++k)
      for (int i = 0; i < m_; ++i) values[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = th[k * m_ + i] * K_ / Tp;
    return ControlSignal::uniform(Tp, std::move(values));
  }

  double cost(const Eigen::VectorXd& th, CostMode mode) const {
    double l1 = 0.0;
    double sq = 0.0;
    for (int k = 0; k < K_; ++k) {
      const double nk = th.segment(k * m_, m_).norm();
      l1 += nk;
      sq += nk * nk;
    }
    return mode == CostMode::kL1 ? l1 : std::sqrt(K_ * sq);
  }

  // Returns the endpoint; nullopt when the integration failed.
  std::optional<State> endpoint_of(const Eigen::VectorXd& th) const {
    ++evaluations_;
    try {
      return endpoint(sys_, q_, control(th), opts_);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kLeftDomain || e.code() == ErrorCode::kProfileSingularity) return std::nullopt;
      throw;
    }
  }

  std::size_t evaluations() const { return evaluations_; }
  const IntegrateOptions& options() const { return opts_; }

 private:
  const SystemSpec& sys_;
  State q_;
  State target_;
  int K_;
  int m_;
  bool free_horizon_;
  double T_;
  IntegrateOptions opts_;
  mutable std::size_t evaluations_ = 0;
};

struct Candidate {
  Eigen::VectorXd theta;
  double objective = kInf;
  double error = kInf;
};

class Search {
 public:
  Search(const Problem& p, const ValueBudget& b, double tol) : p_(p), b_(b), tol_(tol) {}

  // Evaluates a candidate, recording it when it is feasible.
  Candidate evaluate(const Eigen::VectorXd& th, double penalty, CostMode mode) {
    Candidate c;
    c.theta = th;
    auto end = p_.endpoint_of(th);
    if (!end) return c;
    c.error = distance(*end, p_.target());
    c.objective = p_.cost(th, mode) + penalty * c.error;
    if (c.error <= tol_) record(th, *end, c.error);
    return c;
  }

  std::optional<State> residual(const Eigen::VectorXd& th, Eigen::VectorXd& r) {
    auto end = p_.endpoint_of(th);
    if (!end) return std::nullopt;
    r.resize(static_cast<Eigen::Index>(end->size()));
    for (std::size_t i = 0; i < end->size(); ++i) r[static_cast<Eigen::Index>(i)] = (*end)[i] - p_.target()[i];
    return end;
  }

  bool jacobian(const Eigen::VectorXd& th, const Eigen::VectorXd& r0, Eigen::MatrixXd& J) {
    const int D = p_.dims();
    J.resize(r0.size(), D);
    Eigen::VectorXd r;
    for (int j = 0; j < D; ++j) {
      Eigen::VectorXd tp = th;
      const double h = 1e-6 * std::max(1.0, std::abs(th[j]));
      tp[j] += h;
      if (!residual(tp, r)) return false;
      J.col(j) = (r - r0) / h;
    }
    return true;
  }

  // Damped minimum-norm Gauss-Newton steps towards the target.
  std::optional<Eigen::VectorXd> project(Eigen::VectorXd th, int max_iter = 12) {
    Eigen::VectorXd r;
    auto end = residual(th, r);
    if (!end) return std::nullopt;
    for (int it = 0; it < max_iter; ++it) {
      const double err = r.norm();
      if (err <= 0.05 * tol_) break;
      Eigen::MatrixXd J;
      if (!jacobian(th, r, J)) return std::nullopt;
      const Eigen::MatrixXd JJt = J * J.transpose();
      const double mu = 1e-12 * std::max(1.0, JJt.trace());
      const Eigen::VectorXd y = (JJt + mu * Eigen::MatrixXd::Identity(JJt.rows(), JJt.cols())).ldlt().solve(r);
      Eigen::VectorXd delta = -J.transpose() * y;
      bool improved = false;
      for (int ls = 0; ls < 8; ++ls) {
        Eigen::VectorXd trial = th + delta;
        Eigen::VectorXd rt;
        auto e2 = residual(trial, rt);
        if (e2 && rt.norm() < err) {
          th = trial;
          r = rt;
          end = e2;
          improved = true;
          break;
        }
        delta *= 0.5;
      }
      if (!improved) break;
    }
    const double err = r.norm();
    if (err <= tol_) record(th, *end, err);
    return th;
  }

  // Moves along the constraint manifold to lower the L1 cost, re-projecting after each step.
  void polish(Eigen::VectorXd th) {
    double alpha = 0.25 * std::max(p_.cost(th, CostMode::kL1), 1e-8);
    double best = p_.cost(th, CostMode::kL1);
    const int D = p_.dims();
    const int Km = p_.segments() * p_.controls();
    for (int step = 0; step < b_.polish_steps && alpha > 1e-9 * std::max(best, 1e-12); ++step) {
      Eigen::VectorXd r;
      if (!residual(th, r)) return;
      Eigen::MatrixXd J;
      if (!jacobian(th, r, J)) return;
      Eigen::VectorXd g = Eigen::VectorXd::Zero(D);
      for (int k = 0; k < p_.segments(); ++k) {
        const auto seg = th.segment(k * p_.controls(), p_.controls());
        const double nk = seg.norm();
        if (nk > 0.0) g.segment(k * p_.controls(), p_.controls()) = seg / nk;
      }
      (void)Km;
      const Eigen::MatrixXd JJt = J * J.transpose();
      const double mu = 1e-10 * std::max(1.0, JJt.trace());
      const Eigen::VectorXd Pg =
          g - J.transpose() * (JJt + mu * Eigen::MatrixXd::Identity(JJt.rows(), JJt.cols())).ldlt().solve(J * g);
      const double pn = Pg.norm();
      if (pn < 1e-12) return;
      auto proj = project(th - alpha * Pg / pn);
      Eigen::VectorXd rr;
      if (proj && residual(*proj, rr) && rr.norm() <= tol_ && p_.cost(*proj, CostMode::kL1) < best) {
        th = *proj;
        best = p_.cost(th, CostMode::kL1);
        alpha *= 1.5;
      } else {
        alpha *= 0.4;
      }
    }
  }

  void cem(CostMode mode, Eigen::VectorXd mean, Eigen::VectorXd sigma, std::mt19937_64& rng) {
    const int D = p_.dims();
    const int P = std::max(4, b_.population);
    const int E = std::max(2, static_cast<int>(std::ceil(b_.elite_fraction * P)));
    std::normal_distribution<double> normal(0.0, 1.0);
    Candidate best_seen;
    int since_improvement = 0;
    double last_best = best_cost_;
    for (int it = 0; it < b_.iterations; ++it) {
      const double penalty = b_.penalty * std::pow(2.0, it / std::max(1, b_.penalty_doubling));
      std::vector<Candidate> pop;
      pop.reserve(static_cast<std::size_t>(P) + 2);
      pop.push_back(evaluate(mean, penalty, mode));
      if (best_seen.theta.size() == D) pop.push_back(evaluate(best_seen.theta, penalty, mode));
      for (int j = 0; j < P; ++j) {
        Eigen::VectorXd th(D);
        for (int d = 0; d < D; ++d) th[d] = mean[d] + sigma[d] * normal(rng);
        pop.push_back(evaluate(th, penalty, mode));
      }
      std::stable_sort(pop.begin(), pop.end(), [](const Candidate& a, const Candidate& b) { return a.objective < b.objective; });
      best_seen = pop.front();
      const int e = std::min<int>(E, static_cast<int>(pop.size()));
      Eigen::VectorXd mu = Eigen::VectorXd::Zero(D);
      int finite = 0;
      for (int j = 0; j < e; ++j)
        if (std::isfinite(pop[static_cast<std::size_t>(j)].objective)) {
          mu += pop[static_cast<std::size_t>(j)].theta;
          ++finite;
        }
      if (finite == 0) {
        sigma *= 0.5;
        continue;
      }
      mu /= finite;
      Eigen::VectorXd var = Eigen::VectorXd::Zero(D);
      for (int j = 0; j < e; ++j)
        if (std::isfinite(pop[static_cast<std::size_t>(j)].objective))
          var += (pop[static_cast<std::size_t>(j)].theta - mu).cwiseAbs2();
      var /= finite;
      mean = 0.8 * mu + 0.2 * mean;
      sigma = (0.7 * var.cwiseSqrt() + 0.3 * sigma).cwiseMax(1e-10);
      if (b_.refine && (it + 1) % 20 == 0) {
        if (auto pr = project(pop.front().theta)) {
          Eigen::VectorXd r;
          if (residual(*pr, r) && r.norm() <= tol_) mean = *pr;
        }
      }
      if (done()) return;
      if (best_cost_ < last_best - 1e-12 * std::max(1.0, last_best)) {
        last_best = best_cost_;
        since_improvement = 0;
      } else if (++since_improvement >= b_.patience && has_witness()) {
        return;
      }
    }
    final_population_best_ = best_seen.theta;
  }

  // Re-projects the witness at shifted horizon parameters and keeps cheaper feasible results.
  void retime(int tau_index) {
    if (!witness_) return;
    const Eigen::VectorXd base = *witness_;
    const double p = std::clamp(p_.horizon(base) / p_.T(), 1e-9, 1.0 - 1e-9);
    for (double f : {0.999, 0.99, 0.9, 0.5, 1e-1, 1e-2, 1e-4}) {
      Eigen::VectorXd th = base;
      const double pf = p * f;
      th[tau_index] = std::log(pf / (1.0 - pf));
      project(th);
      if (done()) return;
    }
  }

  bool done() const { return b_.stop_below && has_witness() && best_cost_ <= *b_.stop_below; }
  bool has_witness() const { return witness_.has_value(); }
  double best_cost() const { return best_cost_; }
  const std::optional<Eigen::VectorXd>& witness() const { return witness_; }
  std::size_t feasible_count() const { return feasible_count_; }
  double min_feasible_cost() const { return min_feasible_; }
  double best_error() const { return best_error_; }
  const Eigen::VectorXd& final_population_best() const { return final_population_best_; }

  void note_error(double e) { best_error_ = std::min(best_error_, e); }

 private:
  void record(const Eigen::VectorXd& th, const State&, double err) {
    const double c = p_.control(th).cost();
    ++feasible_count_;
    min_feasible_ = std::min(min_feasible_, c);
    best_error_ = std::min(best_error_, err);
    if (!witness_ || c < best_cost_) {
      witness_ = th;
      best_cost_ = c;
    }
  }

  const Problem& p_;
  const ValueBudget& b_;
  double tol_;
  std::optional<Eigen::VectorXd> witness_;
  double best_cost_ = kInf;
  double min_feasible_ = kInf;
  double best_error_ = kInf;
  std::size_t feasible_count_ = 0;
  Eigen::VectorXd final_population_best_;
};

}  // namespace

double witness_error(const SystemSpec& sys, std::span<const double> q, std::span<const double> target,
                     const ControlSignal& witness, double step) {
  IntegrateOptions o;
  o.step = step;
  o.record = false;
  return distance(endpoint(sys, q, witness, o), target);
}

ValueEstimate estimate_value(const SystemSpec& sys, std::span<const double> q, std::span<const double> target, double T,
                             const ValueBudget& budget) {
  Problem problem(sys, q, target, T, budget);
  const double gap = distance(q, target);
  const double tol = budget.relative_tol > 0.0 && gap > 0.0 ? budget.relative_tol * gap : budget.endpoint_tol;
  if (!(tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "endpoint tolerance must be positive");
  Search search(problem, budget, tol);
  std::mt19937_64 rng(derive_seed(budget.seed, 0));
  const int D = problem.dims();
  const int Km = problem.segments() * problem.controls();

  // Deterministic starts: zero control over the full horizon and, with a free horizon, a short one.
  std::vector<Eigen::VectorXd> starts;
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(D);
  if (problem.free_horizon()) zero[Km] = 6.0;
  starts.push_back(zero);
  if (problem.free_horizon()) {
    for (double tau : {-4.0, -10.0}) {
      Eigen::VectorXd s = zero;
      s[Km] = tau;
      starts.push_back(s);
    }
    // horizon at which the uncontrolled motion passes closest to the target
    try {
      IntegrateOptions o = problem.options();
      o.record = true;
      const auto traj = integrate(sys, q, ControlSignal::constant(problem.T(), std::vector<double>(static_cast<std::size_t>(problem.controls()), 0.0)), o);
      std::size_t best = 0;
      for (std::size_t i = 1; i < traj.states.size(); ++i)
        if (distance(traj.states[i], target) < distance(traj.states[best], target)) best = i;
      const double p = std::clamp(traj.times[best] / problem.T(), 1e-6, 1.0 - 1e-6);
      Eigen::VectorXd s = zero;
      s[Km] = std::log(p / (1.0 - p));
      starts.push_back(s);
    } catch (const Error&) {
    }
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = std::max(gap, 1e-3);
  for (int j = 0; j < 3; ++j) {
    Eigen::VectorXd s = zero;
    for (int d = 0; d < Km; ++d) s[d] = 0.5 * std::sqrt(scale) * normal(rng) / std::sqrt(static_cast<double>(problem.segments()));
    if (problem.free_horizon()) s[Km] = 4.0 - 3.0 * j;
    starts.push_back(s);
  }
  for (const auto& s : starts) {
    auto c = search.evaluate(s, budget.penalty, CostMode::kL1);
    search.note_error(c.error);
    if (budget.refine && !search.done()) search.project(s);
  }

  Eigen::VectorXd mean = search.witness() ? *search.witness() : zero;
  const double c0 = search.has_witness() ? search.best_cost() : scale;
  Eigen::VectorXd sigma = Eigen::VectorXd::Constant(D, std::max(c0, 1e-6) / std::sqrt(static_cast<double>(problem.segments())));
  if (problem.free_horizon()) sigma[Km] = 3.0;

  if (!search.done()) search.cem(CostMode::kL1, mean, sigma, rng);
  if (!search.done()) {
    // Constant-norm reduction: minimising sqrt(K * energy) favours equal-cost segments.
    Eigen::VectorXd m2 = search.witness() ? *search.witness() : zero;
    Eigen::VectorXd s2 = Eigen::VectorXd::Constant(D, std::max(search.has_witness() ? search.best_cost() : scale, 1e-6) /
                                                        std::sqrt(static_cast<double>(problem.segments())));
    search.cem(CostMode::kEnergy, m2, s2, rng);
  }
  if (budget.refine && problem.free_horizon() && !search.done()) search.retime(Km);
  if (budget.refine && search.has_witness() && !search.done()) search.polish(*search.witness());

  if (!search.has_witness()) {
    std::ostringstream os;
    os << "no control reached the target within tolerance " << tol << " (best endpoint error "
       << search.best_error() << ", " << problem.evaluations() << " integrations)";
    throw Error(ErrorCode::kNoFeasibleWitness, os.str());
  }

  ValueEstimate est;
  est.witness = problem.control(*search.witness());
  est.upper = est.witness.cost();
  IntegrateOptions o = problem.options();
  est.endpoint = endpoint(sys, q, est.witness, o);
  est.endpoint_error = distance(est.endpoint, target);
  est.tolerance = tol;
  est.horizon_used = est.witness.horizon();
  est.feasible_count = search.feasible_count();
  est.min_feasible_cost = search.min_feasible_cost();
  est.evaluations = problem.evaluations();
  return est;
}

ControlSignal reach_control(const SystemSpec& sys, double eps, double T, std::uint64_t sample_seed,
                            const ReachOptions& options) {
  std::mt19937_64 rng(sample_seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int m = sys.controls();
  const int K = 1 + static_cast<int>(unif(rng) * options.max_segments) % std::max(1, options.max_segments);
  const double eps_used = eps * unif(rng);
  double Tu;
  if (sys.kind() == SystemKind::kSubRiemannian) {
    Tu = T > 0.0 ? T : 1.0;
  } else {
    const double u = unif(rng);
    Tu = std::max(T * u * u, 1e-9);
    if (auto s = sys.singularity(); s && Tu >= *s) Tu = 0.999 * *s;
  }
  std::vector<double> weights(static_cast<std::size_t>(K));
  double wsum = 0.0;
  for (auto& w : weights) {
    w = unif(rng);
    wsum += w;
  }
  std::vector<std::vector<double>> values;
  for (int k = 0; k < K; ++k) {
    std::vector<double> dir(static_cast<std::size_t>(m));
    double n2 = 0.0;
    for (auto& d : dir) {
      d = normal(rng);
      n2 += d * d;
    }
    const double norm = std::sqrt(n2);
    const double seg_cost = wsum > 0.0 ? eps_used * weights[static_cast<std::size_t>(k)] / wsum : 0.0;
    const double amp = norm > 0.0 ? seg_cost * K / Tu / norm : 0.0;
    for (auto& d : dir) d *= amp;
    values.push_back(std::move(dir));
  }
  auto u = ControlSignal::uniform(Tu, values);
  // Rounding may push the cost a hair above eps; shrink until the bound holds exactly.
  for (double c = u.cost(); c > eps_used && c > 0.0; c = u.cost()) {
    const double f = eps_used / c * (1.0 - 4 * std::numeric_limits<double>::epsilon());
    for (auto& v : values)
      for (auto& x : v) x *= f;
    u = ControlSignal::uniform(Tu, values);
  }
  return u;
}

ReachCloud sample_reachable(const SystemSpec& sys, std::span<const double> q, double eps, double T, int N,
                            std::uint64_t seed, const ReachOptions& options) {
  if (N < 1) throw Error(ErrorCode::kInvalidArgument, "sample count must be >= 1");
  if (eps < 0.0) throw Error(ErrorCode::kInvalidArgument, "eps must be nonnegative");
  if (options.max_segments < 1) throw Error(ErrorCode::kInvalidArgument, "max_segments must be >= 1");
  ReachCloud cloud;
  cloud.eps = eps;
  cloud.T = T;
  cloud.kind = sys.kind();
  cloud.step = options.step;
  cloud.records.resize(static_cast<std::size_t>(N));
  IntegrateOptions o;
  o.step = options.step;
  o.record = false;
  parallel_for(
      static_cast<std::size_t>(N),
      [&](std::size_t i) {
        auto& rec = cloud.records[i];
        rec.seed = derive_seed(seed, i);
        const auto u = reach_control(sys, eps, T, rec.seed, options);
        rec.cost = u.cost();
        rec.horizon = u.horizon();
        rec.segments = u.segments();
        try {
          rec.endpoint = endpoint(sys, q, u, o);
        } catch (const Error& e) {
          rec.ok = false;
          rec.error = e.what();
        }
      },
      options.threads);
  return cloud;
}

FlowBound dsr_upper_via_flow(const SystemSpec& affine_sys, std::span<const double> q, std::span<const double> target,
                             double T, const ValueBudget& budget, double time_spacing) {
  if (affine_sys.kind() != SystemKind::kAffine || !affine_sys.drift())
    throw Error(ErrorCode::kInvalidArgument, "flow bound needs an affine system with drift");
  if (T < 0.0 || !(time_spacing > 0.0)) throw Error(ErrorCode::kInvalidArgument, "need T >= 0 and positive spacing");
  const auto sr = SystemSpec::sub_riemannian(affine_sys.generators_at_zero());
  FlowBound fb;
  fb.bound = kInf;
  const int steps = static_cast<int>(std::floor(T / time_spacing + 1e-9));
  for (int j = 0; j <= steps; ++j) {
    const double t = j * time_spacing;
    const auto p = drift_flow(*affine_sys.drift(), q, t, budget.step, affine_sys.domain_half_width());
    ValueBudget b = budget;
    b.seed = derive_seed(budget.seed, static_cast<std::uint64_t>(j));
    double v = kInf;
    if (distance(p, target) <= budget.endpoint_tol) {
      v = 0.0;
    } else {
      try {
        v = estimate_value(sr, p, target, 1.0, b).upper;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNoFeasibleWitness) throw;
      }
    }
    fb.times.push_back(t);
    fb.values.push_back(v);
    if (v < fb.bound) {
      fb.bound = v;
      fb.best_time = t;
    }
  }
  return fb;
}

}  // namespace carnot
