#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "carnot/compiled_field.hpp"
#include "carnot/privileged.hpp"
#include "carnot/vector_field.hpp"

namespace carnot {

using State = std::vector<double>;

/// Piecewise-constant control: values[k] is applied on [breakpoints[k], breakpoints[k+1]).
class ControlSignal {
 public:
  ControlSignal() = default;
  ControlSignal(std::vector<double> breakpoints, std::vector<std::vector<double>> values);

  /// K equal segments on [0, T].
  static ControlSignal uniform(double T, std::vector<std::vector<double>> values);
  static ControlSignal constant(double T, std::vector<double> value);

  int segments() const { return static_cast<int>(values_.size()); }
  int controls() const { return values_.empty() ? 0 : static_cast<int>(values_.front().size()); }
  double horizon() const { return breakpoints_.empty() ? 0.0 : breakpoints_.back(); }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<std::vector<double>>& values() const { return values_; }

  /// sum_k |u_k|_2 (t_{k+1} - t_k).
  double cost() const;
  /// This control followed by `next`, shifted to start at horizon().
  ControlSignal concatenate(const ControlSignal& next) const;

 private:
  std::vector<double> breakpoints_;
  std::vector<std::vector<double>> values_;
};

/// Scalar time profile from a closed-form set.
struct TimeProfile {
  enum class Kind { kPolynomial, kInverseSquare, kExpDecay };
  Kind kind = Kind::kPolynomial;
  std::vector<double> coefficients{1.0};  // kPolynomial: sum_l c_l t^l
  double scale = 1.0;                      // other kinds: scale * phi(t)

  static TimeProfile constant(double c = 1.0);
  static TimeProfile monomial(int degree, double c);
  /// (1 - t)^{-2}
  static TimeProfile inverse_square(double c = 1.0);
  /// e^{-t}
  static TimeProfile exp_decay(double c = 1.0);

  double operator()(double t) const;
  /// Blow-up time, if any.
  std::optional<double> singularity() const;
  std::string name() const;

  friend bool operator==(const TimeProfile&, const TimeProfile&) = default;
};

enum class SystemKind { kSubRiemannian, kTimeDependent, kApproxTimeDependent, kAffine };

std::string to_string(SystemKind kind);

/// One term profile(t) * field of a time-dependent generator.
struct ProfiledField {
  TimeProfile profile;
  PolyVectorField field;
};

class SystemSpec {
 public:
  SystemSpec() = default;

  static SystemSpec sub_riemannian(std::vector<PolyVectorField> generators);
  static SystemSpec affine(std::vector<PolyVectorField> generators, PolyVectorField drift);
  static SystemSpec time_dependent(std::vector<std::vector<ProfiledField>> generators);
  /// sum_l t^l f_j^l from a homogeneous series approximation (chart coordinates).
  static SystemSpec approx_time_dependent(const SeriesApproxSystem& series);
  /// f_j^t = sum_{l <= L} t^l/l! ad^l(f0) f_j; exact when the series terminates.
  static SystemSpec pullback(const std::vector<PolyVectorField>& generators, const PolyVectorField& drift, int L);

  SystemKind kind() const { return kind_; }
  int dim() const { return dim_; }
  int controls() const { return static_cast<int>(generators_.size()); }
  const std::optional<PolyVectorField>& drift() const { return drift_; }
  const std::vector<std::vector<ProfiledField>>& generators() const { return generators_; }
  /// Time-frozen generator fields at t = 0 (for SR/affine these are the generators).
  std::vector<PolyVectorField> generators_at_zero() const;
  bool time_varying() const;
  /// Earliest blow-up time among the profiles.
  std::optional<double> singularity() const;
  /// True when a pullback series terminated before order L.
  bool exact_series() const { return exact_series_; }

  double domain_half_width() const { return half_width_; }
  void set_domain_half_width(double w);

  /// out = f0(x) + sum_i u_i f_i^t(x).
  void velocity(double t, const double* x, const double* u, double* out) const;

 private:
  struct CompiledTerm {
    TimeProfile profile;
    CompiledField field;
  };
  void compile();

  SystemKind kind_ = SystemKind::kSubRiemannian;
  int dim_ = 0;
  std::vector<std::vector<ProfiledField>> generators_;
  std::optional<PolyVectorField> drift_;
  std::vector<std::vector<CompiledTerm>> compiled_;
  std::optional<CompiledField> compiled_drift_;
  double half_width_ = 10.0;
  bool exact_series_ = false;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  State endpoint;
  ControlSignal control;
  double step = 0.0;
};

struct IntegrateOptions {
  double step = 1e-3;
  bool record = true;
  /// Evaluate time profiles at this fixed time instead of t.
  std::optional<double> frozen_time;
  /// Near a profile singularity t*, steps are capped at graded_fraction * (t* - t).
  double graded_fraction = 0.05;
};

/// Fixed-step RK4 with sub-steps landing on every breakpoint.
/// Throws LeftDomain or ProfileSingularity.
Trajectory integrate(const SystemSpec& sys, std::span<const double> q0, const ControlSignal& u,
                     const IntegrateOptions& options = {});

/// Endpoint only; avoids recording the path.
State endpoint(const SystemSpec& sys, std::span<const double> q0, const ControlSignal& u,
               const IntegrateOptions& options = {});

/// Concatenation of single-generator arcs: phase j runs generator word[j] (0-based) with
/// control l*xi_j/T on an interval of length T/l. T = 0 freezes time at 0 and runs each
/// phase for duration 1/l with control l*xi_j.
State switching_endpoint(const SystemSpec& sys, std::span<const double> q, double T, std::span<const int> word,
                         std::span<const double> xi, double step = 1e-3);

/// Control realising switching_endpoint; its cost is sum_j |xi_j|.
ControlSignal switching_control(int controls, double T, std::span<const int> word, std::span<const double> xi);

/// e^{t f0}(q) by RK4; negative t runs backwards.
State drift_flow(const PolyVectorField& f0, std::span<const double> q, double t, double step = 1e-3,
                 double half_width = 10.0);

struct SplitResult {
  double residual = 0.0;
  bool exact_series = false;
  State affine_endpoint;
  State split_endpoint;
};

/// |endpoint of the affine system - e^{T f0}(endpoint of the pullback system of order L)|.
SplitResult affine_split_check(const SystemSpec& affine_sys, std::span<const double> q, const ControlSignal& u, int L,
                               const IntegrateOptions& options = {});

/// Control eta * Phi^{(k)}(tau / t) on generator i over [0, t], Phi(s) = s^{k+1}(1-s)^{k+1},
/// replaced by its exact segment averages on `segments` pieces and scaled to cost eps.
ControlSignal probe_control(int controls, int i, int k, double eps, double t, int segments = 256);

/// Endpoint of probe_control on `sys`; to leading order q + eps t^k probe_gain(k) ad^k(f0) f_i(q).
State inner_direction_probe(const SystemSpec& sys, std::span<const double> q, int i, int k, double eps, double t,
                            const IntegrateOptions& options = {}, int segments = 256);

/// (-1)^k int Phi / ||Phi^{(k)}||_1.
double probe_gain(int k);

}  // namespace carnot
