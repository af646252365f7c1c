#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "carnot/dynamics.hpp"

namespace carnot {

/// splitmix64 of (seed, index): per-task seeds independent of scheduling.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware concurrency).
/// Callers write results into slot i, so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned threads = 0);

struct ValueBudget {
  int segments = 8;
  int population = 64;
  double elite_fraction = 0.125;
  int iterations = 200;
  double penalty = 10.0;
  int penalty_doubling = 20;
  std::uint64_t seed = 1;
  /// Absolute endpoint tolerance; replaced by relative_tol * |target - q| when relative_tol > 0.
  double endpoint_tol = 1e-3;
  double relative_tol = 0.0;
  double step = 1e-2;
  /// Stop as soon as a witness with cost <= stop_below is found.
  std::optional<double> stop_below;
  /// Iterations without improvement before the search stops early.
  int patience = 60;
  /// Local refinement: Gauss-Newton endpoint projection and cost descent along the constraint.
  bool refine = true;
  int polish_steps = 25;
};

struct ValueEstimate {
  double upper = 0.0;
  std::optional<double> lower;
  ControlSignal witness;
  State endpoint;
  double endpoint_error = 0.0;
  double tolerance = 0.0;
  double horizon_used = 0.0;
  /// Every feasible candidate evaluated during the search, in evaluation order.
  std::size_t feasible_count = 0;
  double min_feasible_cost = 0.0;
  std::size_t evaluations = 0;
};

/// Direct-method upper bound on the L1 value from q to target with horizon T.
/// SR systems use the fixed horizon T (T <= 0 means 1); other kinds search T' in (0, T].
/// Throws NoFeasibleWitness with diagnostics when nothing meets the tolerance.
ValueEstimate estimate_value(const SystemSpec& sys, std::span<const double> q, std::span<const double> target, double T,
                             const ValueBudget& budget = {});

/// Re-integrates a witness and returns |endpoint - target|.
double witness_error(const SystemSpec& sys, std::span<const double> q, std::span<const double> target,
                     const ControlSignal& witness, double step);

struct ReachRecord {
  State endpoint;
  double cost = 0.0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  int segments = 0;
  bool ok = true;
  std::string error;
};

struct ReachCloud {
  std::vector<ReachRecord> records;
  double eps = 0.0;
  double T = 0.0;
  SystemKind kind = SystemKind::kSubRiemannian;
  double step = 0.0;
};

struct ReachOptions {
  int max_segments = 8;
  double step = 1e-2;
  unsigned threads = 0;
};

/// N random controls with cost eps' ~ U[0, eps] and horizon T_used = T * U^2 (SR: T, or 1 if T <= 0).
ReachCloud sample_reachable(const SystemSpec& sys, std::span<const double> q, double eps, double T, int N,
                            std::uint64_t seed, const ReachOptions& options = {});

/// Control used for record `index` of sample_reachable (for audits).
ControlSignal reach_control(const SystemSpec& sys, double eps, double T, std::uint64_t sample_seed,
                            const ReachOptions& options = {});

struct FlowBound {
  double bound = 0.0;
  double best_time = 0.0;
  std::vector<double> times;
  std::vector<double> values;  // +inf where the SR estimate found no witness
};

/// min over t in {0, h, 2h, ...} ∩ [0, T] of the SR estimate from e^{t f0} q to target.
FlowBound dsr_upper_via_flow(const SystemSpec& affine_sys, std::span<const double> q, std::span<const double> target,
                             double T, const ValueBudget& budget = {}, double time_spacing = 0.05);

}  // namespace carnot
