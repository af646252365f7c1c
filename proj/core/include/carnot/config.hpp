#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "carnot/dynamics.hpp"
#include "carnot/rational.hpp"
#include "carnot/value.hpp"

namespace carnot {

inline constexpr int kConfigVersion = 1;

struct TermConfig {
  TimeProfile profile;
  std::vector<std::string> field;  // polynomial literals, one per coordinate

  friend bool operator==(const TermConfig&, const TermConfig&) = default;
};

/// Parameters of the `verify` checks. Defaults match the acceptance thresholds.
struct VerifyConfig {
  std::vector<double> eps{0.1, 0.2};
  std::vector<double> horizons{0.5};
  int samples = 2000;
  /// Outer constants must not exceed this.
  double max_constant = 5.0;
  /// Allowed max/min ratio of fitted constants across eps (and horizons).
  double stability = 1.5;
  /// Inner check: targets in Xi_T(eps / inner_divisor), density^n of them, per eps in inner_eps.
  double inner_divisor = 4.0;
  int inner_density = 5;
  std::vector<double> inner_eps{0.2};
  double coverage = 0.95;
  /// Family used for the affine outer fit: "pi-hat", "pi" or "xi".
  std::string family = "pi-hat";
  /// Variations-formula check.
  std::vector<int> series_orders{1, 2, 3, 4};
  double split_horizon = 0.1;
  double split_tolerance = 1e-8;
  /// Replaces the computed weights in box fits; used to demonstrate failures.
  std::optional<std::vector<int>> weights;

  friend bool operator==(const VerifyConfig&, const VerifyConfig&) = default;
};

struct HolderConfig {
  double d_min = 1e-3;
  double d_max = 1e-1;
  int points = 10;
  /// Chart axis swept by SR systems (0-based); default the last axis.
  std::optional<int> axis;

  friend bool operator==(const HolderConfig&, const HolderConfig&) = default;
};

struct SystemConfig {
  int version = kConfigVersion;
  std::string name;
  int n = 0;
  SystemKind kind = SystemKind::kSubRiemannian;
  std::vector<std::vector<TermConfig>> generators;
  std::optional<std::vector<std::string>> drift;
  RationalPoint q;
  /// True when q was given with binary floating-point literals.
  bool q_from_float = false;
  /// Total-degree cap used when parsing literals.
  int literal_cap = 8;
  int r_max = 6;
  std::optional<int> chart_cap;
  /// Series order of the time-dependent leg in split checks and pullback systems.
  int series_order = 4;
  double step = 1e-3;
  double half_width = 10.0;
  std::uint64_t seed = 1;
  double eps = 0.2;
  double horizon = 1.0;
  int samples = 2000;
  int max_segments = 8;
  ValueBudget budget;
  VerifyConfig verify;
  HolderConfig holder;
};

bool operator==(const SystemConfig& a, const SystemConfig& b);

/// Parses and validates a JSON config. Errors carry ErrorCode::kConfig and a line number.
SystemConfig parse_config(const std::string& text, const std::string& source = "<config>");
SystemConfig load_config(const std::string& path);

/// Canonical JSON text (2-space indent, trailing newline).
std::string config_to_json(const SystemConfig& config);

std::vector<PolyVectorField> generator_fields(const SystemConfig& config);
std::optional<PolyVectorField> drift_field(const SystemConfig& config);

/// Dynamics described by the config. ATD configs are expressed in the rectified chart at q,
/// so their base point is the origin.
struct BuiltSystem {
  SystemSpec spec;
  std::vector<double> origin;
  std::optional<PrivilegedChart> chart;
};

BuiltSystem build_system(const SystemConfig& config);

/// Chart at q, rectified when the config has a drift that does not vanish at q.
PrivilegedChart config_chart(const SystemConfig& config);

/// Bundled example names, sorted.
std::vector<std::string> example_names();
/// Throws kConfig listing available names for an unknown one.
SystemConfig example_config(const std::string& name);

}  // namespace carnot
