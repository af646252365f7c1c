#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <carnot/config.hpp>
#include <carnot/serialize.hpp>

namespace carnot::cli {

enum ExitCode : int {
  kExitPass = 0,
  kExitVerificationFailure = 2,
  kExitConfigError = 3,
  kExitNumericalFailure = 4,
};

/// Command-line overrides; unset fields fall back to the config.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> eps;
  std::optional<double> horizon;
  std::optional<int> samples;
  unsigned threads = 0;
};

struct CommandResult {
  int exit_code = kExitPass;
  Json report;
  /// Extra artifacts keyed by file name (CSV tables).
  std::map<std::string, std::string> files;
};

SystemConfig apply(SystemConfig config, const Overrides& o);

CommandResult cmd_analyze(const SystemConfig& config, const Overrides& o = {});
CommandResult cmd_approx(const SystemConfig& config, const Overrides& o = {});
CommandResult cmd_reach(const SystemConfig& config, const Overrides& o = {});
/// theorem: ballbox-sr, ballbox-td, ballbox-affine, time-bound, split.
CommandResult cmd_verify(const SystemConfig& config, const std::string& theorem, const Overrides& o = {});
CommandResult cmd_holder(const SystemConfig& config, const Overrides& o = {});
/// Report holds {"name", "config"}; files holds "<name>.json".
CommandResult cmd_examples(const std::string& name);

/// Canonical report text.
std::string dump(const Json& report);

}  // namespace carnot::cli
