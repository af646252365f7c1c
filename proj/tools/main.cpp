#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include <carnot/errors.hpp>

#include "commands.hpp"

namespace {

using namespace carnot;
using namespace carnot::cli;

struct Options {
  std::string config;
  std::string example;
  std::string out;
  std::string theorem = "ballbox-sr";
  Overrides overrides;
};

SystemConfig load(const Options& opt) {
  if (!opt.config.empty() && !opt.example.empty()) throw Error(ErrorCode::kConfig, "give --config or --example, not both");
  if (!opt.example.empty()) return example_config(opt.example);
  if (opt.config.empty()) throw Error(ErrorCode::kConfig, "missing --config (or CARNOT_CONFIG)");
  return load_config(opt.config);
}

void emit(const std::string& command, const CommandResult& res, const std::string& out) {
  if (out.empty()) {
    if (command == "reach") {
      std::cout << res.files.at("reach.csv");
      std::cerr << dump(res.report);
    } else if (command == "examples") {
      std::cout << res.files.begin()->second;
    } else {
      std::cout << dump(res.report);
    }
    return;
  }
  if (command != "examples") write_text((std::filesystem::path(out) / (command + ".json")).string(), dump(res.report));
  for (const auto& [name, text] : res.files) write_text((std::filesystem::path(out) / name).string(), text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ball-box estimates and flag computations for polynomial control systems"};
  app.require_subcommand(1);
  Options opt;
  std::optional<std::uint64_t> seed;
  std::optional<double> eps, horizon;
  std::optional<int> samples;
  unsigned threads = 0;

  const auto add_common = [&](CLI::App* sub, bool needs_config) {
    if (needs_config) {
      sub->add_option("--config", opt.config, "JSON system config")->envname("CARNOT_CONFIG");
      sub->add_option("--example", opt.example, "use a bundled example instead of --config");
    }
    sub->add_option("--seed", seed, "random seed")->envname("CARNOT_SEED");
    sub->add_option("--out", opt.out, "output directory (default: stdout)")->envname("CARNOT_OUT");
    sub->add_option("--eps", eps, "cost bound")->envname("CARNOT_EPS");
    sub->add_option("--horizon", horizon, "time horizon")->envname("CARNOT_HORIZON");
    sub->add_option("--samples", samples, "sample count")->envname("CARNOT_SAMPLES");
    sub->add_option("--threads", threads, "worker threads (0: hardware)")->envname("CARNOT_THREADS");
  };

  auto* analyze = app.add_subcommand("analyze", "flag, privileged chart and drift order at q");
  auto* approx = app.add_subcommand("approx", "nilpotent and series approximations");
  auto* reach = app.add_subcommand("reach", "sample the reachable set of cost <= eps");
  auto* verify = app.add_subcommand("verify", "check a ball-box or time estimate numerically");
  auto* holder = app.add_subcommand("holder", "fit the value-distance exponent");
  auto* examples = app.add_subcommand("examples", "print or write a bundled example config");
  for (auto* sub : {analyze, approx, reach, verify, holder}) add_common(sub, true);
  add_common(examples, false);
  verify->add_option("theorem", opt.theorem, "ballbox-sr | ballbox-td | ballbox-affine | time-bound | split");
  std::string example_name;
  examples->add_option("name", example_name, "example name (omit to list)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitConfigError;
  }
  opt.overrides = Overrides{seed, eps, horizon, samples, threads};

  try {
    CommandResult res;
    std::string command;
    if (*examples) {
      command = "examples";
      if (example_name.empty()) {
        for (const auto& n : example_names()) std::cout << n << "\n";
        return kExitPass;
      }
      res = cmd_examples(example_name);
    } else {
      const auto config = load(opt);
      if (*analyze) {
        command = "analyze";
        res = cmd_analyze(config, opt.overrides);
      } else if (*approx) {
        command = "approx";
        res = cmd_approx(config, opt.overrides);
      } else if (*reach) {
        command = "reach";
        res = cmd_reach(config, opt.overrides);
      } else if (*verify) {
        command = "verify";
        res = cmd_verify(config, opt.theorem, opt.overrides);
      } else {
        command = "holder";
        res = cmd_holder(config, opt.overrides);
      }
    }
    emit(command, res, opt.out);
    return res.exit_code;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return e.code() == ErrorCode::kConfig || e.code() == ErrorCode::kParse ? kExitConfigError : kExitNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericalFailure;
  }
}
