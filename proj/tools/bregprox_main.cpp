#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bregprox/errors.hpp"
#include "bregprox/harness.hpp"

namespace {

using bregprox::ExperimentConfig;

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

std::vector<std::string> parse_string_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct CommonFlags {
  std::string config_path;
  std::string lambdas;
  std::string bregmans;
  std::string x0;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags* flags) {
  cmd->add_option("--config", flags->config_path, "JSON experiment config");
  cmd->add_option("--lambda", flags->lambdas, "comma-separated lambda values");
  cmd->add_option("--bregman", flags->bregmans, "comma-separated bregman keys");
  cmd->add_option("--x0", flags->x0, "comma-separated initial point");
  cmd->add_option("--out", flags->out_dir, "output directory");
  cmd->add_option_function<std::uint64_t>(
      "--seed",
      [flags](const std::uint64_t& s) {
        flags->seed = s;
        flags->seed_set = true;
      },
      "random seed");
}

ExperimentConfig resolve_config(const CommonFlags& flags) {
  ExperimentConfig cfg;
  if (!flags.config_path.empty()) cfg = bregprox::load_config(flags.config_path);
  if (!flags.lambdas.empty()) cfg.lambdas = parse_double_list(flags.lambdas);
  if (!flags.bregmans.empty()) cfg.bregman_keys = parse_string_list(flags.bregmans);
  if (!flags.x0.empty()) cfg.x0_rows = {parse_double_list(flags.x0)};
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (flags.seed_set) cfg.seed = flags.seed;
  return cfg;
}

constexpr int kExitOk = 0;
constexpr int kExitAcceptanceFailure = 1;
constexpr int kExitConfigError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Bregman regularized proximal solver for monotone equilibrium problems "
      "on the positive orthant and SPD matrices"};
  app.require_subcommand(1);

  CommonFlags sweep_flags, check_flags;
  std::uint64_t appendix_seed = 20250808;
  std::string trace_path;
  double fejer_slack = 1e-6;

  CLI::App* sweep = app.add_subcommand(
      "sweep", "run the (bregman x lambda) benchmark sweep and write traces");
  add_common_flags(sweep, &sweep_flags);

  CLI::App* appendix = app.add_subcommand(
      "appendix", "SPD identities and level-set convexity checks");
  appendix->add_option("--seed", appendix_seed, "random seed");

  CLI::App* check = app.add_subcommand(
      "check", "run the condition checkers and write checks.json");
  add_common_flags(check, &check_flags);

  CLI::App* verify = app.add_subcommand(
      "verify-trace", "re-check run invariants from a trace CSV");
  verify->add_option("file", trace_path, "trace CSV path")->required();
  verify->add_option("--slack", fejer_slack, "monotonicity slack");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (sweep->parsed()) {
      const ExperimentConfig cfg = resolve_config(sweep_flags);
      const bregprox::SweepResult result = bregprox::run_sweep(cfg);
      bool all_ok = true;
      for (const auto& row : result.rows) {
        if (!row.ok()) {
          all_ok = false;
          std::fprintf(stderr, "run %s lambda=%g failed: %s\n", row.bregman.c_str(),
                       row.lambda, row.error.c_str());
        }
      }
      std::printf("%zu runs, outputs in %s\n", result.rows.size(), cfg.out_dir.c_str());
      return all_ok ? kExitOk : kExitAcceptanceFailure;
    }
    if (appendix->parsed()) {
      const bregprox::AppendixResult result = bregprox::run_appendix(appendix_seed);
      std::cout << bregprox::appendix_report_text(result);
      return result.all_ok() ? kExitOk : kExitAcceptanceFailure;
    }
    if (check->parsed()) {
      const ExperimentConfig cfg = resolve_config(check_flags);
      std::cout << bregprox::run_checkers(cfg) << "\n";
      return kExitOk;
    }
    if (verify->parsed()) {
      bregprox::VerifyOptions opts;
      opts.fejer_slack = fejer_slack;
      const bregprox::TraceFileReport report =
          bregprox::verify_trace_file(trace_path, opts);
      std::cout << bregprox::trace_file_report_text(report);
      return report.ok() ? kExitOk : kExitAcceptanceFailure;
    }
  } catch (const bregprox::config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const bregprox::parameter_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitAcceptanceFailure;
  }
  return kExitOk;
}
