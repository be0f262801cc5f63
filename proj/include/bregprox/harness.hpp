#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "bregprox/convexity.hpp"
#include "bregprox/solver.hpp"

namespace bregprox {

// Experiment description, normally loaded from a JSON config file. CLI flags
// override individual fields. The anchor policy is fixed to "iterate": each
// subproblem is anchored at the current outer iterate.
struct ExperimentConfig {
  std::string manifold_key = "orthant";
  std::string bifunction_key = "example1";
  std::vector<std::string> bregman_keys = {"org", "breg1", "breg2"};
  std::vector<double> lambdas = {0.3, 0.6, 0.9};
  std::vector<std::vector<double>> x0_rows;  // 1 row = orthant vector, n rows = SPD
  std::string anchor_policy = "iterate";
  std::string inner_method = "logchart";
  double inner_tolerance = 1e-3;
  double outer_tolerance = 1e-6;
  int max_outer = 10000;
  int max_inner = 5000;
  std::uint64_t seed = 20250808;
  std::string out_dir = "out";

  ExperimentConfig();  // fills x0_rows with the default (20, 5, 3)

  void validate() const;  // throws config_error
  Point x0_point() const;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_json(const std::string& text);

struct SummaryRow {
  std::string bregman;
  double lambda = 0.0;
  int outer_iters = 0;
  int total_inner_iters = 0;
  double wall_time_s = 0.0;
  double final_er = 0.0;
  std::string termination;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

struct SweepResult {
  std::vector<SummaryRow> rows;
  std::vector<std::string> trace_files;
};

// Runs solve_outer for every (bregman, lambda) pair of the config. Writes
// per-run trace CSVs and JSON summaries, summary.csv / summary.txt, and a
// long-format Er-curve file er_curves.csv into cfg.out_dir. A failing run is
// recorded in its summary row and the sweep continues.
SweepResult run_sweep(const ExperimentConfig& cfg);

struct AppendixResult {
  std::array<double, 3> computed{};   // trace-instance triple via the pipeline
  std::array<double, 3> published{};  // values the run is compared against
  double tolerance = 1e-4;
  bool values_ok = false;             // all three within tolerance
  DetIdentityReport det_identities;
  ConvexityReport det_convexity;      // expect no violation
  ConvexityReport trace_convexity;    // expect a violation
  bool det_convex_ok = false;
  bool trace_violation_found = false;

  bool all_ok() const {
    return values_ok && det_identities.interpolation_ok &&
           det_identities.closed_form_ok && det_convex_ok && trace_violation_found;
  }
};

// SPD appendix checks: the trace-instance triple, the determinant identities,
// and the negative-level-set convexity probes for both SPD Bregman functions.
AppendixResult run_appendix(std::uint64_t seed = 20250808);

std::string appendix_report_text(const AppendixResult& r);

// Runs the condition checkers (diagonal, monotonicity, coercivity probe,
// continuity/convexity probes, level-set and limit probes, K_x convexity)
// for every configured combination. Returns the JSON report and writes it
// to out_dir/checks.json.
std::string run_checkers(const ExperimentConfig& cfg);

struct TraceFileReport {
  int rows = 0;
  double final_er = 0.0;
  double final_dstep = 0.0;
  bool has_reference = false;
  double max_fejer_violation = 0.0;
  double max_partial_sum_excess = 0.0;
  bool fejer_ok = true;
  bool summability_ok = true;
  bool dstep_ok = true;
  bool ok() const { return fejer_ok && summability_ok && dstep_ok; }
};

// Re-checks the run invariants derivable from a trace CSV alone.
TraceFileReport verify_trace_file(const std::string& path,
                                  const VerifyOptions& opts = {});

std::string trace_file_report_text(const TraceFileReport& r);

}  // namespace bregprox
