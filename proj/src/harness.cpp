#include "bregprox/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "bregprox/errors.hpp"

namespace bregprox {

namespace {

using nlohmann::json;

std::string format_lambda(double lambda) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", lambda);
  return buf;
}

std::unique_ptr<Manifold> make_manifold(const ExperimentConfig& cfg) {
  const auto rows = cfg.x0_rows.size();
  if (cfg.manifold_key == "orthant") {
    if (rows != 1) throw config_error("orthant x0 must be a flat array");
    return std::make_unique<PositiveOrthant>(
        static_cast<int>(cfg.x0_rows[0].size()));
  }
  if (cfg.manifold_key == "spd") {
    if (rows < 2) throw config_error("spd x0 must be a nested row-major array");
    return std::make_unique<SpdManifold>(static_cast<int>(rows));
  }
  throw config_error("unknown manifold key: " + cfg.manifold_key);
}

json point_to_json(const Point& p) {
  json j;
  if (p.coords.cols() == 1) {
    for (int i = 0; i < p.coords.rows(); ++i) j.push_back(p.coords[i]);
  } else {
    for (int i = 0; i < p.coords.rows(); ++i) {
      json row;
      for (int k = 0; k < p.coords.cols(); ++k) row.push_back(p.coords(i, k));
      j.push_back(row);
    }
  }
  return j;
}

// Violations carry everything needed to re-check them from the file alone.
json convexity_report_to_json(const ConvexityReport& r) {
  json j;
  j["x"] = point_to_json(r.probe_point);
  j["verdict"] = to_string(r.verdict);
  j["pairs_tested"] = r.pairs_tested;
  json violations = json::array();
  for (const auto& v : r.violations) {
    violations.push_back({
        {"y1", point_to_json(v.y1)},
        {"y2", point_to_json(v.y2)},
        {"t", v.t},
        {"value_y1", v.value_y1},
        {"value_y2", v.value_y2},
        {"value_mid", v.value_mid},
    });
  }
  j["violations"] = std::move(violations);
  return j;
}

}  // namespace

ExperimentConfig::ExperimentConfig() : x0_rows{{20.0, 5.0, 3.0}} {}

void ExperimentConfig::validate() const {
  if (anchor_policy != "iterate") {
    throw config_error("anchor_policy must be 'iterate'");
  }
  if (inner_method != "logchart" && inner_method != "extragradient") {
    throw config_error("inner_method must be 'logchart' or 'extragradient'");
  }
  if (bregman_keys.empty()) throw config_error("no bregman keys configured");
  if (lambdas.empty()) throw config_error("no lambda values configured");
  for (double l : lambdas) {
    if (!(l > 0.0)) throw config_error("lambda values must be positive");
  }
  if (x0_rows.empty()) throw config_error("x0 missing");
  if (!(inner_tolerance > 0.0) || !(outer_tolerance > 0.0)) {
    throw config_error("tolerances must be positive");
  }
  if (max_outer <= 0 || max_inner <= 0) {
    throw config_error("iteration limits must be positive");
  }

  // Resolve every key now so a bad config fails before any run starts.
  const auto manifold = make_manifold(*this);
  const Point x0 = x0_point();
  manifold->validate_point(x0);
  const Bifunction f = make_bifunction(bifunction_key);
  if (!f.domain().contains(x0)) {
    throw config_error("x0 is not feasible for bifunction '" + bifunction_key + "'");
  }
  for (const auto& key : bregman_keys) {
    const BregmanFunction phi = make_bregman(key, *manifold, x0);
    if (!phi.zone().contains(x0)) {
      throw config_error("x0 is outside the zone of bregman '" + key + "'");
    }
  }
}

Point ExperimentConfig::x0_point() const {
  if (x0_rows.size() == 1) {
    return Point{Mat::col_vector(x0_rows[0])};
  }
  const int n = static_cast<int>(x0_rows.size());
  Mat m(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(x0_rows[static_cast<std::size_t>(i)].size()) != n) {
      throw config_error("x0 matrix must be square");
    }
    for (int j = 0; j < n; ++j) {
      m(i, j) = x0_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return Point{m};
}

ExperimentConfig parse_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw config_error(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    if (j.contains("manifold")) cfg.manifold_key = j["manifold"].get<std::string>();
    if (j.contains("bifunction")) cfg.bifunction_key = j["bifunction"].get<std::string>();
    if (j.contains("bregmans")) cfg.bregman_keys = j["bregmans"].get<std::vector<std::string>>();
    if (j.contains("lambdas")) cfg.lambdas = j["lambdas"].get<std::vector<double>>();
    if (j.contains("x0")) {
      cfg.x0_rows.clear();
      const json& x0 = j["x0"];
      if (!x0.is_array() || x0.empty()) throw config_error("x0 must be a non-empty array");
      if (x0[0].is_array()) {
        for (const auto& row : x0) cfg.x0_rows.push_back(row.get<std::vector<double>>());
      } else {
        cfg.x0_rows.push_back(x0.get<std::vector<double>>());
      }
    }
    if (j.contains("anchor_policy")) cfg.anchor_policy = j["anchor_policy"].get<std::string>();
    if (j.contains("inner_method")) cfg.inner_method = j["inner_method"].get<std::string>();
    if (j.contains("inner_tolerance")) cfg.inner_tolerance = j["inner_tolerance"].get<double>();
    if (j.contains("outer_tolerance")) cfg.outer_tolerance = j["outer_tolerance"].get<double>();
    if (j.contains("max_outer")) cfg.max_outer = j["max_outer"].get<int>();
    if (j.contains("max_inner")) cfg.max_inner = j["max_inner"].get<int>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
  } catch (const json::exception& e) {
    throw config_error(std::string("config field error: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_json(ss.str());
}

namespace {

SolverConfig solver_config_for(const ExperimentConfig& cfg, double lambda) {
  SolverConfig sc;
  sc.lambda_schedule = {lambda};
  sc.inner_tolerance = cfg.inner_tolerance;
  sc.outer_tolerance = cfg.outer_tolerance;
  sc.max_outer = cfg.max_outer;
  sc.max_inner = cfg.max_inner;
  sc.inner_method = cfg.inner_method == "logchart" ? InnerMethod::kLogChart
                                                   : InnerMethod::kExtragradient;
  sc.seed = cfg.seed;
  return sc;
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);

  const auto manifold = make_manifold(cfg);
  const Bifunction f = make_bifunction(cfg.bifunction_key);
  const Point x0 = cfg.x0_point();

  SweepResult result;
  std::ofstream curves(fs::path(cfg.out_dir) / "er_curves.csv");
  curves << "lambda,bregman,n,Er\n";

  for (const auto& bregman_key : cfg.bregman_keys) {
    for (double lambda : cfg.lambdas) {
      SummaryRow row;
      row.bregman = bregman_key;
      row.lambda = lambda;
      const std::string tag = bregman_key + "_lambda" + format_lambda(lambda);
      try {
        const BregmanFunction phi = make_bregman(bregman_key, *manifold, x0);
        const BregmanDistance d(*manifold, phi);
        const SolverConfig sc = solver_config_for(cfg, lambda);
        const SolverTrace trace = solve_outer(f, d, x0, sc);

        row.outer_iters = trace.outer_iterations();
        row.total_inner_iters = trace.total_inner_iterations();
        row.wall_time_s = trace.wall_time_s;
        row.final_er = trace.final_er();
        row.termination = to_string(trace.termination);

        std::optional<Point> x_ref;
        if (f.has_solution_projector()) {
          x_ref = f.project_to_solution(trace.final_point());
        }

        const std::string trace_path = (fs::path(cfg.out_dir) / ("trace_" + tag + ".csv")).string();
        write_trace_csv(trace, d, x_ref, trace_path);
        result.trace_files.push_back(trace_path);

        std::ofstream js(fs::path(cfg.out_dir) / ("summary_" + tag + ".json"));
        js << trace_summary_json(trace, sc, bregman_key) << "\n";

        char buf[128];
        for (std::size_t n = 0; n < trace.records.size(); ++n) {
          std::snprintf(buf, sizeof(buf), "%s,%s,%zu,%.10e\n",
                        format_lambda(lambda).c_str(), bregman_key.c_str(), n,
                        trace.records[n].er);
          curves << buf;
        }
      } catch (const std::exception& e) {
        row.error = e.what();
        row.termination = "failed";
      }
      result.rows.push_back(std::move(row));
    }
  }

  // summary.csv stays timing-free so reruns are byte-identical; timings live
  // in the text table and the per-run JSON summaries.
  {
    std::ofstream csv(fs::path(cfg.out_dir) / "summary.csv");
    csv << "bregman,lambda,outer_iters,total_inner_iters,final_er,termination\n";
    char buf[256];
    for (const auto& r : result.rows) {
      std::snprintf(buf, sizeof(buf), "%s,%s,%d,%d,%.10e,%s\n", r.bregman.c_str(),
                    format_lambda(r.lambda).c_str(), r.outer_iters,
                    r.total_inner_iters, r.final_er, r.termination.c_str());
      csv << buf;
    }
  }
  {
    std::ofstream txt(fs::path(cfg.out_dir) / "summary.txt");
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-8s %-8s %10s %10s %10s %14s\n", "bregman",
                  "lambda", "outer", "inner", "time_s", "final_er");
    txt << buf;
    for (const auto& r : result.rows) {
      if (!r.ok()) {
        std::snprintf(buf, sizeof(buf), "%-8s %-8s failed: %s\n", r.bregman.c_str(),
                      format_lambda(r.lambda).c_str(), r.error.c_str());
      } else {
        std::snprintf(buf, sizeof(buf), "%-8s %-8s %10d %10d %10.4f %14.3e\n",
                      r.bregman.c_str(), format_lambda(r.lambda).c_str(),
                      r.outer_iters, r.total_inner_iters, r.wall_time_s, r.final_er);
      }
      txt << buf;
    }
  }
  return result;
}

AppendixResult run_appendix(std::uint64_t seed) {
  AppendixResult out;
  out.published = {-0.78407, -0.25569, 0.56105};

  const TraceInstanceResult tri = reproduce_trace_instance(1.0);
  out.computed = tri.values;
  out.values_ok = true;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(out.computed[static_cast<std::size_t>(i)] -
                 out.published[static_cast<std::size_t>(i)]) > out.tolerance) {
      out.values_ok = false;
    }
  }

  const std::vector<double> t_grid = {0.1, 0.3, 0.5, 0.7, 0.9};
  out.det_identities = verify_det_identities(200, t_grid, seed);

  SpdManifold manifold(2);
  const Bifunction logdet = spd_logdet_bifunction(2);
  const Point x{Mat(2, 2, {2.0, 1.0, 1.0, 1.0})};
  const Point anchor{Mat(2, 2, {4.0, 2.0, 2.0, 3.0})};

  ConvexityProbeOptions opts;
  {
    const BregmanDistance det_d(manifold, det_bregman(2));
    const RegularizedBifunction g = regularize(logdet, det_d, anchor, 1.0);
    out.det_convexity = test_kx_convexity(g, x, 100, opts, seed);
    out.det_convex_ok = out.det_convexity.verdict == ConvexityVerdict::kNoViolationFound;
  }
  {
    const BregmanDistance tr_d(manifold, trace_bregman(2));
    const RegularizedBifunction g = regularize(logdet, tr_d, anchor, 1.0);
    ConvexityProbeOptions tr_opts = opts;
    tr_opts.stop_at_first_violation = true;
    out.trace_convexity = test_kx_convexity(g, x, 4000, tr_opts, seed);
    out.trace_violation_found =
        out.trace_convexity.verdict == ConvexityVerdict::kViolationFound;
  }
  return out;
}

std::string appendix_report_text(const AppendixResult& r) {
  std::ostringstream os;
  char buf[160];
  const char* labels[3] = {"Ft(x, y1)          ", "Ft(x, y2)          ",
                           "Ft(x, gamma(1/2))  "};
  for (int i = 0; i < 3; ++i) {
    const double c = r.computed[static_cast<std::size_t>(i)];
    const double p = r.published[static_cast<std::size_t>(i)];
    std::snprintf(buf, sizeof(buf), "%s computed % .5f   published % .5f   %s\n",
                  labels[i], c, p,
                  std::abs(c - p) <= r.tolerance ? "ok" : "DIFFERS");
    os << buf;
  }
  std::snprintf(buf, sizeof(buf),
                "det interpolation identity: worst rel err %.3e (%s)\n",
                r.det_identities.worst_interpolation_error,
                r.det_identities.interpolation_ok ? "ok" : "FAIL");
  os << buf;
  std::snprintf(buf, sizeof(buf),
                "det closed form vs pipeline: worst abs err %.3e (%s)\n",
                r.det_identities.worst_closed_form_error,
                r.det_identities.closed_form_ok ? "ok" : "FAIL");
  os << buf;
  std::snprintf(buf, sizeof(buf), "det-regularized level set: %s over %d pairs (%s)\n",
                to_string(r.det_convexity.verdict).c_str(), r.det_convexity.pairs_tested,
                r.det_convex_ok ? "ok" : "FAIL");
  os << buf;
  std::snprintf(buf, sizeof(buf), "trace-regularized level set: %s after %d pairs (%s)\n",
                to_string(r.trace_convexity.verdict).c_str(),
                r.trace_convexity.pairs_tested,
                r.trace_violation_found ? "ok" : "FAIL");
  os << buf;
  return os.str();
}

std::string run_checkers(const ExperimentConfig& cfg) {
  cfg.validate();
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);

  const auto manifold = make_manifold(cfg);
  const Bifunction f = make_bifunction(cfg.bifunction_key);
  const Point x0 = cfg.x0_point();

  json report;
  report["bifunction"] = cfg.bifunction_key;
  report["manifold"] = cfg.manifold_key;

  {
    Rng rng(cfg.seed);
    const MonotonicityReport mono = check_monotone(f, 500, rng);
    report["conditions"]["monotone"] = {
        {"max_sum", mono.max_sum},
        {"violations", mono.violations},
        {"pass", mono.monotone_evidence},
    };
    Rng rng2 = Rng(cfg.seed).fork(1);
    const ContinuityReport cont = check_semicontinuity(f, *manifold, 200, rng2);
    report["conditions"]["continuity_convexity"] = {
        {"worst_x_gap", cont.worst_x_continuity_gap},
        {"worst_midpoint_slack", cont.worst_midpoint_slack},
        {"x_continuous", cont.x_continuous_evidence},
        {"y_convex", cont.y_convex_evidence},
    };
  }

  const std::vector<double> radii = {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 50.0};
  json combos = json::array();
  std::uint64_t stream = 100;
  for (const auto& key : cfg.bregman_keys) {
    const BregmanFunction phi = make_bregman(key, *manifold, x0);
    const BregmanDistance d(*manifold, phi);
    for (double lambda : cfg.lambdas) {
      json entry;
      entry["bregman"] = key;
      entry["lambda"] = lambda;

      Rng rng = Rng(cfg.seed).fork(stream++);
      const CoercivityReport c6 = check_c6(f, d, x0, lambda, 16, radii, rng);
      entry["C6"] = {
          {"min_at_largest_radius", c6.min_at_largest_radius},
          {"positive", c6.positive_at_largest_radius},
          {"increasing_tail", c6.increasing_tail},
      };

      Rng rng_b = Rng(cfg.seed).fork(stream++);
      const LevelSetReport b1 = check_level_set_bounded(d, x0, 1.0, radii, 16, rng_b);
      entry["B1"] = {
          {"alpha", b1.alpha},
          {"largest_radius_in_set", b1.largest_radius_in_set},
          {"bounded_evidence", b1.bounded_evidence},
      };

      // Limit probe along a synthetic sequence converging to x0.
      std::vector<Point> seq;
      const TangentVector dir = manifold->basis_vector(x0, 0);
      for (int k = 1; k <= 12; ++k) {
        seq.push_back(manifold->exp(x0, (1.0 / (k * k)) * dir));
      }
      const SequenceLimitReport b2 = check_b2_b3(d, seq, x0);
      entry["B2"] = {
          {"final_divergence", b2.divergences.back()},
          {"first_below_tolerance", b2.first_below_tolerance},
      };

      // At x = anchor the regularization collapses to the base bifunction, so
      // level-set convexity must be probed at other x as well.
      ConvexityProbeOptions kx_opts;
      kx_opts.stop_at_first_violation = true;
      const RegularizedBifunction g = regularize(f, d, x0, lambda);
      Rng rng_x = Rng(cfg.seed).fork(stream++);
      ConvexityReport kx = test_kx_convexity(g, x0, 500, kx_opts,
                                             cfg.seed + 7919 * stream++);
      int pairs_total = kx.pairs_tested;
      for (int probe = 0; probe < 6 && kx.violations.empty(); ++probe) {
        const Point x_probe = f.domain().sample(rng_x, 2.0);
        if (!d.phi().zone().contains(x_probe)) continue;
        ConvexityReport more = test_kx_convexity(g, x_probe, 500, kx_opts,
                                                 cfg.seed + 7919 * stream++);
        pairs_total += more.pairs_tested;
        if (!more.violations.empty()) kx = std::move(more);
      }
      kx.pairs_tested = pairs_total;
      entry["Kx_convexity"] = convexity_report_to_json(kx);
      combos.push_back(std::move(entry));
    }
  }
  report["combinations"] = std::move(combos);
  report["x0"] = point_to_json(x0);

  const std::string text = report.dump(2);
  std::ofstream out(fs::path(cfg.out_dir) / "checks.json");
  out << text << "\n";
  return text;
}

TraceFileReport verify_trace_file(const std::string& path, const VerifyOptions& opts) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open trace file: " + path);
  std::string header;
  if (!std::getline(in, header) ||
      header != "n,Er,inner_iters,D_to_ref,D_step,elapsed_ms") {
    throw config_error("unexpected trace header in " + path);
  }

  TraceFileReport report;
  std::vector<double> to_ref, d_step;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    long n = 0, inner = 0, ms = 0;
    double er = 0.0, ref = 0.0, ds = 0.0;
    if (std::sscanf(line.c_str(), "%ld,%lf,%ld,%lf,%lf,%ld", &n, &er, &inner, &ref,
                    &ds, &ms) != 6) {
      throw config_error("malformed trace row: " + line);
    }
    ++report.rows;
    report.final_er = er;
    report.final_dstep = ds;
    to_ref.push_back(ref);
    d_step.push_back(ds);
  }
  if (report.rows <= 1) return report;  // vacuous

  report.dstep_ok = report.final_dstep <= opts.dstep_final;
  report.has_reference = !to_ref.empty() && !std::isnan(to_ref.front());
  if (report.has_reference) {
    for (std::size_t i = 0; i + 1 < to_ref.size(); ++i) {
      report.max_fejer_violation =
          std::max(report.max_fejer_violation, to_ref[i + 1] - to_ref[i]);
    }
    report.fejer_ok = report.max_fejer_violation <= opts.fejer_slack;

    double partial = 0.0;
    for (std::size_t i = 0; i < d_step.size(); ++i) {
      partial += d_step[i];
      const double bound = to_ref[0] + static_cast<double>(i + 1) * opts.fejer_slack;
      report.max_partial_sum_excess =
          std::max(report.max_partial_sum_excess, partial - bound);
    }
    report.summability_ok = report.max_partial_sum_excess <= 0.0;
  }
  return report;
}

std::string trace_file_report_text(const TraceFileReport& r) {
  std::ostringstream os;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "rows: %d, final Er: %.3e, final D_step: %.3e\n",
                r.rows, r.final_er, r.final_dstep);
  os << buf;
  std::snprintf(buf, sizeof(buf), "divergence monotone to reference: %s (worst +%.3e)\n",
                r.fejer_ok ? "ok" : "FAIL", r.max_fejer_violation);
  os << buf;
  std::snprintf(buf, sizeof(buf), "step-divergence summability: %s (excess %.3e)\n",
                r.summability_ok ? "ok" : "FAIL", r.max_partial_sum_excess);
  os << buf;
  std::snprintf(buf, sizeof(buf), "vanishing step divergence: %s\n",
                r.dstep_ok ? "ok" : "FAIL");
  os << buf;
  return os.str();
}

}  // namespace bregprox
