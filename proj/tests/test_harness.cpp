#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bregprox/errors.hpp"
#include "bregprox/harness.hpp"

using namespace bregprox;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_sweep_config(const std::string& out_dir) {
  ExperimentConfig cfg;
  cfg.bregman_keys = {"org", "breg2"};
  cfg.lambdas = {0.3};
  cfg.out_dir = out_dir;
  return cfg;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config parsing, defaults, and overrides") {
  const ExperimentConfig def;
  CHECK(def.manifold_key == "orthant");
  CHECK(def.bifunction_key == "example1");
  CHECK(def.bregman_keys.size() == 3);
  CHECK(def.lambdas.size() == 3);
  CHECK(def.x0_rows.size() == 1);
  CHECK_NOTHROW(def.validate());

  const ExperimentConfig parsed = parse_config_json(R"({
    "manifold": "orthant",
    "bifunction": "example1",
    "bregmans": ["org"],
    "lambdas": [0.5],
    "x0": [4, 4, 4],
    "seed": 7,
    "out_dir": "x"
  })");
  CHECK(parsed.bregman_keys == std::vector<std::string>{"org"});
  CHECK(parsed.lambdas == std::vector<double>{0.5});
  CHECK(parsed.seed == 7);
  CHECK(parsed.x0_point().coords[1] == 4.0);
  CHECK_NOTHROW(parsed.validate());

  const ExperimentConfig spd = parse_config_json(R"({
    "manifold": "spd",
    "bifunction": "spd-logdet",
    "bregmans": ["spd-det"],
    "lambdas": [1.0],
    "x0": [[2, 1], [1, 1]]
  })");
  CHECK(spd.x0_point().coords.rows() == 2);
  CHECK(spd.x0_point().coords(0, 1) == 1.0);
  CHECK_NOTHROW(spd.validate());
}

TEST_CASE("bad configs are rejected with config errors") {
  CHECK_THROWS_AS(parse_config_json("{nonsense"), config_error);

  ExperimentConfig cfg;
  cfg.bregman_keys = {"unknown-key"};
  CHECK_THROWS_AS(cfg.validate(), config_error);

  cfg = ExperimentConfig{};
  cfg.anchor_policy = "fixed";
  CHECK_THROWS_AS(cfg.validate(), config_error);

  cfg = ExperimentConfig{};
  cfg.lambdas = {-1.0};
  CHECK_THROWS_AS(cfg.validate(), config_error);

  cfg = ExperimentConfig{};
  cfg.x0_rows = {{0.5, 2.0, 2.0}};  // infeasible for the bifunction
  CHECK_THROWS_AS(cfg.validate(), config_error);

  cfg = ExperimentConfig{};
  cfg.inner_method = "newton";
  CHECK_THROWS_AS(cfg.validate(), config_error);
}

TEST_CASE("sweep writes traces, summaries, and curves that match the rows") {
  TempDir tmp("bregprox_harness_sweep");
  const ExperimentConfig cfg = small_sweep_config(tmp.path.string());
  const SweepResult result = run_sweep(cfg);

  REQUIRE(result.rows.size() == 2);
  for (const auto& row : result.rows) {
    CHECK(row.ok());
    CHECK(row.termination == "converged");
    CHECK(row.final_er <= cfg.outer_tolerance);
    CHECK(row.outer_iters > 0);
  }

  CHECK(fs::exists(tmp.path / "summary.csv"));
  CHECK(fs::exists(tmp.path / "summary.txt"));
  CHECK(fs::exists(tmp.path / "er_curves.csv"));
  CHECK(fs::exists(tmp.path / "trace_org_lambda0.3.csv"));
  CHECK(fs::exists(tmp.path / "summary_org_lambda0.3.json"));

  // each summary row re-derives from its trace: row count and final Er
  for (const auto& row : result.rows) {
    const fs::path trace_path =
        tmp.path / ("trace_" + row.bregman + "_lambda0.3.csv");
    const TraceFileReport file_report = verify_trace_file(trace_path.string());
    CHECK(file_report.rows == row.outer_iters);
    CHECK(file_report.final_er == doctest::Approx(row.final_er).epsilon(1e-12));
    CHECK(file_report.ok());
    CHECK(file_report.has_reference);
  }

  const std::string summary = slurp(tmp.path / "summary.csv");
  CHECK(summary.rfind("bregman,lambda,outer_iters,total_inner_iters,final_er,termination\n",
                      0) == 0);
  const std::string curves = slurp(tmp.path / "er_curves.csv");
  CHECK(curves.rfind("lambda,bregman,n,Er\n", 0) == 0);
}

TEST_CASE("repeated sweeps with a fixed seed are byte-identical") {
  TempDir tmp_a("bregprox_harness_det_a");
  TempDir tmp_b("bregprox_harness_det_b");
  run_sweep(small_sweep_config(tmp_a.path.string()));
  run_sweep(small_sweep_config(tmp_b.path.string()));

  for (const char* name :
       {"trace_org_lambda0.3.csv", "trace_breg2_lambda0.3.csv", "summary.csv",
        "er_curves.csv"}) {
    CHECK(slurp(tmp_a.path / name) == slurp(tmp_b.path / name));
  }
}

TEST_CASE("sweep records a failing run and continues") {
  TempDir tmp("bregprox_harness_fail");
  ExperimentConfig cfg = small_sweep_config(tmp.path.string());
  cfg.max_outer = 3;  // too few to converge: termination reason records it
  const SweepResult result = run_sweep(cfg);
  REQUIRE(result.rows.size() == 2);
  for (const auto& row : result.rows) {
    CHECK(row.ok());
    CHECK(row.termination == "max_outer_reached");
  }
}

TEST_CASE("a run that cannot converge is recorded and the sweep continues") {
  // The log-det field scaled by the determinant regularizer has no
  // stationary point when lambda * det(x0) < 1; the run must fail cleanly
  // and leave its reason in the summary row.
  TempDir tmp("bregprox_harness_illposed");
  ExperimentConfig cfg;
  cfg.manifold_key = "spd";
  cfg.bifunction_key = "spd-logdet";
  cfg.bregman_keys = {"spd-det"};
  cfg.lambdas = {0.5};
  cfg.x0_rows = {{1.0, 0.0}, {0.0, 1.0}};
  cfg.max_inner = 150;
  cfg.max_outer = 3;
  cfg.inner_method = "extragradient";
  cfg.out_dir = tmp.path.string();

  const SweepResult result = run_sweep(cfg);
  REQUIRE(result.rows.size() == 1);
  CHECK(!result.rows[0].ok());
  CHECK(result.rows[0].termination == "failed");
  CHECK(!result.rows[0].error.empty());
  CHECK(fs::exists(tmp.path / "summary.csv"));
  CHECK(slurp(tmp.path / "summary.csv").find("failed") != std::string::npos);
}

TEST_CASE("verify-trace flags corrupted monotonicity") {
  TempDir tmp("bregprox_harness_corrupt");
  fs::create_directories(tmp.path);
  const fs::path path = tmp.path / "bad.csv";
  {
    std::ofstream out(path);
    out << "n,Er,inner_iters,D_to_ref,D_step,elapsed_ms\n";
    out << "0,1.0e-01,3,5.0e+00,1.0e-02,0\n";
    out << "1,1.0e-02,2,6.0e+00,1.0e-03,0\n";  // divergence to reference grew
    out << "2,1.0e-07,1,4.0e+00,1.0e-09,0\n";
  }
  const TraceFileReport report = verify_trace_file(path.string());
  CHECK(report.rows == 3);
  CHECK(!report.fejer_ok);
  CHECK(report.max_fejer_violation == doctest::Approx(1.0));
  CHECK(!report.ok());

  CHECK_THROWS_AS(verify_trace_file((tmp.path / "missing.csv").string()), config_error);
}

TEST_CASE("appendix checks reproduce the SPD identities and verdicts") {
  const AppendixResult r = run_appendix();

  // endpoints agree with the published values; the midpoint is computed as
  // negative, so the published positive figure is flagged rather than forced
  CHECK(std::abs(r.computed[0] - r.published[0]) <= r.tolerance);
  CHECK(std::abs(r.computed[1] - r.published[1]) <= r.tolerance);
  CHECK(r.computed[2] == doctest::Approx(-0.5610505678).epsilon(1e-8));
  CHECK(std::abs(r.computed[2] - r.published[2]) > r.tolerance);
  CHECK(!r.values_ok);

  CHECK(r.det_identities.interpolation_ok);
  CHECK(r.det_identities.closed_form_ok);
  CHECK(r.det_convex_ok);
  CHECK(r.trace_violation_found);
  CHECK(!r.all_ok());

  const std::string text = appendix_report_text(r);
  CHECK(text.find("DIFFERS") != std::string::npos);
  CHECK(text.find("violation-found") != std::string::npos);
}

TEST_CASE("checkers report serializes the configured combinations") {
  TempDir tmp("bregprox_harness_checks");
  ExperimentConfig cfg = small_sweep_config(tmp.path.string());
  const std::string json = run_checkers(cfg);
  CHECK(fs::exists(tmp.path / "checks.json"));
  CHECK(json.find("\"monotone\"") != std::string::npos);
  CHECK(json.find("\"C6\"") != std::string::npos);
  CHECK(json.find("\"B1\"") != std::string::npos);
  CHECK(json.find("\"B2\"") != std::string::npos);
  CHECK(json.find("\"Kx_convexity\"") != std::string::npos);
  CHECK(json.find("\"pass\": true") != std::string::npos);
  // zero-curvature combinations cannot exhibit level-set violations
  CHECK(json.find("\"verdict\": \"violation-found\"") == std::string::npos);
}

TEST_CASE("checkers flag the trace-regularized level set on the spd manifold") {
  TempDir tmp("bregprox_harness_spd_checks");
  ExperimentConfig cfg;
  cfg.manifold_key = "spd";
  cfg.bifunction_key = "spd-logdet";
  cfg.bregman_keys = {"spd-det", "spd-trace"};
  cfg.lambdas = {1.0};
  cfg.x0_rows = {{4.0, 2.0}, {2.0, 3.0}};
  cfg.out_dir = tmp.path.string();
  const std::string json = run_checkers(cfg);

  const auto parsed = nlohmann::json::parse(json);
  bool det_clean = false, trace_flagged = false;
  for (const auto& combo : parsed["combinations"]) {
    const std::string verdict = combo["Kx_convexity"]["verdict"];
    if (combo["bregman"] == "spd-det") det_clean = verdict == "no-violation-found";
    if (combo["bregman"] == "spd-trace") {
      trace_flagged = verdict == "violation-found";
      if (trace_flagged) {
        // the stored violation re-checks from the file content alone
        auto to_point = [](const nlohmann::json& rows) {
          Mat m(2, 2);
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
              m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
                            .template get<double>();
          return Point{m};
        };
        const auto& kx = combo["Kx_convexity"];
        const auto& v = kx["violations"][0];
        CHECK(v["value_y1"].template get<double>() < 0.0);
        CHECK(v["value_y2"].template get<double>() < 0.0);
        CHECK(v["value_mid"].template get<double>() >= 0.0);

        SpdManifold m(2);
        const Bifunction f = spd_logdet_bifunction(2);
        const BregmanDistance d(m, trace_bregman(2));
        const Point anchor{Mat(2, 2, {4.0, 2.0, 2.0, 3.0})};
        const RegularizedBifunction g = regularize(f, d, anchor, 1.0);
        const Point x = to_point(kx["x"]);
        const Point y1 = to_point(v["y1"]);
        const Point y2 = to_point(v["y2"]);
        const double t = v["t"].template get<double>();
        CHECK(g(x, y1) == doctest::Approx(v["value_y1"].template get<double>()).epsilon(1e-10));
        CHECK(g(x, y2) == doctest::Approx(v["value_y2"].template get<double>()).epsilon(1e-10));
        CHECK(g(x, m.geodesic(y1, y2)(t)) ==
              doctest::Approx(v["value_mid"].template get<double>()).epsilon(1e-10));
      }
    }
  }
  CHECK(det_clean);
  CHECK(trace_flagged);
}
