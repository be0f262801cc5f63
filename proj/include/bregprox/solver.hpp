#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bregprox/equilibrium.hpp"

namespace bregprox {

enum class InnerMethod { kExtragradient, kLogChart };

enum class TerminationReason { kConverged, kMaxOuterReached };

std::string to_string(InnerMethod m);
std::string to_string(TerminationReason r);

struct SolverConfig {
  std::vector<double> lambda_schedule{0.3};  // constant when a single entry
  double inner_tolerance = 1e-3;   // inner stop: step distance below this
  double outer_tolerance = 1e-6;   // outer stop: Er(n) = d(x_{n+1}, x_n) below this
  int max_outer = 10000;
  int max_inner = 5000;
  InnerMethod inner_method = InnerMethod::kExtragradient;

  // Extragradient step control: warm-started backtracking on the step size
  // with a dual-norm ratio test |W(z) - W(y)| <= ratio * |W(y)|.
  double step_initial = 1.0;
  double step_max = 10.0;
  double backtrack_ratio = 0.9;
  double backtrack_shrink = 0.8;
  double backtrack_grow = 1.25;

  double fd_step = 1e-6;  // finite-difference scale for gradient surrogates

  // Before declaring convergence the final subproblem is re-solved to
  // confirm_factor * outer_tolerance and Er is re-measured; a failed
  // confirmation adopts the refined iterate and keeps iterating. Guards
  // against false convergence when inexact steps become small while the
  // proximal displacement has not.
  double confirm_factor = 0.1;

  // Approximate-solution certificate: sample the accepted iterate's
  // subproblem values over a geodesic ball and record the minimum. The
  // radius defaults to the inner tolerance scale, which is the resolution an
  // inexact solve can actually certify.
  int residual_samples = 200;
  double residual_radius = 1e-3;
  double residual_scale = 10.0;  // certificate floor is -inner_tolerance * scale

  std::uint64_t seed = 1;

  double lambda_at(int n) const;
  void validate() const;  // throws parameter_error
};

// One accepted outer step. `iterate` is x_{n+1}; Er and the divergence step
// both measure the move from x_n.
struct OuterRecord {
  Point iterate;
  double lambda = 0.0;
  double er = 0.0;                 // d(x_{n+1}, x_n)
  double d_step = 0.0;             // D_phi(x_{n+1}, x_n)
  int inner_iters = 0;
  double elapsed_s = 0.0;
  double residual_min = 0.0;       // min of F_n(x_{n+1}, y) over the sample ball
  Point residual_witness;
};

struct SolverTrace {
  const Manifold* manifold = nullptr;
  Point x0;
  std::vector<OuterRecord> records;
  TerminationReason termination = TerminationReason::kMaxOuterReached;
  double wall_time_s = 0.0;

  int outer_iterations() const { return static_cast<int>(records.size()); }
  int total_inner_iterations() const;
  const Point& final_point() const;
  double final_er() const;
};

// Inner solver failure carrying whatever outer progress had been made.
class solve_error : public std::runtime_error {
 public:
  solve_error(const std::string& what, SolverTrace partial)
      : std::runtime_error(what),
        partial_(std::make_shared<SolverTrace>(std::move(partial))) {}
  const SolverTrace& partial_trace() const { return *partial_; }

 private:
  std::shared_ptr<SolverTrace> partial_;
};

// Warm-started step size shared across inner solves of one run.
struct StepState {
  double alpha = 0.0;  // 0 means "start from cfg.step_initial"
};

// Two-step extragradient on the manifold. Gradient surrogates of
// g(p, .) come from central finite differences along the orthonormal
// coordinate geodesics at p. Works on any manifold; steps are clamped into
// the feasible set after each exponential.
std::pair<Point, int> solve_inner_extragradient(const RegularizedBifunction& g,
                                                const Point& start,
                                                const SolverConfig& cfg,
                                                StepState* state = nullptr);

// Positive-orthant specialization: pulls the subproblem into the global
// log-coordinate chart (an isometry, so the geometry is exact) and runs the
// same extragradient scheme there, stepping through the mirror map of the
// regularizing Bregman function. Throws parameter_error on other manifolds.
std::pair<Point, int> solve_inner_logchart(const RegularizedBifunction& g,
                                           const Point& start,
                                           const SolverConfig& cfg,
                                           StepState* state = nullptr);

// Outer proximal loop: x_{n+1} solves EP(F_n, C) for
//   F_n(x, y) = F(x, y) + lambda_n (D(y, x_n) - D(y, x) - D(x, x_n)),
// stopping when Er(n) <= outer_tolerance or max_outer is hit.
SolverTrace solve_outer(const Bifunction& f, const BregmanDistance& d,
                        const Point& x0, const SolverConfig& cfg);

// --- run-level invariants ---------------------------------------------------

struct VerifyOptions {
  double fejer_slack = 1e-6;
  double dstep_final = 1e-8;
  double residual_eps = 1e-2;
};

struct RunReport {
  bool has_reference = false;
  bool fejer_ok = true;
  double max_fejer_violation = 0.0;     // max increase of D(x_ref, x_n)
  bool summability_ok = true;
  double max_partial_sum_excess = 0.0;  // over D(x_ref, x0) + n * slack
  bool dstep_ok = true;
  double final_dstep = 0.0;
  bool residual_ok = true;
  double worst_residual = 0.0;          // min over records of the 4.2(ii)-style value
  bool all_ok() const {
    return fejer_ok && summability_ok && dstep_ok && residual_ok;
  }
};

// Checks the divergence-monotonicity, summability, vanishing-step, and
// sampled-optimality properties of a completed run. A trace with at most one
// record passes vacuously.
RunReport verify_run(const SolverTrace& trace, const Bifunction& f,
                     const BregmanDistance& d,
                     const std::optional<Point>& x_ref,
                     const VerifyOptions& opts = {});

// --- trace serialization ----------------------------------------------------

// CSV with header n,Er,inner_iters,D_to_ref,D_step,elapsed_ms. D_to_ref is
// written as nan when no reference point is supplied. elapsed_ms is the
// outer-iteration wall time truncated to whole milliseconds.
void write_trace_csv(const SolverTrace& trace, const BregmanDistance& d,
                     const std::optional<Point>& x_ref, const std::string& path);

// JSON run summary: config echo, termination reason, iteration counts,
// final point, wall time.
std::string trace_summary_json(const SolverTrace& trace, const SolverConfig& cfg,
                               const std::string& bregman_key);

}  // namespace bregprox
