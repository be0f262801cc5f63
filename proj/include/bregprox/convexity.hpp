#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bregprox/equilibrium.hpp"

namespace bregprox {

// One recorded failure of geodesic convexity of the negative level set
// K = {y : Ft(x, y) < 0}: both endpoints lie in K but gamma(t) does not.
// Stores everything needed to re-check the claim from the report alone.
struct ConvexityViolation {
  Point y1;
  Point y2;
  double t = 0.0;
  double value_y1 = 0.0;
  double value_y2 = 0.0;
  double value_mid = 0.0;
};

enum class ConvexityVerdict { kNoViolationFound, kViolationFound, kInconclusive };

std::string to_string(ConvexityVerdict v);

struct ConvexityReport {
  Point probe_point;  // the x whose level set was probed
  int pairs_tested = 0;
  ConvexityVerdict verdict = ConvexityVerdict::kInconclusive;
  std::vector<ConvexityViolation> violations;
  // A finding of "no violation" is sampling evidence, never a proof.
};

struct ConvexityProbeOptions {
  double ball_radius = 3.0;   // sample negative-level points within this geodesic ball
  int sample_budget_per_pair = 50;
  std::vector<double> t_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  bool stop_at_first_violation = false;
};

// Samples pairs (y1, y2) with Ft(x, .) < 0 at both ends by rejection inside
// a geodesic ball around x, and evaluates Ft(x, gamma(y1, y2; t)) over the
// t grid. Deterministic for a fixed seed.
ConvexityReport test_kx_convexity(const RegularizedBifunction& g, const Point& x,
                                  int pairs, const ConvexityProbeOptions& opts,
                                  std::uint64_t seed);

// The 2x2 trace-regularization instance with its published data set:
//   x = [[2,1],[1,1]], anchor = [[4,2],[2,3]],
//   y1 = [[3,1],[1,2]], y2 = [[5,2],[2,1]], lambda = 1.
// Returns Ft(x, y1), Ft(x, y2), Ft(x, gamma(y1, y2; 1/2)) computed through
// the general pipeline, plus a report on whether the triple itself exhibits
// a convexity violation.
struct TraceInstanceResult {
  std::array<double, 3> values{};  // Ft(x,y1), Ft(x,y2), Ft(x,mid)
  ConvexityReport report;
};

TraceInstanceResult reproduce_trace_instance(double lambda = 1.0);

// Determinant-regularization identities on SPD: (a) det gamma(y1,y2;t) =
// (det y1)^(1-t) (det y2)^t, and (b) the pipeline Ft against its closed form
// (1 + lambda (det x - det anchor)) ln(det y / det x).
struct DetIdentityReport {
  int pairs_tested = 0;
  double worst_interpolation_error = 0.0;  // relative
  double worst_closed_form_error = 0.0;    // absolute
  bool interpolation_ok = false;
  bool closed_form_ok = false;
};

DetIdentityReport verify_det_identities(int pairs, std::span<const double> t_grid,
                                        std::uint64_t seed);

}  // namespace bregprox
