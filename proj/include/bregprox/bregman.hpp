#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bregprox/manifold.hpp"
#include "bregprox/rng.hpp"

namespace bregprox {

// Domain on which a Bregman function is differentiable and its distance is
// evaluated. `contains` is the zone predicate; `description` is for reports.
struct Zone {
  std::function<bool(const Point&)> contains;
  std::string description;
};

Zone whole_manifold_zone(const Manifold& m);

// Scalar function with a Riemannian gradient oracle. Strict geodesic
// convexity on the zone is a caller-checked property (see the test suite);
// the class only carries the oracles.
class BregmanFunction {
 public:
  BregmanFunction(std::string name,
                  std::function<double(const Point&)> value,
                  std::function<TangentVector(const Point&)> grad,
                  Zone zone)
      : name_(std::move(name)), value_(std::move(value)), grad_(std::move(grad)),
        zone_(std::move(zone)) {}

  const std::string& name() const { return name_; }
  const Zone& zone() const { return zone_; }

  double value(const Point& x) const { return value_(x); }
  TangentVector grad(const Point& x) const { return grad_(x); }

 private:
  std::string name_;
  std::function<double(const Point&)> value_;
  std::function<TangentVector(const Point&)> grad_;
  Zone zone_;
};

// Divergence induced by a Bregman function:
//   D(x, y) = phi(x) - phi(y) - <grad phi(y), log_y x>_y.
// Always evaluated through the oracles; printed closed forms are used only
// as cross-checks in the tests.
class BregmanDistance {
 public:
  BregmanDistance(const Manifold& m, BregmanFunction phi)
      : manifold_(&m), phi_(std::move(phi)) {}

  const Manifold& manifold() const { return *manifold_; }
  const BregmanFunction& phi() const { return phi_; }

  // Throws domain_error when either argument is outside the zone.
  double operator()(const Point& x, const Point& y) const;

 private:
  const Manifold* manifold_;
  BregmanFunction phi_;
};

// phi(x) = d^2(x, x0) / 2; grad phi(x) = -log_x x0. The induced divergence
// equals half the squared distance wherever the curvature vanishes and
// dominates it otherwise.
BregmanFunction org_bregman(const Manifold& m, const Point& x0);

// Orthant, phi(x) = sum_i (ln^2 x_i + x_i^2), zone = whole orthant.
BregmanFunction breg1_bregman(int n);

// Orthant, phi(x) = sum_i ln(x_i) ln(ln(x_i)), zone = all coordinates > 1.
BregmanFunction breg2_bregman(int n);

// SPD, phi = det, grad phi(x) = det(x) x.
BregmanFunction det_bregman(int n);

// SPD, phi = trace, grad phi(x) = x^2.
BregmanFunction trace_bregman(int n);

// Registry keyed by the config vocabulary: "org", "breg1", "breg2",
// "spd-det", "spd-trace". `x0` is required by "org" only.
BregmanFunction make_bregman(const std::string& key, const Manifold& m,
                             const std::optional<Point>& x0);

// --- empirical probes for the level-set and limit conditions ---------------

struct RayProbe {
  std::vector<double> radii;
  std::vector<double> divergences;  // D(x, y_r) along the ray
  bool escaped_zone = false;
  bool exceeds_alpha_beyond_some_radius = false;
};

// Samples D(x, y) along random geodesic rays from x and reports how far the
// right level set {y : D(x, y) <= alpha} appears to extend. Evidence only,
// not a proof of boundedness.
struct LevelSetReport {
  double alpha = 0.0;
  double largest_radius_in_set = 0.0;
  bool bounded_evidence = false;  // every probed ray eventually exceeds alpha
  std::vector<RayProbe> rays;
};

LevelSetReport check_level_set_bounded(const BregmanDistance& d, const Point& x,
                                       double alpha, std::span<const double> radii,
                                       int ray_count, Rng& rng);

// Probes the two limit conditions on a convergent sequence: D(limit, y_n) -> 0,
// and (optionally) that a paired bounded sequence z_n with D(z_n, y_n) -> 0
// collapses onto the same limit.
struct SequenceLimitReport {
  std::vector<double> divergences;        // D(limit, y_n)
  int first_below_tolerance = -1;         // -1 when never reached
  std::vector<double> paired_distances;   // d(z_n, limit), empty without z-seq
  bool paired_converges = false;
};

SequenceLimitReport check_b2_b3(const BregmanDistance& d,
                                const std::vector<Point>& sequence,
                                const Point& limit,
                                const std::vector<Point>* paired = nullptr,
                                double tolerance = 1e-8);

}  // namespace bregprox
