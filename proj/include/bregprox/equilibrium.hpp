#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bregprox/bregman.hpp"
#include "bregprox/manifold.hpp"
#include "bregprox/rng.hpp"

namespace bregprox {

// Feasible set C: membership predicate, interior clamp for points that drift
// slightly outside, and a seeded sampler with a scale parameter.
struct FeasibleSet {
  std::function<bool(const Point&)> contains;
  std::function<Point(const Point&)> clamp;
  std::function<Point(Rng&, double)> sample;
  std::string description;
};

// Bifunction F : C x C -> R with F(x, x) = 0 on the diagonal. Construction
// spot-checks the diagonal on sampled feasible points and rejects violators.
// Analytic y-gradient and solution-set oracles are optional extras used by
// the solvers and the run verifier.
class Bifunction {
 public:
  Bifunction(std::string name,
             std::function<double(const Point&, const Point&)> eval,
             FeasibleSet domain,
             std::function<TangentVector(const Point&, const Point&)> grad_y = nullptr,
             std::function<bool(const Point&)> is_solution = nullptr,
             std::function<Point(const Point&)> project_to_solution = nullptr);

  const std::string& name() const { return name_; }
  const FeasibleSet& domain() const { return domain_; }

  double operator()(const Point& x, const Point& y) const;

  bool has_grad_y() const { return static_cast<bool>(grad_y_); }
  TangentVector grad_y(const Point& x, const Point& y) const;

  bool has_solution_oracle() const { return static_cast<bool>(is_solution_); }
  bool is_solution(const Point& x) const;
  bool has_solution_projector() const { return static_cast<bool>(project_); }
  Point project_to_solution(const Point& x) const;

 private:
  std::string name_;
  std::function<double(const Point&, const Point&)> eval_;
  FeasibleSet domain_;
  std::function<TangentVector(const Point&, const Point&)> grad_y_;
  std::function<bool(const Point&)> is_solution_;
  std::function<Point(const Point&)> project_;
};

// Bregman regularization of a bifunction around an anchor point:
//   Ft(x, y) = F(x, y) + lambda * (D(y, anchor) - D(y, x) - D(x, anchor)).
class RegularizedBifunction {
 public:
  RegularizedBifunction(const Bifunction& base, const BregmanDistance& d,
                        Point anchor, double lambda);

  double operator()(const Point& x, const Point& y) const;

  const Bifunction& base() const { return *base_; }
  const BregmanDistance& bregman() const { return *bregman_; }
  const Point& anchor() const { return anchor_; }
  double lambda() const { return lambda_; }

 private:
  const Bifunction* base_;
  const BregmanDistance* bregman_;
  Point anchor_;
  double lambda_;
};

RegularizedBifunction regularize(const Bifunction& base, const BregmanDistance& d,
                                 const Point& anchor, double lambda);

// N = 3 orthant bifunction
//   F(x, y) = 3 ln(x1 x2 / x3) [ln(y1/x1) + ln(y2/x2) - ln(y3/x3)]
// on C = (1, inf)^3. Solutions are exactly the feasible x with x1 x2 = x3.
Bifunction example1_bifunction();

// SPD bifunction F(x, y) = <A(x), log_x y>_x with A(x) = x, which reduces to
// ln(det y / det x).
Bifunction spd_logdet_bifunction(int n);

Bifunction make_bifunction(const std::string& key);

// --- empirical condition checkers ------------------------------------------

struct MonotonicityReport {
  int samples = 0;
  double max_sum = 0.0;            // max of F(x,y) + F(y,x)
  int violations = 0;              // count of sums above 1e-10
  bool monotone_evidence = false;
};

MonotonicityReport check_monotone(const Bifunction& f, int samples, Rng& rng,
                                  double sample_scale = 3.0);

struct CoercivityRay {
  std::vector<double> radii;
  std::vector<double> values;  // F(anchor, y_r) + lambda (D(anchor,y_r) + D(y_r,anchor))
  bool escaped_zone = false;
};

struct CoercivityReport {
  double min_at_largest_radius = 0.0;  // over rays that reached the last radius
  bool positive_at_largest_radius = false;
  bool increasing_tail = false;  // value grows over the last two radii on every full ray
  int full_length_rays = 0;
  std::vector<CoercivityRay> rays;
};

// Probes liminf F(anchor, y) + lambda (D(anchor, y) + D(y, anchor)) along
// random geodesic rays of increasing radius.
CoercivityReport check_c6(const Bifunction& f, const BregmanDistance& d,
                          const Point& anchor, double lambda, int ray_count,
                          std::span<const double> radii, Rng& rng);

struct ContinuityReport {
  double worst_x_continuity_gap = 0.0;   // |F(x_k,y) - F(x,y)| at the tightest probe
  double worst_midpoint_slack = 0.0;     // max F(x, gamma(t)) - [(1-t)F(x,y1) + tF(x,y2)]
  bool x_continuous_evidence = false;
  bool y_convex_evidence = false;
};

// Numerically probes continuity of x -> F(x, y) along converging sequences
// and geodesic convexity of y -> F(x, y) via interior-point sampling.
ContinuityReport check_semicontinuity(const Bifunction& f, const Manifold& m,
                                      int samples, Rng& rng,
                                      double sample_scale = 2.0);

}  // namespace bregprox
