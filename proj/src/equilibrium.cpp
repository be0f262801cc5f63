#include "bregprox/equilibrium.hpp"

#include <cmath>
#include <limits>

#include "bregprox/errors.hpp"

namespace bregprox {

Bifunction::Bifunction(std::string name,
                       std::function<double(const Point&, const Point&)> eval,
                       FeasibleSet domain,
                       std::function<TangentVector(const Point&, const Point&)> grad_y,
                       std::function<bool(const Point&)> is_solution,
                       std::function<Point(const Point&)> project_to_solution)
    : name_(std::move(name)), eval_(std::move(eval)), domain_(std::move(domain)),
      grad_y_(std::move(grad_y)), is_solution_(std::move(is_solution)),
      project_(std::move(project_to_solution)) {
  // Diagonal spot check: F(x, x) = 0 on sampled feasible points.
  Rng rng(0x5eed);
  for (int i = 0; i < 16; ++i) {
    const Point x = domain_.sample(rng, 1.5);
    if (std::abs(eval_(x, x)) > 1e-12) {
      throw contract_error("bifunction '" + name_ + "': F(x, x) != 0 on the diagonal");
    }
  }
}

double Bifunction::operator()(const Point& x, const Point& y) const {
  if (!domain_.contains(x) || !domain_.contains(y)) {
    throw domain_error("bifunction '" + name_ + "': argument outside " + domain_.description);
  }
  return eval_(x, y);
}

TangentVector Bifunction::grad_y(const Point& x, const Point& y) const {
  if (!grad_y_) throw contract_error("bifunction '" + name_ + "': no analytic y-gradient");
  return grad_y_(x, y);
}

bool Bifunction::is_solution(const Point& x) const {
  if (!is_solution_) throw contract_error("bifunction '" + name_ + "': no solution oracle");
  return is_solution_(x);
}

Point Bifunction::project_to_solution(const Point& x) const {
  if (!project_) throw contract_error("bifunction '" + name_ + "': no solution projector");
  return project_(x);
}

RegularizedBifunction::RegularizedBifunction(const Bifunction& base,
                                             const BregmanDistance& d, Point anchor,
                                             double lambda)
    : base_(&base), bregman_(&d), anchor_(std::move(anchor)), lambda_(lambda) {
  if (!(lambda > 0.0)) throw parameter_error("regularize: lambda must be positive");
  if (!base.domain().contains(anchor_)) {
    throw domain_error("regularize: anchor outside the feasible set");
  }
}

double RegularizedBifunction::operator()(const Point& x, const Point& y) const {
  const BregmanDistance& d = *bregman_;
  return (*base_)(x, y) + lambda_ * (d(y, anchor_) - d(y, x) - d(x, anchor_));
}

RegularizedBifunction regularize(const Bifunction& base, const BregmanDistance& d,
                                 const Point& anchor, double lambda) {
  return RegularizedBifunction(base, d, anchor, lambda);
}

namespace {

constexpr double kFeasibleEdge = 1.0 + 1e-9;

FeasibleSet orthant_above_one_set(int n) {
  FeasibleSet c;
  c.description = "C = (1, inf)^" + std::to_string(n);
  c.contains = [n](const Point& x) {
    if (x.coords.rows() != n || x.coords.cols() != 1) return false;
    for (int i = 0; i < n; ++i)
      if (!(x.coords[i] > 1.0)) return false;
    return true;
  };
  c.clamp = [n](const Point& x) {
    Mat cc = x.coords;
    for (int i = 0; i < n; ++i) cc[i] = std::max(cc[i], kFeasibleEdge);
    return Point{cc};
  };
  c.sample = [n](Rng& rng, double scale) {
    Mat cc(n, 1);
    for (int i = 0; i < n; ++i) cc[i] = std::exp(rng.uniform(0.05, std::max(0.1, scale)));
    return Point{cc};
  };
  return c;
}

FeasibleSet spd_whole_set(int n) {
  FeasibleSet c;
  c.description = "C = all SPD " + std::to_string(n) + "x" + std::to_string(n) + " matrices";
  c.contains = [n](const Point& x) {
    if (x.coords.rows() != n || x.coords.cols() != n) return false;
    try {
      require_spd(x.coords);
    } catch (const domain_error&) {
      return false;
    }
    return true;
  };
  c.clamp = [](const Point& x) { return Point{symmetrize(x.coords)}; };
  c.sample = [n](Rng& rng, double scale) {
    Mat w(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) w(i, j) = w(j, i) = scale * 0.4 * rng.normal();
    return Point{mat_exp(w)};
  };
  return c;
}

}  // namespace

Bifunction example1_bifunction() {
  const int n = 3;
  auto defect = [](const Point& x) {
    return std::log(x.coords[0] * x.coords[1] / x.coords[2]);
  };
  auto eval = [defect](const Point& x, const Point& y) {
    const double s = 3.0 * defect(x);
    return s * (std::log(y.coords[0] / x.coords[0]) +
                std::log(y.coords[1] / x.coords[1]) -
                std::log(y.coords[2] / x.coords[2]));
  };
  // Riemannian y-gradient: componentwise y_i^2 * dF/dy_i = 3 ln(x1 x2 / x3) * c_i y_i
  // with c = (1, 1, -1).
  auto grad_y = [defect](const Point& x, const Point& y) {
    const double s = 3.0 * defect(x);
    Mat c(3, 1);
    c[0] = s * y.coords[0];
    c[1] = s * y.coords[1];
    c[2] = -s * y.coords[2];
    return TangentVector{y, c};
  };
  auto is_solution = [defect](const Point& x) { return std::abs(defect(x)) <= 1e-9; };
  // In log coordinates the solution set is the plane u1 + u2 - u3 = 0; project
  // orthogonally there and pull back.
  auto project = [defect](const Point& x) {
    const double s = defect(x) / 3.0;
    Mat c(3, 1);
    c[0] = x.coords[0] * std::exp(-s);
    c[1] = x.coords[1] * std::exp(-s);
    c[2] = x.coords[2] * std::exp(s);
    return Point{c};
  };
  return Bifunction("example1", eval, orthant_above_one_set(n), grad_y, is_solution,
                    project);
}

Bifunction spd_logdet_bifunction(int n) {
  auto eval = [](const Point& x, const Point& y) {
    return std::log(spd_det(y.coords)) - std::log(spd_det(x.coords));
  };
  // grad_y ln det y = y under the affine-invariant metric; independent of x.
  auto grad_y = [](const Point&, const Point& y) {
    return TangentVector{y, y.coords};
  };
  return Bifunction("spd-logdet", eval, spd_whole_set(n), grad_y);
}

Bifunction make_bifunction(const std::string& key) {
  if (key == "example1") return example1_bifunction();
  if (key == "spd-logdet") return spd_logdet_bifunction(2);
  throw config_error("unknown bifunction key: " + key);
}

MonotonicityReport check_monotone(const Bifunction& f, int samples, Rng& rng,
                                  double sample_scale) {
  if (samples <= 0) throw parameter_error("check_monotone: samples must be positive");
  MonotonicityReport report;
  report.samples = samples;
  double max_sum = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const Point x = f.domain().sample(rng, sample_scale);
    const Point y = f.domain().sample(rng, sample_scale);
    const double s = f(x, y) + f(y, x);
    max_sum = std::max(max_sum, s);
    if (s > 1e-10) ++report.violations;
  }
  report.max_sum = max_sum;
  report.monotone_evidence = report.violations == 0;
  return report;
}

CoercivityReport check_c6(const Bifunction& f, const BregmanDistance& d,
                          const Point& anchor, double lambda, int ray_count,
                          std::span<const double> radii, Rng& rng) {
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] > radii[i - 1])) {
      throw parameter_error("check_c6: radii must be increasing");
    }
  }
  const Manifold& m = d.manifold();
  CoercivityReport report;
  double min_tail = std::numeric_limits<double>::infinity();
  bool increasing = true;

  for (int r = 0; r < ray_count; ++r) {
    TangentVector dir = m.zero_tangent(anchor);
    for (int i = 0; i < m.tangent_dim(); ++i) {
      dir = dir + rng.normal() * m.basis_vector(anchor, i);
    }
    const double nd = m.norm(anchor, dir);
    if (nd < 1e-14) continue;
    dir = (1.0 / nd) * dir;

    CoercivityRay ray;
    for (double radius : radii) {
      try {
        const Point y = m.exp(anchor, radius * dir);
        if (!d.phi().zone().contains(y) || !f.domain().contains(y)) {
          ray.escaped_zone = true;  // partial ray, excluded from the aggregates
          break;
        }
        ray.values.push_back(f(anchor, y) + lambda * (d(anchor, y) + d(y, anchor)));
        ray.radii.push_back(radius);
      } catch (const domain_error&) {
        // numerically out of range counts the same as leaving the zone
        ray.escaped_zone = true;
        break;
      }
    }
    if (!ray.escaped_zone && !ray.values.empty()) {
      ++report.full_length_rays;
      min_tail = std::min(min_tail, ray.values.back());
      if (ray.values.size() >= 2) {
        const std::size_t k = ray.values.size();
        if (!(ray.values[k - 1] > ray.values[k - 2])) increasing = false;
      }
    }
    report.rays.push_back(std::move(ray));
  }
  report.min_at_largest_radius = min_tail;
  report.positive_at_largest_radius =
      report.full_length_rays > 0 && min_tail > 0.0;
  report.increasing_tail = report.full_length_rays > 0 && increasing;
  return report;
}

ContinuityReport check_semicontinuity(const Bifunction& f, const Manifold& m,
                                      int samples, Rng& rng, double sample_scale) {
  ContinuityReport report;
  double worst_gap = 0.0;
  double worst_slack = -std::numeric_limits<double>::infinity();

  for (int i = 0; i < samples; ++i) {
    const Point x = f.domain().sample(rng, sample_scale);
    const Point y = f.domain().sample(rng, sample_scale);
    const Point y2 = f.domain().sample(rng, sample_scale);

    // x-continuity along a shrinking geodesic perturbation.
    TangentVector dir = m.zero_tangent(x);
    for (int k = 0; k < m.tangent_dim(); ++k) {
      dir = dir + rng.normal() * m.basis_vector(x, k);
    }
    const double nd = m.norm(x, dir);
    if (nd > 1e-14) {
      dir = (1.0 / nd) * dir;
      const double base = f(x, y);
      const double eps = 1e-7;
      const Point xk = f.domain().clamp(m.exp(x, eps * dir));
      if (f.domain().contains(xk)) {
        worst_gap = std::max(worst_gap, std::abs(f(xk, y) - base));
      }
    }

    // y-convexity by interior sampling of the geodesic.
    const Geodesic g = m.geodesic(y, y2);
    const double fy = f(x, y), fy2 = f(x, y2);
    for (double t : {0.25, 0.5, 0.75}) {
      const Point mid = g(t);
      if (!f.domain().contains(mid)) continue;
      const double slack = f(x, mid) - ((1.0 - t) * fy + t * fy2);
      worst_slack = std::max(worst_slack, slack);
    }
  }
  report.worst_x_continuity_gap = worst_gap;
  report.worst_midpoint_slack = worst_slack;
  report.x_continuous_evidence = worst_gap <= 1e-5;
  report.y_convex_evidence = worst_slack <= 1e-10;
  return report;
}

}  // namespace bregprox
