#include "bregprox/bregman.hpp"

#include <cmath>

#include "bregprox/errors.hpp"

namespace bregprox {

Zone whole_manifold_zone(const Manifold& m) {
  return Zone{[&m](const Point& x) {
                try {
                  m.validate_point(x);
                } catch (const domain_error&) {
                  return false;
                }
                return true;
              },
              "entire manifold"};
}

double BregmanDistance::operator()(const Point& x, const Point& y) const {
  if (!phi_.zone().contains(x) || !phi_.zone().contains(y)) {
    throw domain_error("bregman distance: argument outside zone (" +
                       phi_.zone().description + ")");
  }
  const TangentVector log_yx = manifold_->log(y, x);
  return phi_.value(x) - phi_.value(y) - manifold_->inner(y, phi_.grad(y), log_yx);
}

BregmanFunction org_bregman(const Manifold& m, const Point& x0) {
  m.validate_point(x0);
  auto value = [&m, x0](const Point& x) {
    const double d = m.dist(x, x0);
    return 0.5 * d * d;
  };
  auto grad = [&m, x0](const Point& x) { return -1.0 * m.log(x, x0); };
  return BregmanFunction("org", value, grad, whole_manifold_zone(m));
}

BregmanFunction breg1_bregman(int n) {
  auto value = [n](const Point& x) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double xi = x.coords[i];
      if (!(xi > 0.0)) throw domain_error("breg1: coordinates must be positive");
      const double l = std::log(xi);
      s += l * l + xi * xi;
    }
    return s;
  };
  // Euclidean gradient 2 ln(x)/x + 2x rescaled by G(x)^{-1} = diag(x_i^2).
  auto grad = [n](const Point& x) {
    Mat c(n, 1);
    for (int i = 0; i < n; ++i) {
      const double xi = x.coords[i];
      if (!(xi > 0.0)) throw domain_error("breg1: coordinates must be positive");
      c[i] = 2.0 * xi * std::log(xi) + 2.0 * xi * xi * xi;
    }
    return TangentVector{x, c};
  };
  Zone zone{[n](const Point& x) {
              if (x.coords.rows() != n || x.coords.cols() != 1) return false;
              for (int i = 0; i < n; ++i)
                if (!(x.coords[i] > 0.0)) return false;
              return true;
            },
            "all coordinates > 0"};
  return BregmanFunction("breg1", value, grad, zone);
}

BregmanFunction breg2_bregman(int n) {
  constexpr double kEdge = 1.0 + 1e-12;
  auto check = [n](const Point& x) {
    for (int i = 0; i < n; ++i) {
      if (!(x.coords[i] > kEdge)) {
        throw domain_error("breg2: coordinates must exceed 1");
      }
    }
  };
  auto value = [n, check](const Point& x) {
    check(x);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double l = std::log(x.coords[i]);
      s += l * std::log(l);
    }
    return s;
  };
  auto grad = [n, check](const Point& x) {
    check(x);
    Mat c(n, 1);
    for (int i = 0; i < n; ++i) {
      const double xi = x.coords[i];
      c[i] = xi * (1.0 + std::log(std::log(xi)));
    }
    return TangentVector{x, c};
  };
  Zone zone{[n](const Point& x) {
              if (x.coords.rows() != n || x.coords.cols() != 1) return false;
              for (int i = 0; i < n; ++i)
                if (!(x.coords[i] > kEdge)) return false;
              return true;
            },
            "all coordinates > 1"};
  return BregmanFunction("breg2", value, grad, zone);
}

BregmanFunction det_bregman(int n) {
  auto value = [](const Point& x) { return spd_det(x.coords); };
  auto grad = [](const Point& x) {
    return TangentVector{x, spd_det(x.coords) * x.coords};
  };
  Zone zone{[n](const Point& x) {
              if (x.coords.rows() != n || x.coords.cols() != n) return false;
              try {
                require_spd(x.coords);
              } catch (const domain_error&) {
                return false;
              }
              return true;
            },
            "symmetric positive definite matrices"};
  return BregmanFunction("spd-det", value, grad, zone);
}

BregmanFunction trace_bregman(int n) {
  auto value = [](const Point& x) { return trace(x.coords); };
  auto grad = [](const Point& x) {
    return TangentVector{x, symmetrize(x.coords * x.coords)};
  };
  Zone zone{[n](const Point& x) {
              if (x.coords.rows() != n || x.coords.cols() != n) return false;
              try {
                require_spd(x.coords);
              } catch (const domain_error&) {
                return false;
              }
              return true;
            },
            "symmetric positive definite matrices"};
  return BregmanFunction("spd-trace", value, grad, zone);
}

BregmanFunction make_bregman(const std::string& key, const Manifold& m,
                             const std::optional<Point>& x0) {
  if (key == "org") {
    if (!x0) throw config_error("bregman 'org' requires an anchor point");
    return org_bregman(m, *x0);
  }
  if (key == "breg1") return breg1_bregman(m.tangent_dim());
  if (key == "breg2") return breg2_bregman(m.tangent_dim());
  if (key == "spd-det") {
    const auto* spd = dynamic_cast<const SpdManifold*>(&m);
    if (!spd) throw config_error("bregman 'spd-det' requires the spd manifold");
    return det_bregman(spd->matrix_dim());
  }
  if (key == "spd-trace") {
    const auto* spd = dynamic_cast<const SpdManifold*>(&m);
    if (!spd) throw config_error("bregman 'spd-trace' requires the spd manifold");
    return trace_bregman(spd->matrix_dim());
  }
  throw config_error("unknown bregman key: " + key);
}

namespace {

TangentVector random_unit_direction(const Manifold& m, const Point& x, Rng& rng) {
  TangentVector v = m.zero_tangent(x);
  for (int i = 0; i < m.tangent_dim(); ++i) {
    v = v + rng.normal() * m.basis_vector(x, i);
  }
  const double nv = m.norm(x, v);
  if (nv <= 1e-14) return m.basis_vector(x, 0);
  return (1.0 / nv) * v;
}

}  // namespace

LevelSetReport check_level_set_bounded(const BregmanDistance& d, const Point& x,
                                       double alpha, std::span<const double> radii,
                                       int ray_count, Rng& rng) {
  if (alpha < 0.0) throw parameter_error("check_level_set_bounded: alpha must be >= 0");
  const Manifold& m = d.manifold();
  LevelSetReport report;
  report.alpha = alpha;
  report.bounded_evidence = true;

  for (int r = 0; r < ray_count; ++r) {
    const TangentVector dir = random_unit_direction(m, x, rng);
    RayProbe probe;
    bool in_set_somewhere = false;
    double last_in_radius = 0.0;
    bool tail_exceeds = false;
    for (double radius : radii) {
      try {
        Point y = m.exp(x, radius * dir);
        if (!d.phi().zone().contains(y)) {
          probe.escaped_zone = true;
          break;
        }
        const double div = d(x, y);
        probe.radii.push_back(radius);
        probe.divergences.push_back(div);
        if (div <= alpha) {
          in_set_somewhere = true;
          last_in_radius = radius;
          tail_exceeds = false;
        } else {
          tail_exceeds = true;
        }
      } catch (const domain_error&) {
        probe.escaped_zone = true;  // numerically out of range, ray truncated
        break;
      }
    }
    probe.exceeds_alpha_beyond_some_radius = tail_exceeds;
    if (in_set_somewhere) {
      report.largest_radius_in_set = std::max(report.largest_radius_in_set, last_in_radius);
    }
    if (!tail_exceeds && !probe.escaped_zone) report.bounded_evidence = false;
    report.rays.push_back(std::move(probe));
  }
  return report;
}

SequenceLimitReport check_b2_b3(const BregmanDistance& d,
                                const std::vector<Point>& sequence,
                                const Point& limit,
                                const std::vector<Point>* paired,
                                double tolerance) {
  SequenceLimitReport report;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const double div = d(limit, sequence[i]);
    report.divergences.push_back(div);
    if (report.first_below_tolerance < 0 && div < tolerance) {
      report.first_below_tolerance = static_cast<int>(i);
    }
  }
  if (paired) {
    const Manifold& m = d.manifold();
    for (const Point& z : *paired) {
      report.paired_distances.push_back(m.dist(z, limit));
    }
    report.paired_converges =
        !report.paired_distances.empty() &&
        report.paired_distances.back() < std::sqrt(tolerance);
  }
  return report;
}

}  // namespace bregprox
