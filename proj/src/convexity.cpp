#include "bregprox/convexity.hpp"

#include <cmath>
#include <limits>

#include "bregprox/errors.hpp"
#include "bregprox/rng.hpp"

namespace bregprox {

std::string to_string(ConvexityVerdict v) {
  switch (v) {
    case ConvexityVerdict::kNoViolationFound:
      return "no-violation-found";
    case ConvexityVerdict::kViolationFound:
      return "violation-found";
    default:
      return "inconclusive";
  }
}

namespace {

// Rejection-samples a point with Ft(x, .) < 0 inside a geodesic ball.
bool sample_negative_level(const RegularizedBifunction& g, const Point& x,
                           double radius, int budget, Rng& rng, Point* out,
                           double* value) {
  const Manifold& m = g.bregman().manifold();
  for (int attempt = 0; attempt < budget; ++attempt) {
    TangentVector dir = m.zero_tangent(x);
    for (int i = 0; i < m.tangent_dim(); ++i) {
      dir = dir + rng.normal() * m.basis_vector(x, i);
    }
    const double nd = m.norm(x, dir);
    if (nd < 1e-14) continue;
    const Point y = m.exp(x, (radius * rng.uniform() / nd) * dir);
    if (!g.base().domain().contains(y) || !g.bregman().phi().zone().contains(y)) {
      continue;
    }
    const double v = g(x, y);
    if (v < 0.0) {
      *out = y;
      *value = v;
      return true;
    }
  }
  return false;
}

}  // namespace

ConvexityReport test_kx_convexity(const RegularizedBifunction& g, const Point& x,
                                  int pairs, const ConvexityProbeOptions& opts,
                                  std::uint64_t seed) {
  if (pairs <= 0) throw parameter_error("test_kx_convexity: pairs must be positive");
  const Manifold& m = g.bregman().manifold();
  Rng rng(seed);

  ConvexityReport report;
  report.probe_point = x;
  int sampled_pairs = 0;
  for (int p = 0; p < pairs; ++p) {
    Point y1, y2;
    double v1 = 0.0, v2 = 0.0;
    if (!sample_negative_level(g, x, opts.ball_radius, opts.sample_budget_per_pair,
                               rng, &y1, &v1) ||
        !sample_negative_level(g, x, opts.ball_radius, opts.sample_budget_per_pair,
                               rng, &y2, &v2)) {
      continue;
    }
    ++sampled_pairs;
    const Geodesic geo = m.geodesic(y1, y2);
    for (double t : opts.t_grid) {
      const Point mid = geo(t);
      if (!g.base().domain().contains(mid) ||
          !g.bregman().phi().zone().contains(mid)) {
        continue;
      }
      const double vm = g(x, mid);
      if (vm >= 0.0) {
        report.violations.push_back({y1, y2, t, v1, v2, vm});
        break;
      }
    }
    if (opts.stop_at_first_violation && !report.violations.empty()) break;
  }

  report.pairs_tested = sampled_pairs;
  if (!report.violations.empty()) {
    report.verdict = ConvexityVerdict::kViolationFound;
  } else if (sampled_pairs == 0) {
    report.verdict = ConvexityVerdict::kInconclusive;
  } else {
    report.verdict = ConvexityVerdict::kNoViolationFound;
  }
  return report;
}

namespace {

struct TraceInstanceData {
  SpdManifold manifold{2};
  Bifunction bifunction = spd_logdet_bifunction(2);
  Point x{Mat(2, 2, {2.0, 1.0, 1.0, 1.0})};
  Point anchor{Mat(2, 2, {4.0, 2.0, 2.0, 3.0})};
  Point y1{Mat(2, 2, {3.0, 1.0, 1.0, 2.0})};
  Point y2{Mat(2, 2, {5.0, 2.0, 2.0, 1.0})};
};

}  // namespace

TraceInstanceResult reproduce_trace_instance(double lambda) {
  TraceInstanceData data;
  const BregmanDistance d(data.manifold, trace_bregman(2));
  const RegularizedBifunction g = regularize(data.bifunction, d, data.anchor, lambda);

  const Point mid = data.manifold.geodesic(data.y1, data.y2)(0.5);

  TraceInstanceResult out;
  out.report.probe_point = data.x;
  out.values[0] = g(data.x, data.y1);
  out.values[1] = g(data.x, data.y2);
  out.values[2] = g(data.x, mid);

  out.report.pairs_tested = 1;
  if (out.values[0] < 0.0 && out.values[1] < 0.0 && out.values[2] >= 0.0) {
    out.report.verdict = ConvexityVerdict::kViolationFound;
    out.report.violations.push_back(
        {data.y1, data.y2, 0.5, out.values[0], out.values[1], out.values[2]});
  } else {
    out.report.verdict = ConvexityVerdict::kNoViolationFound;
  }
  return out;
}

DetIdentityReport verify_det_identities(int pairs, std::span<const double> t_grid,
                                        std::uint64_t seed) {
  if (pairs <= 0) throw parameter_error("verify_det_identities: pairs must be positive");
  SpdManifold manifold(2);
  const Bifunction logdet = spd_logdet_bifunction(2);
  const FeasibleSet& feasible = logdet.domain();
  Rng rng(seed);

  DetIdentityReport report;
  report.pairs_tested = pairs;

  SpdManifold manifold3(3);
  auto sample3 = [](Rng& r) {
    Mat w(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) w(i, j) = w(j, i) = 0.5 * r.uniform(-1.0, 1.0);
    return Point{mat_exp(w)};
  };

  for (int p = 0; p < pairs; ++p) {
    const Point y1 = feasible.sample(rng, 1.2);
    const Point y2 = feasible.sample(rng, 1.2);
    const Geodesic geo = manifold.geodesic(y1, y2);
    const double d1 = spd_det(y1.coords), d2 = spd_det(y2.coords);
    for (double t : t_grid) {
      const double actual = spd_det(geo(t).coords);
      const double expected = std::pow(d1, 1.0 - t) * std::pow(d2, t);
      const double rel = std::abs(actual - expected) / std::max(1e-300, std::abs(expected));
      report.worst_interpolation_error = std::max(report.worst_interpolation_error, rel);
    }

    // The identity is dimension-free; spot-check it on 3x3 pairs as well.
    const Point z1 = sample3(rng), z2 = sample3(rng);
    const Geodesic geo3 = manifold3.geodesic(z1, z2);
    const double e1 = spd_det(z1.coords), e2 = spd_det(z2.coords);
    for (double t : t_grid) {
      const double actual = spd_det(geo3(t).coords);
      const double expected = std::pow(e1, 1.0 - t) * std::pow(e2, t);
      const double rel = std::abs(actual - expected) / std::max(1e-300, std::abs(expected));
      report.worst_interpolation_error = std::max(report.worst_interpolation_error, rel);
    }

    // Closed form of the determinant regularization on a fresh instance.
    const Point x = feasible.sample(rng, 1.0);
    const Point anchor = feasible.sample(rng, 1.0);
    const double lambda = 0.25 + 2.0 * rng.uniform();
    const BregmanDistance d(manifold, det_bregman(2));
    const RegularizedBifunction g = regularize(logdet, d, anchor, lambda);
    const double pipeline = g(x, y1);
    const double closed = (1.0 + lambda * (spd_det(x.coords) - spd_det(anchor.coords))) *
                          std::log(spd_det(y1.coords) / spd_det(x.coords));
    report.worst_closed_form_error =
        std::max(report.worst_closed_form_error, std::abs(pipeline - closed));
  }

  report.interpolation_ok = report.worst_interpolation_error <= 1e-10;
  report.closed_form_ok = report.worst_closed_form_error <= 1e-9;
  return report;
}

}  // namespace bregprox
