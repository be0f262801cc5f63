#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bregprox/errors.hpp"
#include "bregprox/manifold.hpp"
#include "bregprox/rng.hpp"

using namespace bregprox;

namespace {

const double kE = std::exp(1.0);

Point random_orthant_point(int n, Rng& rng, double lo = -2.0, double hi = 2.0) {
  Mat c(n, 1);
  for (int i = 0; i < n; ++i) c[i] = std::exp(rng.uniform(lo, hi));
  return {c};
}

Point random_spd_point(int n, Rng& rng, double scale = 1.0) {
  Mat w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) w(i, j) = w(j, i) = scale * rng.uniform(-1.0, 1.0);
  return {mat_exp(w)};
}

TangentVector random_tangent(const Manifold& m, const Point& x, Rng& rng) {
  TangentVector v = m.zero_tangent(x);
  for (int i = 0; i < m.tangent_dim(); ++i) {
    v = v + rng.uniform(-1.0, 1.0) * m.basis_vector(x, i);
  }
  return v;
}

}  // namespace

TEST_CASE("orthant metric examples") {
  PositiveOrthant m(2);
  const Point ones{Mat::col_vector({1.0, 1.0})};
  const TangentVector u{ones, Mat::col_vector({1.0, 0.0})};
  CHECK(m.inner(ones, u, u) == doctest::Approx(1.0));

  const Point x{Mat::col_vector({2.0, 1.0})};
  const TangentVector w{x, Mat::col_vector({2.0, 0.0})};
  CHECK(m.inner(x, w, w) == doctest::Approx(1.0));
}

TEST_CASE("spd metric example at identity") {
  SpdManifold m(2);
  const Point id{Mat::identity(2)};
  const TangentVector u{id, Mat(2, 2, {1.0, 0.0, 0.0, -1.0})};
  CHECK(m.inner(id, u, u) == doctest::Approx(2.0));
}

TEST_CASE("inner rejects mismatched base points") {
  PositiveOrthant m(2);
  const Point x{Mat::col_vector({1.0, 1.0})};
  const Point y{Mat::col_vector({2.0, 1.0})};
  const TangentVector u{x, Mat::col_vector({1.0, 0.0})};
  const TangentVector v{y, Mat::col_vector({1.0, 0.0})};
  CHECK_THROWS_AS(m.inner(x, u, v), contract_error);
}

TEST_CASE("orthant distance examples") {
  PositiveOrthant m(3);
  const Point a{Mat::col_vector({7.0, 3.0, 2.0})};
  CHECK(m.dist(a, a) == doctest::Approx(0.0));

  const Point b{Mat::col_vector({kE, 1.0, 1.0})};
  const Point ones{Mat::col_vector({1.0, 1.0, 1.0})};
  CHECK(m.dist(b, ones) == doctest::Approx(1.0).epsilon(1e-12));

  // sqrt(ln^2 20 + ln^2 5 + ln^2 3), frozen from an independent evaluation
  const Point c{Mat::col_vector({20.0, 5.0, 3.0})};
  CHECK(m.dist(c, ones) == doctest::Approx(3.5737447040332612).epsilon(1e-10));
}

TEST_CASE("spd distance example") {
  SpdManifold m(2);
  const Point x{Mat(2, 2, {kE * kE, 0.0, 0.0, 1.0})};
  const Point id{Mat::identity(2)};
  CHECK(m.dist(x, id) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("distance rejects non-positive and non-SPD input") {
  PositiveOrthant m(2);
  Point bad{Mat::col_vector({1.0, -1.0})};
  const Point ok{Mat::col_vector({1.0, 1.0})};
  CHECK_THROWS_AS(m.dist(bad, ok), domain_error);

  SpdManifold s(2);
  Point notspd{Mat(2, 2, {1.0, 2.0, 2.0, 1.0})};
  const Point id{Mat::identity(2)};
  CHECK_THROWS_AS(s.dist(notspd, id), domain_error);
}

TEST_CASE("exp examples") {
  PositiveOrthant m(2);
  const Point x{Mat::col_vector({1.0, 1.0})};
  CHECK(m.exp(x, m.zero_tangent(x)) == x);

  const TangentVector v{x, Mat::col_vector({1.0, 0.0})};
  const Point y = m.exp(x, v);
  CHECK(y.coords[0] == doctest::Approx(kE).epsilon(1e-14));
  CHECK(y.coords[1] == doctest::Approx(1.0));

  SpdManifold s(2);
  const Point id{Mat::identity(2)};
  const TangentVector w{id, Mat(2, 2, {1.0, 0.0, 0.0, 0.0})};
  const Point z = s.exp(id, w);
  CHECK(z.coords(0, 0) == doctest::Approx(kE).epsilon(1e-12));
  CHECK(z.coords(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("log examples") {
  PositiveOrthant m(2);
  const Point x{Mat::col_vector({1.0, 1.0})};
  const Point y{Mat::col_vector({kE, 1.0})};
  const TangentVector v = m.log(x, y);
  CHECK(v.components[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(v.components[1] == doctest::Approx(0.0));
  CHECK(max_abs(m.log(x, x).components) <= 1e-15);

  SpdManifold s(2);
  const Point id{Mat::identity(2)};
  const Point z{Mat(2, 2, {kE, 0.0, 0.0, 1.0})};
  const TangentVector w = s.log(id, z);
  CHECK(w.components(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(w.components(0, 1)) <= 1e-13);
  CHECK(std::abs(w.components(1, 1)) <= 1e-13);
}

TEST_CASE("exp/log round trip and distance consistency, 200 random pairs per manifold") {
  PositiveOrthant orthant(3);
  SpdManifold spd(2);
  Rng rng(101);

  for (int trial = 0; trial < 200; ++trial) {
    const Point x = random_orthant_point(3, rng);
    const Point y = random_orthant_point(3, rng);
    const Point back = orthant.exp(x, orthant.log(x, y));
    CHECK(orthant.dist(back, y) <= 1e-9 * (1.0 + orthant.dist(x, y)));
    const TangentVector l = orthant.log(x, y);
    const double d = orthant.dist(x, y);
    CHECK(orthant.inner(x, l, l) == doctest::Approx(d * d).epsilon(1e-9));
  }
  for (int trial = 0; trial < 200; ++trial) {
    const Point x = random_spd_point(2, rng);
    const Point y = random_spd_point(2, rng);
    const Point back = spd.exp(x, spd.log(x, y));
    CHECK(spd.dist(back, y) <= 1e-9 * (1.0 + spd.dist(x, y)));
    const TangentVector l = spd.log(x, y);
    const double d = spd.dist(x, y);
    CHECK(spd.inner(x, l, l) == doctest::Approx(d * d).epsilon(1e-9));
  }
}

TEST_CASE("exp moves by the tangent norm") {
  PositiveOrthant orthant(3);
  SpdManifold spd(2);
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const Point x = random_orthant_point(3, rng);
    const TangentVector v = random_tangent(orthant, x, rng);
    CHECK(orthant.dist(x, orthant.exp(x, v)) ==
          doctest::Approx(orthant.norm(x, v)).epsilon(1e-8));

    const Point z = random_spd_point(2, rng);
    const TangentVector w = random_tangent(spd, z, rng);
    CHECK(spd.dist(z, spd.exp(z, w)) == doctest::Approx(spd.norm(z, w)).epsilon(1e-8));
  }
}

TEST_CASE("geodesic triangle inequalities on 500 random triples") {
  PositiveOrthant orthant(3);
  SpdManifold spd(2);
  Rng rng(23);

  auto check_triple = [](const Manifold& m, const Point& x, const Point& y, const Point& z,
                         bool expect_equality_in_i) {
    const double dxy = m.dist(x, y), dyz = m.dist(y, z), dzx = m.dist(z, x);
    const double cross_y = m.inner(y, m.log(y, x), m.log(y, z));
    const double lhs1 = dxy * dxy + dyz * dyz - 2.0 * cross_y;
    CHECK(lhs1 <= dzx * dzx + 1e-9);
    if (expect_equality_in_i) {
      CHECK(lhs1 == doctest::Approx(dzx * dzx).epsilon(1e-9));
    }
    const double rhs2 = m.inner(x, m.log(x, z), m.log(x, y)) +
                        m.inner(y, m.log(y, z), m.log(y, x));
    CHECK(dxy * dxy <= rhs2 + 1e-9);
  };

  for (int trial = 0; trial < 500; ++trial) {
    check_triple(orthant, random_orthant_point(3, rng), random_orthant_point(3, rng),
                 random_orthant_point(3, rng), true);
  }
  for (int trial = 0; trial < 500; ++trial) {
    check_triple(spd, random_spd_point(2, rng), random_spd_point(2, rng),
                 random_spd_point(2, rng), false);
  }
}

TEST_CASE("gradient of half squared distance is minus log, by finite differences") {
  PositiveOrthant orthant(3);
  SpdManifold spd(2);
  Rng rng(31);
  const double h = 1e-5;

  auto check = [&](const Manifold& m, const Point& x, const Point& y, Rng& r) {
    const TangentVector g = -1.0 * m.log(x, y);  // claimed gradient at x
    TangentVector dir = random_tangent(m, x, r);
    const double nd = m.norm(x, dir);
    if (nd < 1e-12) return;
    dir = (1.0 / nd) * dir;
    const Point xp = m.exp(x, h * dir);
    const Point xm = m.exp(x, -h * dir);
    auto half_d2 = [&](const Point& p) {
      const double d = m.dist(p, y);
      return 0.5 * d * d;
    };
    const double fd = (half_d2(xp) - half_d2(xm)) / (2.0 * h);
    CHECK(fd == doctest::Approx(m.inner(x, g, dir)).epsilon(1e-5));
  };

  for (int trial = 0; trial < 50; ++trial) {
    check(orthant, random_orthant_point(3, rng), random_orthant_point(3, rng), rng);
    check(spd, random_spd_point(2, rng), random_spd_point(2, rng), rng);
  }
}

TEST_CASE("parallel transport is an isometry and fixes the identity case") {
  PositiveOrthant orthant(3);
  SpdManifold spd(2);
  Rng rng(37);

  auto check = [&](const Manifold& m, const Point& x, const Point& y, Rng& r) {
    const TangentVector v = random_tangent(m, x, r);
    const TangentVector w = random_tangent(m, x, r);
    const TangentVector pv = m.transport(x, y, v);
    const TangentVector pw = m.transport(x, y, w);
    CHECK(m.inner(y, pv, pw) == doctest::Approx(m.inner(x, v, w)).epsilon(1e-10));
    const TangentVector samev = m.transport(x, x, v);
    CHECK(max_abs(samev.components - v.components) <= 1e-12);
  };

  for (int trial = 0; trial < 100; ++trial) {
    check(orthant, random_orthant_point(3, rng), random_orthant_point(3, rng), rng);
    check(spd, random_spd_point(2, rng), random_spd_point(2, rng), rng);
  }
}

TEST_CASE("orthant transport example") {
  PositiveOrthant m(2);
  const Point x{Mat::col_vector({1.0, 1.0})};
  const Point y{Mat::col_vector({2.0, 1.0})};
  const TangentVector v{x, Mat::col_vector({1.0, 1.0})};
  const TangentVector pv = m.transport(x, y, v);
  CHECK(pv.components[0] == doctest::Approx(2.0));
  CHECK(pv.components[1] == doctest::Approx(1.0));
}

TEST_CASE("transport pairing identity on random pairs") {
  // <v, -log_y x>_y = <P_{x<-y} v, log_x y>_x
  PositiveOrthant orthant(3);
  SpdManifold spd(2);
  Rng rng(41);

  auto check = [&](const Manifold& m, const Point& x, const Point& y, Rng& r) {
    const TangentVector v = random_tangent(m, y, r);
    const double lhs = m.inner(y, v, -1.0 * m.log(y, x));
    const double rhs = m.inner(x, m.transport(y, x, v), m.log(x, y));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  };

  for (int trial = 0; trial < 100; ++trial) {
    check(orthant, random_orthant_point(3, rng), random_orthant_point(3, rng), rng);
    check(spd, random_spd_point(2, rng), random_spd_point(2, rng), rng);
  }
}

TEST_CASE("geodesic endpoints, constant speed, and interpolation") {
  PositiveOrthant orthant(3);
  SpdManifold spd(2);
  Rng rng(43);

  auto check = [&](const Manifold& m, const Point& x, const Point& y, Rng& r) {
    const Geodesic g = m.geodesic(x, y);
    CHECK(m.dist(g(0.0), x) <= 1e-10);
    CHECK(m.dist(g(1.0), y) <= 1e-10 * (1.0 + m.dist(x, y)));
    const double d = m.dist(x, y);
    for (int k = 0; k < 3; ++k) {
      const double s = r.uniform(), t = r.uniform();
      CHECK(m.dist(g(s), g(t)) == doctest::Approx(std::abs(s - t) * d).epsilon(1e-8));
    }
  };

  for (int trial = 0; trial < 30; ++trial) {
    check(orthant, random_orthant_point(3, rng), random_orthant_point(3, rng), rng);
    check(spd, random_spd_point(2, rng), random_spd_point(2, rng), rng);
  }
}

TEST_CASE("orthant geodesic midpoint in log coordinates") {
  PositiveOrthant m(3);
  const Point x{Mat::col_vector({1.0, 1.0, 1.0})};
  const Point y{Mat::col_vector({kE * kE, 1.0, 1.0})};
  const Point mid = m.geodesic(x, y)(0.5);
  CHECK(mid.coords[0] == doctest::Approx(kE).epsilon(1e-12));
  CHECK(mid.coords[1] == doctest::Approx(1.0));
}

TEST_CASE("spd geodesic determinant interpolation") {
  SpdManifold m(2);
  Rng rng(47);
  for (int trial = 0; trial < 50; ++trial) {
    const Point x = random_spd_point(2, rng);
    const Point y = random_spd_point(2, rng);
    const Geodesic g = m.geodesic(x, y);
    const double t = rng.uniform();
    const double expected = std::pow(spd_det(x.coords), 1.0 - t) * std::pow(spd_det(y.coords), t);
    CHECK(spd_det(g(t).coords) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("spd geometry holds in dimension three as well") {
  SpdManifold m(3);
  Rng rng(61);
  for (int trial = 0; trial < 40; ++trial) {
    const Point x = random_spd_point(3, rng, 0.8);
    const Point y = random_spd_point(3, rng, 0.8);
    const Point back = m.exp(x, m.log(x, y));
    CHECK(m.dist(back, y) <= 1e-9 * (1.0 + m.dist(x, y)));
    const TangentVector v = random_tangent(m, x, rng);
    const TangentVector w = random_tangent(m, x, rng);
    const TangentVector pv = m.transport(x, y, v);
    const TangentVector pw = m.transport(x, y, w);
    CHECK(m.inner(y, pv, pw) == doctest::Approx(m.inner(x, v, w)).epsilon(1e-10));
  }
}

TEST_CASE("orthant distance is invariant under componentwise scaling") {
  PositiveOrthant m(3);
  Rng rng(53);
  for (int trial = 0; trial < 100; ++trial) {
    const Point x = random_orthant_point(3, rng);
    const Point y = random_orthant_point(3, rng);
    Mat sx(3, 1), sy(3, 1);
    for (int i = 0; i < 3; ++i) {
      const double s = std::exp(rng.uniform(-1.0, 1.0));
      sx[i] = x.coords[i] * s;
      sy[i] = y.coords[i] * s;
    }
    CHECK(m.dist({sx}, {sy}) == doctest::Approx(m.dist(x, y)).epsilon(1e-10));
  }
}

TEST_CASE("spd tangent symmetry is enforced") {
  SpdManifold m(2);
  const Point id{Mat::identity(2)};
  TangentVector bad{id, Mat(2, 2, {0.0, 1.0, -1.0, 0.0})};
  CHECK_THROWS_AS(m.validate_tangent(bad), domain_error);
}

TEST_CASE("orthonormal basis really is orthonormal") {
  PositiveOrthant orthant(3);
  SpdManifold spd(3);
  Rng rng(59);
  const Point xo = random_orthant_point(3, rng);
  const Point xs = random_spd_point(3, rng);
  for (const auto* m : {static_cast<const Manifold*>(&orthant), static_cast<const Manifold*>(&spd)}) {
    const Point& x = (m == static_cast<const Manifold*>(&orthant)) ? xo : xs;
    for (int i = 0; i < m->tangent_dim(); ++i) {
      for (int j = 0; j < m->tangent_dim(); ++j) {
        const double ip = m->inner(x, m->basis_vector(x, i), m->basis_vector(x, j));
        CHECK(ip == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
      }
    }
  }
}
