#include "bregprox/manifold.hpp"

#include <cmath>

#include "bregprox/errors.hpp"

namespace bregprox {

bool operator==(const Point& a, const Point& b) { return a.coords == b.coords; }

namespace {

void require_same_base(const TangentVector& a, const TangentVector& b, const char* op) {
  if (!(a.base == b.base)) {
    throw contract_error(std::string(op) + ": tangent vectors have different base points");
  }
}

}  // namespace

TangentVector operator+(const TangentVector& a, const TangentVector& b) {
  require_same_base(a, b, "tangent operator+");
  return {a.base, a.components + b.components};
}

TangentVector operator-(const TangentVector& a, const TangentVector& b) {
  require_same_base(a, b, "tangent operator-");
  return {a.base, a.components - b.components};
}

TangentVector operator*(double s, const TangentVector& a) {
  return {a.base, s * a.components};
}

Geodesic::Geodesic(const Manifold& m, Point from, Point to)
    : manifold_(&m), from_(std::move(from)), to_(std::move(to)),
      direction_(m.log(from_, to_)) {}

Point Geodesic::operator()(double t) const {
  return manifold_->exp(from_, t * direction_);
}

void Manifold::validate_tangent(const TangentVector& v) const {
  validate_point(v.base);
  validate_tangent_components(v);
}

Geodesic Manifold::geodesic(const Point& x, const Point& y) const {
  return Geodesic(*this, x, y);
}

double Manifold::norm(const Point& x, const TangentVector& v) const {
  return std::sqrt(inner(x, v, v));
}

TangentVector Manifold::zero_tangent(const Point& x) const {
  return {x, Mat(x.coords.rows(), x.coords.cols())};
}

void Manifold::require_base(const Point& x, const TangentVector& v, const char* op) const {
  if (!(v.base == x)) {
    throw contract_error(std::string(op) + ": tangent base point does not match argument");
  }
}

// ---------------------------------------------------------------------------
// Positive orthant

PositiveOrthant::PositiveOrthant(int n) : n_(n) {
  if (n <= 0) throw parameter_error("PositiveOrthant: dimension must be positive");
}

void PositiveOrthant::validate_point(const Point& x) const {
  if (x.coords.cols() != 1 || x.coords.rows() != n_) {
    throw domain_error("orthant point: expected an n x 1 coordinate vector");
  }
  for (int i = 0; i < n_; ++i) {
    if (!(x.coords[i] > 0.0) || !std::isfinite(x.coords[i])) {
      throw domain_error("orthant point: coordinates must be strictly positive");
    }
  }
}

void PositiveOrthant::validate_tangent_components(const TangentVector& v) const {
  if (v.components.cols() != 1 || v.components.rows() != n_) {
    throw domain_error("orthant tangent: expected an n x 1 component vector");
  }
}

double PositiveOrthant::inner(const Point& x, const TangentVector& u,
                              const TangentVector& v) const {
  validate_point(x);
  require_base(x, u, "inner");
  require_base(x, v, "inner");
  double s = 0.0;
  for (int i = 0; i < n_; ++i) {
    s += u.components[i] * v.components[i] / (x.coords[i] * x.coords[i]);
  }
  return s;
}

double PositiveOrthant::dist(const Point& x, const Point& y) const {
  validate_point(x);
  validate_point(y);
  double s = 0.0;
  for (int i = 0; i < n_; ++i) {
    const double r = std::log(x.coords[i] / y.coords[i]);
    s += r * r;
  }
  return std::sqrt(s);
}

Point PositiveOrthant::exp(const Point& x, const TangentVector& v) const {
  validate_point(x);
  require_base(x, v, "exp");
  Mat c(n_, 1);
  for (int i = 0; i < n_; ++i) {
    c[i] = x.coords[i] * std::exp(v.components[i] / x.coords[i]);
  }
  return {c};
}

TangentVector PositiveOrthant::log(const Point& x, const Point& y) const {
  validate_point(x);
  validate_point(y);
  Mat c(n_, 1);
  for (int i = 0; i < n_; ++i) {
    c[i] = x.coords[i] * std::log(y.coords[i] / x.coords[i]);
  }
  return {x, c};
}

TangentVector PositiveOrthant::transport(const Point& x, const Point& y,
                                         const TangentVector& v) const {
  validate_point(x);
  validate_point(y);
  require_base(x, v, "transport");
  Mat c(n_, 1);
  for (int i = 0; i < n_; ++i) {
    c[i] = (y.coords[i] / x.coords[i]) * v.components[i];
  }
  return {y, c};
}

TangentVector PositiveOrthant::basis_vector(const Point& x, int i) const {
  validate_point(x);
  if (i < 0 || i >= n_) throw contract_error("basis_vector: index out of range");
  Mat c(n_, 1);
  c[i] = x.coords[i];  // unit length under G(x) = diag(x_i^{-2})
  return {x, c};
}

Mat PositiveOrthant::to_chart(const Point& x) {
  Mat u(x.coords.rows(), 1);
  for (int i = 0; i < x.coords.rows(); ++i) u[i] = std::log(x.coords[i]);
  return u;
}

Point PositiveOrthant::from_chart(const Mat& u) {
  Mat c(u.rows(), 1);
  for (int i = 0; i < u.rows(); ++i) c[i] = std::exp(u[i]);
  return {c};
}

Mat PositiveOrthant::tangent_to_chart(const TangentVector& v) {
  Mat w(v.components.rows(), 1);
  for (int i = 0; i < v.components.rows(); ++i) {
    w[i] = v.components[i] / v.base.coords[i];
  }
  return w;
}

// ---------------------------------------------------------------------------
// SPD matrices, affine-invariant metric

SpdManifold::SpdManifold(int n) : n_(n) {
  if (n <= 0) throw parameter_error("SpdManifold: dimension must be positive");
}

void SpdManifold::validate_point(const Point& x) const {
  if (x.coords.rows() != n_ || x.coords.cols() != n_) {
    throw domain_error("spd point: expected an n x n matrix");
  }
  require_spd(x.coords);
}

void SpdManifold::validate_tangent_components(const TangentVector& v) const {
  if (v.components.rows() != n_ || v.components.cols() != n_) {
    throw domain_error("spd tangent: expected an n x n matrix");
  }
  if (!is_symmetric(v.components, 1e-12)) {
    throw domain_error("spd tangent: components must be symmetric to 1e-12");
  }
}

double SpdManifold::inner(const Point& x, const TangentVector& u,
                          const TangentVector& v) const {
  validate_point(x);
  require_base(x, u, "inner");
  require_base(x, v, "inner");
  const Mat xi = spd_inverse(x.coords);
  return trace(xi * u.components * xi * v.components);
}

double SpdManifold::dist(const Point& x, const Point& y) const {
  validate_point(x);
  validate_point(y);
  const Mat xis = mat_inv_sqrt(x.coords);
  return frobenius_norm(mat_log(symmetrize(xis * y.coords * xis)));
}

Point SpdManifold::exp(const Point& x, const TangentVector& v) const {
  validate_point(x);
  require_base(x, v, "exp");
  const Mat xs = mat_sqrt(x.coords);
  const Mat xis = mat_inv_sqrt(x.coords);
  const Mat inner_term = symmetrize(xis * v.components * xis);
  return {symmetrize(xs * mat_exp(inner_term) * xs)};
}

TangentVector SpdManifold::log(const Point& x, const Point& y) const {
  validate_point(x);
  validate_point(y);
  const Mat xs = mat_sqrt(x.coords);
  const Mat xis = mat_inv_sqrt(x.coords);
  const Mat inner_term = symmetrize(xis * y.coords * xis);
  return {x, symmetrize(xs * mat_log(inner_term) * xs)};
}

TangentVector SpdManifold::transport(const Point& x, const Point& y,
                                     const TangentVector& v) const {
  validate_point(x);
  validate_point(y);
  require_base(x, v, "transport");
  // E = y^{1/2} (y^{-1/2} x y^{-1/2})^{-1/2} y^{-1/2} is the principal square
  // root of y x^{-1}; P_{y<-x}(v) = E v E^T.
  const Mat ys = mat_sqrt(y.coords);
  const Mat yis = mat_inv_sqrt(y.coords);
  const Mat a = symmetrize(yis * x.coords * yis);
  const Mat e = ys * mat_inv_sqrt(a) * yis;
  return {y, symmetrize(e * v.components * transpose(e))};
}

TangentVector SpdManifold::basis_vector(const Point& x, int i) const {
  validate_point(x);
  if (i < 0 || i >= tangent_dim()) throw contract_error("basis_vector: index out of range");
  // Enumerate the orthonormal symmetric basis at the identity (diagonal
  // units, then off-diagonal pairs scaled by 1/sqrt(2)) and push it to x by
  // the congruence v -> x^{1/2} v x^{1/2}, an isometry onto T_x.
  Mat s(n_, n_);
  if (i < n_) {
    s(i, i) = 1.0;
  } else {
    int k = i - n_;
    int p = 0;
    while (k >= n_ - 1 - p) {
      k -= n_ - 1 - p;
      ++p;
    }
    const int q = p + 1 + k;
    const double r = 1.0 / std::sqrt(2.0);
    s(p, q) = r;
    s(q, p) = r;
  }
  const Mat xs = mat_sqrt(x.coords);
  return {x, symmetrize(xs * s * xs)};
}

}  // namespace bregprox
