#pragma once

#include <memory>
#include <string>

#include "bregprox/linalg.hpp"

namespace bregprox {

// A location on a manifold. The positive orthant stores an n x 1 vector of
// strictly positive coordinates; the SPD manifold stores an n x n symmetric
// positive definite matrix. Coordinates are interpreted by the owning
// Manifold, which validates them at its API boundaries.
struct Point {
  Mat coords;
};

bool operator==(const Point& a, const Point& b);

// A vector in the tangent space at `base`. Components use the same layout
// as the point coordinates (SPD tangents are symmetric matrices).
struct TangentVector {
  Point base;
  Mat components;
};

TangentVector operator+(const TangentVector& a, const TangentVector& b);
TangentVector operator-(const TangentVector& a, const TangentVector& b);
TangentVector operator*(double s, const TangentVector& a);

class Manifold;

// Unique geodesic from `from` to `to`, parameterized over [0, 1] as
// gamma(t) = exp(from, t * log(from, to)).
class Geodesic {
 public:
  Geodesic(const Manifold& m, Point from, Point to);
  Point operator()(double t) const;
  const Point& from() const { return from_; }
  const Point& to() const { return to_; }

 private:
  const Manifold* manifold_;
  Point from_;
  Point to_;
  TangentVector direction_;
};

// Geometry contract for a Hadamard manifold: metric, distance, exponential
// and inverse exponential maps, parallel transport, geodesics, and an
// orthonormal tangent basis for finite-difference probes.
class Manifold {
 public:
  virtual ~Manifold() = default;

  virtual const std::string& name() const = 0;
  virtual int tangent_dim() const = 0;

  // Throws domain_error when the coordinates violate the point invariants.
  virtual void validate_point(const Point& x) const = 0;
  void validate_tangent(const TangentVector& v) const;

  virtual double inner(const Point& x, const TangentVector& u,
                       const TangentVector& v) const = 0;
  virtual double dist(const Point& x, const Point& y) const = 0;
  virtual Point exp(const Point& x, const TangentVector& v) const = 0;
  virtual TangentVector log(const Point& x, const Point& y) const = 0;
  virtual TangentVector transport(const Point& x, const Point& y,
                                  const TangentVector& v) const = 0;

  Geodesic geodesic(const Point& x, const Point& y) const;

  double norm(const Point& x, const TangentVector& v) const;
  TangentVector zero_tangent(const Point& x) const;

  // i-th element of an orthonormal basis of the tangent space at x.
  virtual TangentVector basis_vector(const Point& x, int i) const = 0;

 protected:
  void require_base(const Point& x, const TangentVector& v, const char* op) const;
  virtual void validate_tangent_components(const TangentVector& v) const = 0;
};

// R^n_{++} with metric G(x) = diag(x_i^{-2}). The coordinate map u = ln x is
// a global isometry onto Euclidean R^n, so the sectional curvature is zero;
// closed forms below are the pullbacks of straight-line geometry.
class PositiveOrthant final : public Manifold {
 public:
  explicit PositiveOrthant(int n);

  const std::string& name() const override { return name_; }
  int tangent_dim() const override { return n_; }
  int ambient_dim() const { return n_; }

  void validate_point(const Point& x) const override;
  double inner(const Point& x, const TangentVector& u,
               const TangentVector& v) const override;
  double dist(const Point& x, const Point& y) const override;
  Point exp(const Point& x, const TangentVector& v) const override;
  TangentVector log(const Point& x, const Point& y) const override;
  TangentVector transport(const Point& x, const Point& y,
                          const TangentVector& v) const override;
  TangentVector basis_vector(const Point& x, int i) const override;

  // Chart helpers for the log-coordinate isometry.
  static Mat to_chart(const Point& x);               // u_i = ln x_i
  static Point from_chart(const Mat& u);             // x_i = e^{u_i}
  static Mat tangent_to_chart(const TangentVector& v);  // w_i = v_i / x_i

 private:
  void validate_tangent_components(const TangentVector& v) const override;
  int n_;
  std::string name_ = "orthant";
};

// Symmetric positive definite matrices with the affine-invariant metric
// <u, v>_x = tr(x^{-1} u x^{-1} v).
class SpdManifold final : public Manifold {
 public:
  explicit SpdManifold(int n);

  const std::string& name() const override { return name_; }
  int tangent_dim() const override { return n_ * (n_ + 1) / 2; }
  int matrix_dim() const { return n_; }

  void validate_point(const Point& x) const override;
  double inner(const Point& x, const TangentVector& u,
               const TangentVector& v) const override;
  double dist(const Point& x, const Point& y) const override;
  Point exp(const Point& x, const TangentVector& v) const override;
  TangentVector log(const Point& x, const Point& y) const override;
  TangentVector transport(const Point& x, const Point& y,
                          const TangentVector& v) const override;
  TangentVector basis_vector(const Point& x, int i) const override;

 private:
  void validate_tangent_components(const TangentVector& v) const override;
  int n_;
  std::string name_ = "spd";
};

}  // namespace bregprox
