#pragma once

#include <functional>
#include <initializer_list>
#include <vector>

namespace bregprox {

// Dense row-major matrix of doubles. Column vectors are n x 1. Sizes here
// are tiny (the solvers run on 3-vectors and 2x2/3x3 matrices), so the
// kernels favour robustness over blocking or vectorization.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols), fill) {}
  Mat(int rows, int cols, std::initializer_list<double> values);

  static Mat identity(int n);
  static Mat col_vector(std::initializer_list<double> values);
  static Mat col_vector(const std::vector<double>& values);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int size() const { return rows_ * cols_; }

  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i * cols_ + j)]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i * cols_ + j)]; }
  double& operator[](int i) { return data_[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return data_[static_cast<std::size_t>(i)]; }

  const std::vector<double>& data() const { return data_; }

  bool same_shape(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

bool operator==(const Mat& a, const Mat& b);

Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Mat operator*(const Mat& a, const Mat& b);
Mat operator*(double s, const Mat& a);

Mat transpose(const Mat& a);
Mat symmetrize(const Mat& a);  // (a + a^T) / 2
double trace(const Mat& a);
double frobenius_norm(const Mat& a);
double max_abs(const Mat& a);
double dot(const Mat& a, const Mat& b);  // entrywise

bool is_symmetric(const Mat& a, double tol = 1e-12);

// Eigendecomposition of a symmetric matrix: a = vectors * diag(values) * vectors^T,
// eigenvalues sorted in decreasing order, eigenvectors as columns.
struct SymEig {
  std::vector<double> values;
  Mat vectors;
};

// Cyclic Jacobi rotations; quadratically convergent and accurate for the
// small symmetric matrices used here. Throws contract_error when the input
// is not symmetric to 1e-12.
SymEig sym_eig(const Mat& a);

// Spectral function f applied through sym_eig: Q f(lambda) Q^T. When
// require_positive is set, an eigenvalue at or below the positivity floor
// raises domain_error instead of being clamped.
Mat sym_fn(const Mat& a, const std::function<double(double)>& f, bool require_positive);

Mat mat_exp(const Mat& a);       // symmetric input
Mat mat_log(const Mat& a);       // SPD input
Mat mat_sqrt(const Mat& a);      // SPD input
Mat mat_inv_sqrt(const Mat& a);  // SPD input
Mat mat_pow(const Mat& a, double t);
Mat spd_inverse(const Mat& a);
double spd_det(const Mat& a);

// Relative floor below which an eigenvalue of an allegedly SPD matrix is
// treated as a domain violation rather than clamped.
inline constexpr double kSpdEigenFloor = 1e-14;

// Throws domain_error unless a is symmetric positive definite.
void require_spd(const Mat& a);

}  // namespace bregprox
