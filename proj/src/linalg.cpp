#include "bregprox/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bregprox/errors.hpp"

namespace bregprox {

Mat::Mat(int rows, int cols, std::initializer_list<double> values)
    : rows_(rows), cols_(cols), data_(values) {
  if (static_cast<int>(data_.size()) != rows * cols) {
    throw contract_error("Mat: initializer size does not match shape");
  }
}

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::col_vector(std::initializer_list<double> values) {
  Mat m(static_cast<int>(values.size()), 1);
  int i = 0;
  for (double v : values) m[i++] = v;
  return m;
}

Mat Mat::col_vector(const std::vector<double>& values) {
  Mat m(static_cast<int>(values.size()), 1);
  for (int i = 0; i < m.rows(); ++i) m[i] = values[static_cast<std::size_t>(i)];
  return m;
}

bool operator==(const Mat& a, const Mat& b) {
  return a.same_shape(b) && a.data() == b.data();
}

namespace {

void require_same_shape(const Mat& a, const Mat& b, const char* what) {
  if (!a.same_shape(b)) throw contract_error(std::string(what) + ": shape mismatch");
}

}  // namespace

Mat operator+(const Mat& a, const Mat& b) {
  require_same_shape(a, b, "operator+");
  Mat r(a.rows(), a.cols());
  for (int i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Mat operator-(const Mat& a, const Mat& b) {
  require_same_shape(a, b, "operator-");
  Mat r(a.rows(), a.cols());
  for (int i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Mat operator*(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) throw contract_error("operator*: inner dimension mismatch");
  Mat r(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
    }
  }
  return r;
}

Mat operator*(double s, const Mat& a) {
  Mat r(a.rows(), a.cols());
  for (int i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

Mat transpose(const Mat& a) {
  Mat r(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(j, i) = a(i, j);
  return r;
}

Mat symmetrize(const Mat& a) {
  if (a.rows() != a.cols()) throw contract_error("symmetrize: matrix not square");
  Mat r(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) = 0.5 * (a(i, j) + a(j, i));
  return r;
}

double trace(const Mat& a) {
  if (a.rows() != a.cols()) throw contract_error("trace: matrix not square");
  double t = 0.0;
  for (int i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

double frobenius_norm(const Mat& a) {
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a[i] * a[i];
  return std::sqrt(s);
}

double max_abs(const Mat& a) {
  double m = 0.0;
  for (int i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

double dot(const Mat& a, const Mat& b) {
  require_same_shape(a, b, "dot");
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool is_symmetric(const Mat& a, double tol) {
  if (a.rows() != a.cols()) return false;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol) return false;
  return true;
}

SymEig sym_eig(const Mat& input) {
  if (!is_symmetric(input, 1e-12)) {
    throw contract_error("sym_eig: input is not symmetric to 1e-12");
  }
  const int n = input.rows();
  Mat a = symmetrize(input);
  Mat v = Mat::identity(n);

  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off <= 1e-300) break;

    double diag_scale = 0.0;
    for (int p = 0; p < n; ++p) diag_scale = std::max(diag_scale, std::abs(a(p, p)));
    if (std::sqrt(off) <= 1e-16 * std::max(1.0, diag_scale)) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&a](int i, int j) { return a(i, i) > a(j, j); });

  SymEig out;
  out.values.resize(static_cast<std::size_t>(n));
  out.vectors = Mat(n, n);
  for (int j = 0; j < n; ++j) {
    out.values[static_cast<std::size_t>(j)] = a(order[static_cast<std::size_t>(j)],
                                                order[static_cast<std::size_t>(j)]);
    for (int i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[static_cast<std::size_t>(j)]);
  }
  return out;
}

Mat sym_fn(const Mat& a, const std::function<double(double)>& f, bool require_positive) {
  const SymEig eig = sym_eig(a);
  double scale = 0.0;
  for (double w : eig.values) scale = std::max(scale, std::abs(w));
  if (require_positive) {
    for (double w : eig.values) {
      if (w <= kSpdEigenFloor * std::max(1.0, scale)) {
        throw domain_error("sym_fn: matrix is not positive definite");
      }
    }
  }
  const int n = a.rows();
  Mat fd(n, n);
  for (int i = 0; i < n; ++i) fd(i, i) = f(eig.values[static_cast<std::size_t>(i)]);
  return symmetrize(eig.vectors * fd * transpose(eig.vectors));
}

Mat mat_exp(const Mat& a) {
  return sym_fn(a, [](double w) { return std::exp(w); }, false);
}

Mat mat_log(const Mat& a) {
  return sym_fn(a, [](double w) { return std::log(w); }, true);
}

Mat mat_sqrt(const Mat& a) {
  return sym_fn(a, [](double w) { return std::sqrt(w); }, true);
}

Mat mat_inv_sqrt(const Mat& a) {
  return sym_fn(a, [](double w) { return 1.0 / std::sqrt(w); }, true);
}

Mat mat_pow(const Mat& a, double t) {
  return sym_fn(a, [t](double w) { return std::pow(w, t); }, true);
}

Mat spd_inverse(const Mat& a) {
  return sym_fn(a, [](double w) { return 1.0 / w; }, true);
}

double spd_det(const Mat& a) {
  const SymEig eig = sym_eig(a);
  double d = 1.0;
  for (double w : eig.values) d *= w;
  return d;
}

void require_spd(const Mat& a) {
  if (a.rows() != a.cols()) throw domain_error("require_spd: matrix not square");
  if (!is_symmetric(a, 1e-12)) throw domain_error("require_spd: matrix not symmetric to 1e-12");
  const SymEig eig = sym_eig(a);
  double scale = 0.0;
  for (double w : eig.values) scale = std::max(scale, std::abs(w));
  for (double w : eig.values) {
    if (w <= kSpdEigenFloor * std::max(1.0, scale)) {
      throw domain_error("require_spd: eigenvalue at or below positivity floor");
    }
  }
}

}  // namespace bregprox
