#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace terrain {

using Vec = std::vector<double>;

// Dense row-major matrix. Small helper, not a linear algebra library; the
// math in this project is low-dimensional and explicit loops keep every
// operation deterministic.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return a[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

  const double* row(std::size_t r) const { return a.data() + r * cols; }
  double* row(std::size_t r) { return a.data() + r * cols; }
};

// y = M x
inline void mat_vec(const Mat& m, const double* x, double* y) {
  for (std::size_t r = 0; r < m.rows; ++r) {
    const double* mr = m.row(r);
    double s = 0.0;
    for (std::size_t c = 0; c < m.cols; ++c) s += mr[c] * x[c];
    y[r] = s;
  }
}

// y = M^T x
inline void mat_tvec(const Mat& m, const double* x, double* y) {
  for (std::size_t c = 0; c < m.cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < m.rows; ++r) {
    const double* mr = m.row(r);
    const double xr = x[r];
    for (std::size_t c = 0; c < m.cols; ++c) y[c] += mr[c] * xr;
  }
}

inline double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

inline double squared_distance(const Vec& x, const Vec& y) {
  assert(x.size() == y.size());
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

inline double euclidean(const Vec& x, const Vec& y) { return std::sqrt(squared_distance(x, y)); }

// In-place modified Gram-Schmidt on the rows of q. Two passes keep the
// result orthonormal well below the 1e-8 contract.
inline void orthonormalize_rows(Mat& q) {
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < q.rows; ++i) {
      double* qi = q.row(i);
      for (std::size_t j = 0; j < i; ++j) {
        const double* qj = q.row(j);
        const double p = dot(qi, qj, q.cols);
        for (std::size_t c = 0; c < q.cols; ++c) qi[c] -= p * qj[c];
      }
      double nrm = std::sqrt(dot(qi, qi, q.cols));
      if (nrm < 1e-30) nrm = 1.0;
      for (std::size_t c = 0; c < q.cols; ++c) qi[c] /= nrm;
    }
  }
}

// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
// Returns eigenvalues in descending order; rows of `vectors` are the
// corresponding eigenvectors. Intended for small matrices (d <= ~64).
void jacobi_eigen_symmetric(const Mat& sym, Vec& values, Mat& vectors);

}  // namespace terrain
