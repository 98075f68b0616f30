#include "terrain/linalg.hpp"

#include <algorithm>
#include <numeric>

namespace terrain {

void jacobi_eigen_symmetric(const Mat& sym, Vec& values, Mat& vectors) {
  assert(sym.rows == sym.cols);
  const std::size_t n = sym.rows;
  Mat a = sym;
  Mat v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-26) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::fabs(apq) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  values.assign(n, 0.0);
  vectors = Mat(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    values[r] = a(order[r], order[r]);
    for (std::size_t c = 0; c < n; ++c) vectors(r, c) = v(c, order[r]);
    // Fix the sign so results do not depend on rotation order: largest
    // magnitude entry points positive.
    std::size_t arg = 0;
    double best = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      if (std::fabs(vectors(r, c)) > best) {
        best = std::fabs(vectors(r, c));
        arg = c;
      }
    }
    if (vectors(r, arg) < 0.0)
      for (std::size_t c = 0; c < n; ++c) vectors(r, c) = -vectors(r, c);
  }
}

}  // namespace terrain
