#ifndef PRINTSIG_TESTS_ORACLES_JACOBI_HPP
#define PRINTSIG_TESTS_ORACLES_JACOBI_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

namespace oracle {

// Dense row-major square matrix, deliberately free of Eigen so the check does
// not share code with the library under test.
struct Dense {
  std::size_t n = 0;
  std::vector<double> a;
  double &operator()(std::size_t r, std::size_t c) { return a[r * n + c]; }
  double operator()(std::size_t r, std::size_t c) const { return a[r * n + c]; }
};

struct EigenPairs {
  std::vector<double> values;                // descending
  std::vector<std::vector<double>> vectors;  // vectors[i] pairs with values[i]
};

// Cyclic Jacobi rotations until the off-diagonal mass is negligible.
inline EigenPairs jacobi_eigen(Dense m, double tol = 1e-15, int max_sweeps = 100) {
  const std::size_t n = m.n;
  Dense v{n, std::vector<double>(n * n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  auto off = [&] {
    double s = 0.0, d = 0.0;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) (r == c ? d : s) += m(r, c) * m(r, c);
    return std::pair{s, d};
  };
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    auto [s, d] = off();
    if (s <= tol * tol * std::max(d, 1e-300)) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = m(p, q);
        if (apq == 0.0) continue;
        double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0), sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          double mkp = m(k, p), mkq = m(k, q);
          m(k, p) = c * mkp - sn * mkq;
          m(k, q) = sn * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double mpk = m(p, k), mqk = m(q, k);
          m(p, k) = c * mpk - sn * mqk;
          m(q, k) = sn * mpk + c * mqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return m(x, x) > m(y, y); });
  EigenPairs out;
  for (std::size_t i : order) {
    out.values.push_back(m(i, i));
    std::vector<double> col(n);
    for (std::size_t k = 0; k < n; ++k) col[k] = v(k, i);
    out.vectors.push_back(std::move(col));
  }
  return out;
}

// X^T X of a row-major rows x cols matrix.
inline Dense gram(const std::vector<double> &x, std::size_t rows, std::size_t cols) {
  Dense c{cols, std::vector<double>(cols * cols, 0.0)};
  for (std::size_t i = 0; i < cols; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < rows; ++t) s += x[t * cols + i] * x[t * cols + j];
      c(i, j) = s;
    }
  return c;
}

}  // namespace oracle

#endif  // PRINTSIG_TESTS_ORACLES_JACOBI_HPP
