#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ajd/errors.hpp"
#include "ajd/matrix.hpp"

namespace ajd {

/// Solve a X = rhs for square a by Gaussian elimination with partial
/// pivoting. Throws DegenerateError when a pivot falls below
/// 1e-14 * max|a|, naming the failing column.
inline Matrix solve_linear(const Matrix& a, const Matrix& rhs) {
  if (a.rows() != a.cols()) throw Error("solve_linear: matrix not square");
  if (a.rows() != rhs.rows()) throw Error("solve_linear: dimension mismatch");
  detail::check_finite(a.entries(), "solve_linear");
  detail::check_finite(rhs.entries(), "solve_linear");

  const std::size_t n = a.rows();
  const std::size_t m = rhs.cols();
  Matrix lu = a;
  Matrix x = rhs;
  const double pivot_floor = 1e-14 * max_abs(a);

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double piv_mag = std::abs(lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(lu(i, k)) > piv_mag) {
        piv_mag = std::abs(lu(i, k));
        piv = i;
      }
    }
    if (piv_mag <= pivot_floor) {
      throw DegenerateError("solve_linear: singular at column " + std::to_string(k));
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
      for (std::size_t j = 0; j < m; ++j) std::swap(x(k, j), x(piv, j));
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double factor = lu(i, k) / lu(k, k);
      if (factor == 0.0) continue;
      lu(i, k) = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= factor * lu(k, j);
      for (std::size_t j = 0; j < m; ++j) x(i, j) -= factor * x(k, j);
    }
  }
  for (std::size_t ki = n; ki-- > 0;) {
    for (std::size_t j = 0; j < m; ++j) {
      double acc = x(ki, j);
      for (std::size_t l = ki + 1; l < n; ++l) acc -= lu(ki, l) * x(l, j);
      x(ki, j) = acc / lu(ki, ki);
    }
  }
  return x;
}

/// Q factor of a Householder QR of a square full-rank matrix, with signs
/// fixed so the R factor has positive diagonal (the map is then unique and
/// deterministic). Throws DegenerateError on rank deficiency, naming the
/// dependent column.
inline Matrix qr_orthonormalize(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error("qr_orthonormalize: matrix not square");
  detail::check_finite(a.entries(), "qr_orthonormalize");

  const std::size_t n = a.rows();
  Matrix r = a;
  Matrix q = Matrix::identity(n);
  std::vector<double> w(n);

  for (std::size_t k = 0; k < n; ++k) {
    double colnorm = 0.0;
    for (std::size_t i = k; i < n; ++i) colnorm += r(i, k) * r(i, k);
    colnorm = std::sqrt(colnorm);
    if (colnorm <= 1e-13 * std::max(1.0, max_abs(a))) {
      throw DegenerateError("qr_orthonormalize: rank deficient at column " + std::to_string(k));
    }
    const double alpha = (r(k, k) >= 0.0) ? -colnorm : colnorm;
    // Householder vector w for the trailing column
    double wnorm2 = 0.0;
    for (std::size_t i = k; i < n; ++i) {
      w[i] = r(i, k);
      if (i == k) w[i] -= alpha;
      wnorm2 += w[i] * w[i];
    }
    if (wnorm2 > 0.0) {
      const double beta = 2.0 / wnorm2;
      for (std::size_t j = k; j < n; ++j) {  // R <- (I - beta w w^T) R
        double s = 0.0;
        for (std::size_t i = k; i < n; ++i) s += w[i] * r(i, j);
        s *= beta;
        for (std::size_t i = k; i < n; ++i) r(i, j) -= s * w[i];
      }
      for (std::size_t j = 0; j < n; ++j) {  // Q <- Q (I - beta w w^T)
        double s = 0.0;
        for (std::size_t i = k; i < n; ++i) s += q(j, i) * w[i];
        s *= beta;
        for (std::size_t i = k; i < n; ++i) q(j, i) -= s * w[i];
      }
    }
  }
  // R now upper triangular; flip columns of Q where R's diagonal is negative
  for (std::size_t k = 0; k < n; ++k) {
    if (r(k, k) < 0.0) {
      for (std::size_t i = 0; i < n; ++i) q(i, k) = -q(i, k);
    } else if (r(k, k) == 0.0) {
      throw DegenerateError("qr_orthonormalize: rank deficient at column " + std::to_string(k));
    }
  }
  return q;
}

}  // namespace ajd
