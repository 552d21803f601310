#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "ajd/errors.hpp"
#include "ajd/matrix.hpp"

namespace ajd {

struct EigenDecomposition {
  std::vector<double> values;  // sorted descending
  Matrix vectors;              // columns are the matching eigenvectors
};

namespace detail {

/// Flip each column so its largest-magnitude component is positive
/// (ties broken by lowest index). Makes eigenvector output deterministic.
inline void fix_column_signs(Matrix& v) {
  for (std::size_t j = 0; j < v.cols(); ++j) {
    std::size_t arg = 0;
    double best = std::abs(v(0, j));
    for (std::size_t i = 1; i < v.rows(); ++i) {
      const double a = std::abs(v(i, j));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (v(arg, j) < 0.0) {
      for (std::size_t i = 0; i < v.rows(); ++i) v(i, j) = -v(i, j);
    }
  }
}

inline double off_frobenius(const std::vector<double>& a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) acc += a[i * n + j] * a[i * n + j];
  return std::sqrt(acc);
}

}  // namespace detail

/// Full symmetric eigendecomposition by cyclic Jacobi rotations.
/// Deterministic: fixed lexicographic sweep order, eigenvalues sorted
/// descending (stable), column signs fixed as in fix_column_signs.
/// Converges when the off-diagonal Frobenius norm falls below
/// 1e-12 * ||S||_F; throws ConvergenceError after 100 sweeps.
inline EigenDecomposition sym_eig(const SymmetricMatrix& s) {
  detail::check_finite(s.entries(), "sym_eig");
  const std::size_t n = s.dim();
  std::vector<double> a(s.entries().begin(), s.entries().end());
  Matrix v = Matrix::identity(n);

  const double norm_s = frobenius_norm(s);
  const double threshold = 1e-12 * norm_s;
  constexpr int kMaxSweeps = 100;
  constexpr double eps = std::numeric_limits<double>::epsilon();

  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };

  bool converged = (norm_s == 0.0) || (n == 1);
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    if (detail::off_frobenius(a, n) <= threshold) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double h = at(q, q) - at(p, p);
        double t;
        if (100.0 * std::abs(apq) <= eps * std::abs(h)) {
          t = apq / h;  // rotation angle below representable resolution
        } else {
          const double tau = h / (2.0 * apq);
          t = 1.0 / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
          if (tau < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = t * c;

        at(p, p) -= t * apq;
        at(q, q) += t * apq;
        at(p, q) = 0.0;
        at(q, p) = 0.0;
        for (std::size_t l = 0; l < n; ++l) {
          if (l == p || l == q) continue;
          const double alp = at(l, p);
          const double alq = at(l, q);
          at(l, p) = c * alp - sn * alq;
          at(p, l) = at(l, p);
          at(l, q) = sn * alp + c * alq;
          at(q, l) = at(l, q);
        }
        for (std::size_t l = 0; l < n; ++l) {
          const double vlp = v(l, p);
          const double vlq = v(l, q);
          v(l, p) = c * vlp - sn * vlq;
          v(l, q) = sn * vlp + c * vlq;
        }
      }
    }
  }
  if (!converged && detail::off_frobenius(a, n) > threshold) {
    throw ConvergenceError("sym_eig: no convergence after 100 sweeps, off-diagonal norm " +
                           std::to_string(detail::off_frobenius(a, n)));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return at(x, x) > at(y, y); });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = at(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  detail::fix_column_signs(out.vectors);
  return out;
}

struct PowerResult {
  double value = 0.0;            // Rayleigh quotient estimate
  std::vector<double> vector;    // unit L2, sign-fixed
  int passes = 0;                // multiply-and-renormalize steps performed
  bool converged = false;
};

/// Dominant eigenpair of a symmetric positive semidefinite matrix by power
/// passes. Stops when ||s v - lambda v||_2 <= tol. A start vector in the
/// numerical null space of s is reported as non-convergence instead of being
/// passed off as the dominant pair.
inline PowerResult power_iteration(const SymmetricMatrix& s, std::span<const double> start,
                                   int max_passes, double tol) {
  detail::check_finite(s.entries(), "power_iteration");
  if (s.dim() != start.size()) throw Error("power_iteration: dimension mismatch");
  const double start_norm = norm2(start);
  if (start_norm == 0.0) throw Error("power_iteration: start vector is zero");

  std::vector<double> v(start.begin(), start.end());
  for (double& x : v) x /= start_norm;

  double scale = 0.0;
  for (double x : s.entries()) scale = std::max(scale, std::abs(x));

  PowerResult res;
  for (int pass = 0; pass <= max_passes; ++pass) {
    std::vector<double> w = matvec(s, v);
    const double lambda = dot(v, w);
    double resid = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double d = w[i] - lambda * v[i];
      resid += d * d;
    }
    resid = std::sqrt(resid);
    const double wn = norm2(w);
    if (wn <= scale * 1e-15) {
      // s v vanished: cannot identify the dominant direction from here
      res.value = lambda;
      res.vector = std::move(v);
      res.passes = pass;
      res.converged = false;
      return res;
    }
    if (resid <= tol || pass == max_passes) {
      res.value = lambda;
      res.vector = std::move(v);
      res.passes = pass;
      res.converged = (resid <= tol);
      break;
    }
    for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / wn;
  }

  // same sign convention as sym_eig
  std::size_t arg = 0;
  double best = std::abs(res.vector[0]);
  for (std::size_t i = 1; i < res.vector.size(); ++i) {
    if (std::abs(res.vector[i]) > best) {
      best = std::abs(res.vector[i]);
      arg = i;
    }
  }
  if (res.vector[arg] < 0.0)
    for (double& x : res.vector) x = -x;
  return res;
}

}  // namespace ajd
