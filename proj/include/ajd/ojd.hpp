#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "ajd/errors.hpp"
#include "ajd/matrix.hpp"
#include "ajd/matrix_set.hpp"
#include "ajd/sdiag.hpp"

namespace ajd {

struct OjdConfig {
  int max_sweeps = 100;
  double angle_tol = 1e-12;  // rotations with |theta| below this are skipped
};

struct OjdResult {
  Matrix b;  // orthogonal N x N
  int sweeps_used = 0;
  double final_off = 0.0;
  bool converged = false;
  // largest observed increase of the off-criterion over a single rotation;
  // each rotation is the exact plane-restricted minimizer, so this should
  // never exceed rounding noise
  double max_descent_violation = 0.0;
};

/// Closed-form minimizer of the off-criterion restricted to the (i,j) plane
/// rotation: with p_k = C_k[i,i] - C_k[j,j] and q_k = 2 C_k[i,j],
/// theta = atan2(2 sum p_k q_k, sum (p_k^2 - q_k^2)) / 4, in (-pi/4, pi/4].
inline double givens_angle(const MatrixSet& c, std::size_t i, std::size_t j) {
  if (i == j) throw Error("givens_angle: i and j must differ");
  if (i >= c.n || j >= c.n) throw Error("givens_angle: index out of range");
  double num = 0.0;
  double den = 0.0;
  for (const auto& ck : c.matrices) {
    const double p = ck(i, i) - ck(j, j);
    const double q = 2.0 * ck(i, j);
    num += p * q;
    den += p * p - q * q;
  }
  if (num == 0.0 && den == 0.0) return 0.0;
  return 0.25 * std::atan2(2.0 * num, den);
}

/// Orthogonal joint diagonalizer: cyclic sweeps over all pairs (i < j,
/// lexicographic), applying the closed-form rotation until every angle in a
/// sweep falls below angle_tol or the sweep cap is reached.
inline OjdResult ojd_run(const MatrixSet& c, const OjdConfig& cfg = {}) {
  if (cfg.max_sweeps < 1) throw Error("OjdConfig: max_sweeps must be >= 1");
  if (!(cfg.angle_tol > 0.0)) throw Error("OjdConfig: angle_tol must be positive");

  const std::size_t n = c.n;
  MatrixSet work = c;  // rotated in place
  OjdResult res;
  res.b = Matrix::identity(n);

  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    res.sweeps_used = sweep;
    bool any_rotation = false;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double theta = givens_angle(work, i, j);
        if (std::abs(theta) <= cfg.angle_tol) continue;
        any_rotation = true;
        const double cs = std::cos(theta);
        const double sn = std::sin(theta);

        // off-criterion change comes only from the (i,j) entries
        double delta = 0.0;
        for (auto& ck : work.matrices) {
          const double a = ck(i, i);
          const double bb = ck(j, j);
          const double cc = ck(i, j);
          const double new_ii = cs * cs * a + 2.0 * cs * sn * cc + sn * sn * bb;
          const double new_jj = sn * sn * a - 2.0 * cs * sn * cc + cs * cs * bb;
          const double new_ij = (cs * cs - sn * sn) * cc - cs * sn * (a - bb);
          delta += 2.0 * (new_ij * new_ij - cc * cc);
          for (std::size_t l = 0; l < n; ++l) {
            if (l == i || l == j) continue;
            const double cil = ck(i, l);
            const double cjl = ck(j, l);
            ck.set(i, l, cs * cil + sn * cjl);
            ck.set(j, l, -sn * cil + cs * cjl);
          }
          ck.set(i, i, new_ii);
          ck.set(j, j, new_jj);
          ck.set(i, j, new_ij);
        }
        if (delta > res.max_descent_violation) res.max_descent_violation = delta;

        for (std::size_t l = 0; l < n; ++l) {
          const double bli = res.b(l, i);
          const double blj = res.b(l, j);
          res.b(l, i) = cs * bli + sn * blj;
          res.b(l, j) = -sn * bli + cs * blj;
        }
      }
    }
    if (!any_rotation) {
      res.converged = true;
      break;
    }
  }
  res.final_off = off_criterion(c, res.b);
  return res;
}

}  // namespace ajd
