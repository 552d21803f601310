#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "ajd/eigen.hpp"
#include "ajd/errors.hpp"
#include "ajd/matrix.hpp"
#include "ajd/matrix_set.hpp"

namespace ajd {

enum class EigStrategy { FullEig, PowerPasses };

struct SdiagConfig {
  // Rank-truncation ratio: sphering keeps eigenvalues > lambda_max / f. The
  // default only cuts numerically degenerate directions; pass a small f
  // (e.g. the signal-to-noise variance ratio) to also drop noise rank.
  // Ill-conditioned mixings spread the signal eigenvalues over many orders
  // of magnitude, so an aggressive default would discard real directions.
  double f = 1e12;
  int max_iterations = 1000;
  double rel_tol = 1e-12;    // convergence: |off(t) - off(t-1)| <= rel_tol * max(off(0), eps)
  EigStrategy eig_strategy = EigStrategy::FullEig;
  int power_pass_cap = 25;
  double power_tol = 1e-10;
};

/// The estimated demixing matrix plus convergence metadata.
struct Diagonalizer {
  Matrix b;                        // N x R, columns normalized so sum_k (b_n^T C_k b_n)^2 = 1
  std::size_t rank = 0;            // R
  int iterations_run = 0;
  double final_off = 0.0;          // off-criterion of b
  bool converged = false;
  std::vector<double> off_history; // off-criterion after each iteration
};

struct TheoremDiagnostics {
  double trace_sum = 0.0;          // sum_n tr(H^T M_n H); always equals the sphering rank
  double u_orth_defect = 0.0;      // max |U^T U - I|; -> 0 only at an exact joint diagonal
  std::vector<double> top_eigs;    // per column: largest eigenvalue of H^T M_n H
  std::vector<double> second_eigs; // per column: second largest
};

struct SdiagReport {
  Diagonalizer diagonalizer;
  double off_initial = 0.0;
  std::vector<double> trace_sum_per_iter;
  std::vector<std::size_t> rank_per_iter;
  std::vector<double> top_eigs_final;
  std::vector<double> second_eigs_final;
  double u_orthogonality_final = 0.0;
  double stationarity_residual_final = 0.0;
  int power_fallbacks = 0;         // power passes that had to fall back to the full solver
  std::vector<std::string> warnings;
};

/// M_n = sum_k (C_k b_n)(C_k b_n)^T. Symmetric positive semidefinite by
/// construction, rank <= min(K, N).
inline SymmetricMatrix compute_m_n(const MatrixSet& c, std::span<const double> b_n) {
  if (b_n.size() != c.n) throw Error("compute_m_n: dimension mismatch");
  SymmetricMatrix m(c.n);
  for (const auto& ck : c.matrices) {
    const std::vector<double> w = matvec(ck, b_n);
    for (std::size_t i = 0; i < c.n; ++i)
      for (std::size_t j = i; j < c.n; ++j) m.add(i, j, w[i] * w[j]);
  }
  return m;
}

/// M = sum_k (C_k B)(C_k B)^T, evaluated directly. Equals sum_n M_n over the
/// columns of B up to rounding; the identity is exercised by the tests.
inline SymmetricMatrix compute_m(const MatrixSet& c, const Matrix& b) {
  if (b.rows() != c.n) throw Error("compute_m: dimension mismatch");
  SymmetricMatrix m(c.n);
  for (const auto& ck : c.matrices) {
    const Matrix w = multiply(ck.as_matrix(), b);
    for (std::size_t i = 0; i < c.n; ++i)
      for (std::size_t j = i; j < c.n; ++j) {
        double acc = 0.0;
        for (std::size_t l = 0; l < b.cols(); ++l) acc += w(i, l) * w(j, l);
        m.add(i, j, acc);
      }
  }
  return m;
}

/// Least-squares off-criterion: sum_k of the squared off-diagonal entries of
/// B^T C_k B. Zero iff every congruence is exactly diagonal.
inline double off_criterion(const MatrixSet& c, const Matrix& b) {
  if (b.rows() != c.n) throw Error("off_criterion: dimension mismatch");
  double acc = 0.0;
  for (const auto& ck : c.matrices) acc += off_norm2(congruence(ck, b));
  return acc;
}

/// Same criterion through the quadratic-form route:
/// tr(B^T M B) - sum_n b_n^T M_n b_n. Must agree with off_criterion.
inline double gamma_criterion(const MatrixSet& c, const Matrix& b) {
  if (b.rows() != c.n) throw Error("gamma_criterion: dimension mismatch");
  const SymmetricMatrix m = compute_m(c, b);
  double acc = 0.0;
  for (std::size_t nn = 0; nn < b.cols(); ++nn) {
    const std::vector<double> col = b.col(nn);
    const SymmetricMatrix mn = compute_m_n(c, col);
    acc += dot(col, matvec(m, col)) - dot(col, matvec(mn, col));
  }
  return acc;
}

struct Sphering {
  Matrix h;                        // N x R with H^T M H = I
  std::size_t rank = 0;            // eigenvalues of M above lambda_max / f
  std::vector<double> eigenvalues; // full spectrum of M, descending
};

/// Whitening stage: H = V_R diag(lambda_1..lambda_R)^(-1/2) from the
/// eigendecomposition of M, keeping the R eigenvalues above lambda_max / f.
/// At least the top eigenvalue is always kept.
inline Sphering sphering(const SymmetricMatrix& m, double f) {
  if (!(f > 1.0)) throw Error("sphering: f must exceed 1");
  EigenDecomposition eig = sym_eig(m);
  const double lmax = eig.values.front();
  if (!(lmax > 0.0)) {
    throw DegenerateError("sphering: no positive eigenvalue (all-zero matrix set?)");
  }
  const double floor = lmax / f;
  std::size_t r = 0;
  while (r < eig.values.size() && eig.values[r] > floor) ++r;

  Sphering out;
  out.rank = r;
  out.eigenvalues = eig.values;
  out.h = Matrix(m.dim(), r);
  for (std::size_t j = 0; j < r; ++j) {
    const double scale = 1.0 / std::sqrt(eig.values[j]);
    for (std::size_t i = 0; i < m.dim(); ++i) out.h(i, j) = eig.vectors(i, j) * scale;
  }
  return out;
}

namespace detail {

struct Principal {
  double value = 0.0;
  std::vector<double> vector;
  bool used_fallback = false;
};

/// Principal eigenpair of one whitened matrix W = H^T M_n H under the
/// configured strategy. Power passes warm-start from the previous iteration's
/// direction and fall back to the full solver when they do not converge.
inline Principal principal_direction(const SymmetricMatrix& w, const SdiagConfig& cfg,
                                     const std::vector<double>* warm) {
  Principal out;
  if (cfg.eig_strategy == EigStrategy::PowerPasses) {
    std::vector<double> start;
    if (warm != nullptr && warm->size() == w.dim()) {
      start = *warm;
    } else {
      // cold start: the column of W with the largest norm
      std::size_t arg = 0;
      double best = -1.0;
      for (std::size_t j = 0; j < w.dim(); ++j) {
        double nrm = 0.0;
        for (std::size_t i = 0; i < w.dim(); ++i) nrm += w(i, j) * w(i, j);
        if (nrm > best) {
          best = nrm;
          arg = j;
        }
      }
      start.resize(w.dim());
      for (std::size_t i = 0; i < w.dim(); ++i) start[i] = w(i, arg);
    }
    if (norm2(start) > 0.0) {
      const PowerResult pr = power_iteration(w, start, cfg.power_pass_cap, cfg.power_tol);
      if (pr.converged) {
        out.value = pr.value;
        out.vector = pr.vector;
        return out;
      }
    }
    out.used_fallback = true;
  }
  const EigenDecomposition eig = sym_eig(w);
  out.value = eig.values.front();
  out.vector = eig.vectors.col(0);
  return out;
}

}  // namespace detail

/// Optimal-direction stage: column n of U is the unit principal eigenvector
/// of H^T M_n H, with M_n defined by column n of b_prev. When the sphering
/// rank R is smaller than the number of columns, the R directions with the
/// largest principal eigenvalues are kept (ties to the lowest index).
inline Matrix optimal_directions(const Matrix& h, const MatrixSet& c, const Matrix& b_prev,
                                 const SdiagConfig& cfg, const Matrix* warm_u = nullptr,
                                 int* power_fallbacks = nullptr) {
  const std::size_t r = h.cols();
  const std::size_t nb = b_prev.cols();
  std::vector<detail::Principal> dirs(nb);
  for (std::size_t n = 0; n < nb; ++n) {
    const SymmetricMatrix mn = compute_m_n(c, b_prev.col(n));
    const SymmetricMatrix wn = congruence(mn, h);
    std::vector<double> warm_col;
    const std::vector<double>* warm = nullptr;
    if (warm_u != nullptr && warm_u->rows() == r && n < warm_u->cols()) {
      warm_col = warm_u->col(n);
      warm = &warm_col;
    }
    dirs[n] = detail::principal_direction(wn, cfg, warm);
    if (power_fallbacks != nullptr && dirs[n].used_fallback) ++*power_fallbacks;
  }

  std::vector<std::size_t> keep(nb);
  std::iota(keep.begin(), keep.end(), 0);
  if (r < nb) {
    std::stable_sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) {
      return dirs[a].value > dirs[b].value;
    });
    keep.resize(r);
    std::sort(keep.begin(), keep.end());
  }

  Matrix u(r, keep.size());
  for (std::size_t j = 0; j < keep.size(); ++j) u.set_col(j, dirs[keep[j]].vector);
  return u;
}

/// Fix the scale of each column so that sum_k (b_n^T C_k b_n)^2 = 1.
inline Matrix normalize_columns(const MatrixSet& c, Matrix b) {
  if (b.rows() != c.n) throw Error("normalize_columns: dimension mismatch");
  for (std::size_t n = 0; n < b.cols(); ++n) {
    const std::vector<double> col = b.col(n);
    double s4 = 0.0;
    for (const auto& ck : c.matrices) {
      const double q = dot(col, matvec(ck, col));
      s4 += q * q;
    }
    if (!(s4 > 1e-300)) {
      throw DegenerateError("normalize_columns: column " + std::to_string(n) +
                            " lies in the null space of every matrix in the set");
    }
    const double scale = std::pow(s4, -0.25);
    for (std::size_t i = 0; i < b.rows(); ++i) b(i, n) *= scale;
  }
  return b;
}

struct SdiagStep {
  Matrix b_next;
  Matrix h;                     // sphering output used this step
  Matrix u;                     // directions used this step
  double trace_sum = 0.0;       // sum_n tr(H^T M_n H)
  std::vector<double> top_eigs; // per-column principal eigenvalue estimates
  double u_orth_defect = 0.0;
  std::size_t rank = 0;
  int power_fallbacks = 0;
};

/// One full iteration: per-column matrices, their sum, sphering, optimal
/// directions, B <- H U, column normalization.
inline SdiagStep sdiag_step(const MatrixSet& c, const Matrix& b, const SdiagConfig& cfg,
                            const Matrix* warm_u = nullptr) {
  if (b.rows() != c.n || b.cols() == 0) throw Error("sdiag_step: dimension mismatch");
  const std::size_t nb = b.cols();

  std::vector<SymmetricMatrix> mns;
  mns.reserve(nb);
  SymmetricMatrix m(c.n);
  for (std::size_t n = 0; n < nb; ++n) {
    mns.push_back(compute_m_n(c, b.col(n)));
    for (std::size_t i = 0; i < c.n; ++i)
      for (std::size_t j = i; j < c.n; ++j) m.add(i, j, mns.back()(i, j));
  }

  const Sphering sph = sphering(m, cfg.f);
  const std::size_t r = sph.rank;

  SdiagStep step;
  step.h = sph.h;
  step.rank = r;

  std::vector<detail::Principal> dirs(nb);
  for (std::size_t n = 0; n < nb; ++n) {
    const SymmetricMatrix wn = congruence(mns[n], sph.h);
    step.trace_sum += trace(wn);
    std::vector<double> warm_col;
    const std::vector<double>* warm = nullptr;
    if (warm_u != nullptr && warm_u->rows() == r && n < warm_u->cols()) {
      warm_col = warm_u->col(n);
      warm = &warm_col;
    }
    dirs[n] = detail::principal_direction(wn, cfg, warm);
    if (dirs[n].used_fallback) ++step.power_fallbacks;
  }

  std::vector<std::size_t> keep(nb);
  std::iota(keep.begin(), keep.end(), 0);
  if (r < nb) {
    std::stable_sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b2) {
      return dirs[a].value > dirs[b2].value;
    });
    keep.resize(r);
    std::sort(keep.begin(), keep.end());
  }

  step.u = Matrix(r, keep.size());
  step.top_eigs.resize(keep.size());
  for (std::size_t j = 0; j < keep.size(); ++j) {
    step.u.set_col(j, dirs[keep[j]].vector);
    step.top_eigs[j] = dirs[keep[j]].value;
  }
  step.u_orth_defect = orthogonality_defect(step.u);
  step.b_next = normalize_columns(c, multiply(sph.h, step.u));
  return step;
}

/// Largest relative residual of the pencil equations M_n b_n = rho_n M b_n,
/// rho_n the generalized Rayleigh quotient. Near zero at a stationary point
/// of the off-criterion.
inline double stationarity_residual(const MatrixSet& c, const Matrix& b) {
  if (b.rows() != c.n) throw Error("stationarity_residual: dimension mismatch");
  const SymmetricMatrix m = compute_m(c, b);
  double worst = 0.0;
  for (std::size_t n = 0; n < b.cols(); ++n) {
    const std::vector<double> col = b.col(n);
    const SymmetricMatrix mn = compute_m_n(c, col);
    const std::vector<double> mnb = matvec(mn, col);
    const std::vector<double> mb = matvec(m, col);
    const double den = dot(col, mb);
    if (!(den > 0.0)) {
      throw DegenerateError("stationarity_residual: degenerate pencil at column " +
                            std::to_string(n));
    }
    const double mnb_norm = norm2(mnb);
    if (mnb_norm == 0.0) {
      throw DegenerateError("stationarity_residual: M_n b_n vanished at column " +
                            std::to_string(n));
    }
    const double rho = dot(col, mnb) / den;
    double resid = 0.0;
    for (std::size_t i = 0; i < mnb.size(); ++i) {
      const double d = mnb[i] - rho * mb[i];
      resid += d * d;
    }
    worst = std::max(worst, std::sqrt(resid) / mnb_norm);
  }
  return worst;
}

/// Theorem-based diagnostics of one (H, B, U) stage: trace identity,
/// orthogonality defect of U, and the two largest eigenvalues of each
/// whitened per-column matrix.
inline TheoremDiagnostics theorem_diagnostics(const Matrix& h, const MatrixSet& c,
                                              const Matrix& b, const Matrix& u) {
  TheoremDiagnostics out;
  out.top_eigs.resize(b.cols());
  out.second_eigs.resize(b.cols(), 0.0);
  for (std::size_t n = 0; n < b.cols(); ++n) {
    const SymmetricMatrix mn = compute_m_n(c, b.col(n));
    const SymmetricMatrix wn = congruence(mn, h);
    out.trace_sum += trace(wn);
    const EigenDecomposition eig = sym_eig(wn);
    out.top_eigs[n] = eig.values.front();
    if (eig.values.size() > 1) out.second_eigs[n] = eig.values[1];
  }
  out.u_orth_defect = orthogonality_defect(u);
  return out;
}

namespace detail {

inline void validate_config(const SdiagConfig& cfg) {
  if (!(cfg.f > 1.0)) throw Error("SdiagConfig: f must exceed 1");
  if (cfg.max_iterations < 1) throw Error("SdiagConfig: max_iterations must be >= 1");
  if (!(cfg.rel_tol > 0.0)) throw Error("SdiagConfig: rel_tol must be positive");
}

inline void check_init(const MatrixSet& c, const Matrix& init) {
  if (init.rows() != c.n || init.cols() != c.n) throw Error("sdiag_run: init must be N x N");
  detail::check_finite(init.entries(), "sdiag_run init");
  SymmetricMatrix gram(c.n);
  for (std::size_t i = 0; i < c.n; ++i)
    for (std::size_t j = i; j < c.n; ++j) {
      double acc = 0.0;
      for (std::size_t l = 0; l < c.n; ++l) acc += init(l, i) * init(l, j);
      gram.set(i, j, acc);
    }
  const EigenDecomposition eig = sym_eig(gram);
  if (!(eig.values.back() > 1e-24 * std::max(eig.values.front(), 1e-300))) {
    throw DegenerateError("sdiag_run: init matrix is numerically singular");
  }
}

}  // namespace detail

/// Run the iteration from init (identity when absent) until the off-criterion
/// change falls below rel_tol * max(initial off, eps) or max_iterations. The
/// returned B is the best seen by off-criterion, which guards against
/// non-monotone steps.
inline SdiagReport sdiag_run(const MatrixSet& c, const SdiagConfig& cfg = {},
                             const Matrix* init = nullptr) {
  detail::validate_config(cfg);
  if (init != nullptr) detail::check_init(c, *init);

  SdiagReport report;
  if (c.k() <= 2) {
    report.warnings.push_back("matrix set has K <= 2 members; the joint diagonalizer may not "
                              "be identifiable");
  }

  Matrix b = normalize_columns(c, init != nullptr ? *init : Matrix::identity(c.n));
  const double off_initial = off_criterion(c, b);
  report.off_initial = off_initial;

  const double threshold =
      cfg.rel_tol * std::max(off_initial, std::numeric_limits<double>::epsilon());

  Matrix best_b = b;
  double best_off = off_initial;
  double prev_off = off_initial;
  Matrix warm_u;
  bool converged = false;
  int iterations = 0;

  for (int t = 1; t <= cfg.max_iterations; ++t) {
    const SdiagStep step =
        sdiag_step(c, b, cfg, warm_u.empty() ? nullptr : &warm_u);
    b = step.b_next;
    warm_u = step.u;
    iterations = t;

    for (double v : b.entries()) {
      if (!std::isfinite(v)) {
        throw Error("sdiag_run: non-finite values at iteration " + std::to_string(t));
      }
    }
    const double off = off_criterion(c, b);
    if (!std::isfinite(off)) {
      throw Error("sdiag_run: non-finite off-criterion at iteration " + std::to_string(t));
    }

    report.diagonalizer.off_history.push_back(off);
    report.trace_sum_per_iter.push_back(step.trace_sum);
    report.rank_per_iter.push_back(step.rank);
    report.power_fallbacks += step.power_fallbacks;

    if (off < best_off) {
      best_off = off;
      best_b = b;
    }
    if (std::abs(off - prev_off) <= threshold) {
      converged = true;
      break;
    }
    prev_off = off;
  }

  report.diagonalizer.b = best_b;
  report.diagonalizer.rank = best_b.cols();
  report.diagonalizer.iterations_run = iterations;
  report.diagonalizer.final_off = best_off;
  report.diagonalizer.converged = converged;

  // Final theorem diagnostics, evaluated fresh at the returned B with the
  // full solver so they are exact regardless of the step strategy.
  {
    SymmetricMatrix m(c.n);
    std::vector<SymmetricMatrix> mns;
    mns.reserve(best_b.cols());
    for (std::size_t n = 0; n < best_b.cols(); ++n) {
      mns.push_back(compute_m_n(c, best_b.col(n)));
      for (std::size_t i = 0; i < c.n; ++i)
        for (std::size_t j = i; j < c.n; ++j) m.add(i, j, mns[n](i, j));
    }
    const Sphering sph = sphering(m, cfg.f);
    report.top_eigs_final.resize(best_b.cols());
    report.second_eigs_final.resize(best_b.cols(), 0.0);
    Matrix u(sph.rank, best_b.cols());
    for (std::size_t n = 0; n < best_b.cols(); ++n) {
      const SymmetricMatrix wn = congruence(mns[n], sph.h);
      const EigenDecomposition eig = sym_eig(wn);
      report.top_eigs_final[n] = eig.values.front();
      if (eig.values.size() > 1) report.second_eigs_final[n] = eig.values[1];
      u.set_col(n, eig.vectors.col(0));
    }
    report.u_orthogonality_final = orthogonality_defect(u);
  }
  report.stationarity_residual_final = stationarity_residual(c, best_b);
  return report;
}

}  // namespace ajd
