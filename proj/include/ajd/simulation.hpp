#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ajd/errors.hpp"
#include "ajd/matrix.hpp"
#include "ajd/matrix_set.hpp"
#include "ajd/ojd.hpp"
#include "ajd/rng.hpp"
#include "ajd/sdiag.hpp"
#include "ajd/solve.hpp"

namespace ajd {

enum class Mixing { Orthogonal, General };
enum class Algorithm { Sdiag, Ojd };

/// One simulation recipe: dimension, set size, noise level, mixing kind,
/// repetition count and master seed. Every trial derives its own stream from
/// (master_seed, trial_index), so single trials are reproducible in isolation.
struct Scenario {
  std::size_t n = 10;
  std::size_t k = 30;
  double sigma = 0.01;
  Mixing mixing = Mixing::Orthogonal;
  int trials = 50;
  std::uint64_t master_seed = 1;
};

struct TrialResult {
  int trial_index = 0;
  double performance_index = 0.0;
  double index_as_printed = 0.0;
  int iterations = 0;
  double final_off = 0.0;
  double elapsed_seconds = 0.0;
  std::uint64_t seed_used = 0;
};

struct SummaryStats {
  double mean = 0.0;
  double std_dev = 0.0;  // sample, divisor n-1
  double min = 0.0;
  double max = 0.0;
  int count = 0;
};

struct ScenarioResult {
  std::vector<TrialResult> trials;
  SummaryStats stats;
  int failures = 0;
  std::vector<std::string> failure_messages;
};

struct AlgoConfig {
  Algorithm algorithm = Algorithm::Sdiag;
  SdiagConfig sdiag;
  OjdConfig ojd;
};

inline void validate(const Scenario& s) {
  if (s.n < 2) throw Error("Scenario: n must be >= 2");
  if (s.k < 1) throw Error("Scenario: k must be >= 1");
  if (!(s.sigma >= 0.0)) throw Error("Scenario: sigma must be >= 0");
  if (s.trials < 1) throw Error("Scenario: trials must be >= 1");
}

/// K diagonal matrices whose diagonal entries are squares of independent
/// standard normal draws (chi-square with one degree of freedom).
inline std::vector<SymmetricMatrix> gen_diag_targets(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<SymmetricMatrix> out;
  out.reserve(k);
  for (std::size_t kk = 0; kk < k; ++kk) {
    SymmetricMatrix d(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double z = rng.next_gaussian();
      d.set(i, i, z * z);
    }
    out.push_back(std::move(d));
  }
  return out;
}

/// Mixing matrix. General kind: inverse of a standard-normal matrix whose
/// rows are scaled to unit L2 norm (conditioning is deliberately left
/// variable). Orthogonal kind: Q factor of a standard-normal matrix.
inline Matrix gen_mixing(Rng& rng, std::size_t n, Mixing kind) {
  auto draw = [&rng, n]() {
    Matrix w(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) w(i, j) = rng.next_gaussian();
    return w;
  };
  if (kind == Mixing::Orthogonal) {
    return qr_orthonormalize(draw());
  }
  auto unit_rows = [](Matrix w) {
    for (std::size_t i = 0; i < w.rows(); ++i) {
      double nrm = 0.0;
      for (std::size_t j = 0; j < w.cols(); ++j) nrm += w(i, j) * w(i, j);
      nrm = std::sqrt(nrm);
      if (nrm == 0.0) throw DegenerateError("gen_mixing: zero row");
      for (std::size_t j = 0; j < w.cols(); ++j) w(i, j) /= nrm;
    }
    return w;
  };
  try {
    return solve_linear(unit_rows(draw()), Matrix::identity(n));
  } catch (const DegenerateError&) {
    // one retry on a derived sub-stream, then give up
    Rng sub(mix64(rng.next_u64()));
    Matrix w(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) w(i, j) = sub.next_gaussian();
    return solve_linear(unit_rows(std::move(w)), Matrix::identity(n));
  }
}

/// Symmetric noise matrix: entries with i <= j drawn i.i.d. Normal(0, sigma^2),
/// mirrored below the diagonal.
inline SymmetricMatrix gen_noise(Rng& rng, std::size_t n, double sigma) {
  if (!(sigma >= 0.0)) throw Error("gen_noise: sigma must be >= 0");
  SymmetricMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) out.set(i, j, sigma * rng.next_gaussian());
  return out;
}

struct TrialSet {
  MatrixSet set;     // { A D_k A^T + N_k }
  Matrix a_true;     // the mixing matrix that generated the set
  std::uint64_t seed = 0;
};

/// Build one trial's input set. Draw order within the trial stream is fixed:
/// diagonal targets, then the mixing matrix, then one noise matrix per k.
inline TrialSet build_trial_set(const Scenario& scenario, int trial_index) {
  validate(scenario);
  if (trial_index < 0 || trial_index >= scenario.trials) {
    throw Error("build_trial_set: trial index out of range");
  }
  const std::uint64_t seed =
      trial_seed(scenario.master_seed, static_cast<std::uint64_t>(trial_index));
  Rng rng(seed);

  const std::size_t n = scenario.n;
  const auto targets = gen_diag_targets(rng, n, scenario.k);
  const Matrix a = gen_mixing(rng, n, scenario.mixing);

  std::vector<SymmetricMatrix> set;
  set.reserve(scenario.k);
  for (std::size_t kk = 0; kk < scenario.k; ++kk) {
    SymmetricMatrix ck(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t m = 0; m < n; ++m) acc += a(i, m) * targets[kk](m, m) * a(j, m);
        ck.set(i, j, acc);
      }
    const SymmetricMatrix noise = gen_noise(rng, n, scenario.sigma);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) ck.set(i, j, ck(i, j) + noise(i, j));
    set.push_back(std::move(ck));
  }
  return TrialSet{MatrixSet(std::move(set)), a, seed};
}

/// Performance index of G = B^T A, in (0, 1]: equals 1 exactly when G is a
/// generalized (scaled, signed) permutation, i.e. when the demixing matrix
/// was recovered up to the intrinsic scaling/permutation ambiguity.
inline double performance_index(const Matrix& g) {
  if (g.rows() != g.cols()) throw Error("performance_index: matrix not square");
  detail::check_finite(g.entries(), "performance_index");
  const std::size_t n = g.rows();
  double total = 0.0;
  double row_max_sum = 0.0;
  double col_max_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row_max = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double sq = g(i, j) * g(i, j);
      total += sq;
      row_max = std::max(row_max, sq);
    }
    row_max_sum += row_max;
  }
  for (std::size_t j = 0; j < n; ++j) {
    double col_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) col_max = std::max(col_max, g(i, j) * g(i, j));
    col_max_sum += col_max;
  }
  if (total == 0.0) throw DegenerateError("performance_index: all-zero matrix");
  return (row_max_sum + col_max_sum) / (2.0 * total);
}

/// The same quantity in the alternative published form
/// 2(N-1) sum G^2 / (sum_i max_j G^2 + sum_j max_i G^2); evaluates to N-1 on
/// an exact generalized permutation. Emitted alongside the normalized index
/// for auditability.
inline double performance_index_as_printed(const Matrix& g) {
  const double idx = performance_index(g);
  return 2.0 * static_cast<double>(g.rows() - 1) / (2.0 * idx);
}

inline SummaryStats summarize(std::span<const double> values) {
  SummaryStats s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) return s;
  s.min = values.front();
  s.max = values.front();
  double sum = 0.0;
  for (double v : values) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double acc = 0.0;
    for (double v : values) acc += (v - s.mean) * (v - s.mean);
    s.std_dev = std::sqrt(acc / static_cast<double>(values.size() - 1));
  }
  return s;
}

struct TTestResult {
  double t = 0.0;
  int degrees_of_freedom = 0;
  bool infinite = false;  // zero pooled variance with unequal means
};

/// Unpaired two-sample t with pooled variance; df = n_a + n_b - 2.
inline TTestResult t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw Error("t_test: each sample needs >= 2 values");
  const SummaryStats sa = summarize(a);
  const SummaryStats sb = summarize(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  TTestResult res;
  res.degrees_of_freedom = static_cast<int>(a.size() + b.size()) - 2;
  const double pooled =
      ((na - 1.0) * sa.std_dev * sa.std_dev + (nb - 1.0) * sb.std_dev * sb.std_dev) /
      static_cast<double>(res.degrees_of_freedom);
  const double diff = sa.mean - sb.mean;
  if (pooled == 0.0) {
    if (diff == 0.0) {
      res.t = 0.0;
    } else {
      res.t = diff > 0.0 ? std::numeric_limits<double>::infinity()
                         : -std::numeric_limits<double>::infinity();
      res.infinite = true;
    }
    return res;
  }
  res.t = diff / std::sqrt(pooled * (1.0 / na + 1.0 / nb));
  return res;
}

namespace detail {

inline TrialResult run_one_trial(const Scenario& scenario, const AlgoConfig& cfg,
                                 int trial_index) {
  const auto t0 = std::chrono::steady_clock::now();
  const TrialSet trial = build_trial_set(scenario, trial_index);

  Matrix b;
  int iterations = 0;
  double final_off = 0.0;
  if (cfg.algorithm == Algorithm::Sdiag) {
    const SdiagReport report = sdiag_run(trial.set, cfg.sdiag);
    b = report.diagonalizer.b;
    iterations = report.diagonalizer.iterations_run;
    final_off = report.diagonalizer.final_off;
    if (b.cols() != scenario.n) {
      throw DegenerateError("trial " + std::to_string(trial_index) +
                            ": rank-truncated diagonalizer, performance index undefined");
    }
  } else {
    const OjdResult res = ojd_run(trial.set, cfg.ojd);
    b = res.b;
    iterations = res.sweeps_used;
    final_off = res.final_off;
  }

  const Matrix g = multiply(transpose(b), trial.a_true);
  TrialResult out;
  out.trial_index = trial_index;
  out.performance_index = performance_index(g);
  out.index_as_printed = performance_index_as_printed(g);
  out.iterations = iterations;
  out.final_off = final_off;
  out.seed_used = trial.seed;
  out.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace detail

/// Run every trial of a scenario under one algorithm. Trials are independent;
/// with threads > 1 they run concurrently, and because each trial owns its
/// derived stream the aggregate output is identical to sequential execution.
/// Per-trial failures are recorded and excluded from the statistics.
inline ScenarioResult run_scenario(const Scenario& scenario, const AlgoConfig& cfg,
                                   int threads = 1) {
  validate(scenario);
  const int total = scenario.trials;
  std::vector<TrialResult> results(total);
  std::vector<std::string> errors(total);
  std::vector<char> failed(total, 0);

  auto work = [&](int index) {
    try {
      results[index] = detail::run_one_trial(scenario, cfg, index);
    } catch (const std::exception& e) {
      failed[index] = 1;
      errors[index] = e.what();
    }
  };

  const int workers = std::max(1, threads);
  if (workers == 1) {
    for (int i = 0; i < total; ++i) work(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(std::min(workers, total)));
    for (int w = 0; w < std::min(workers, total); ++w) {
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < total; i = next.fetch_add(1)) work(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  ScenarioResult out;
  std::vector<double> indices;
  indices.reserve(static_cast<std::size_t>(total));
  for (int i = 0; i < total; ++i) {
    if (failed[i]) {
      ++out.failures;
      out.failure_messages.push_back("trial " + std::to_string(i) + ": " + errors[i]);
      continue;
    }
    out.trials.push_back(results[i]);
    indices.push_back(results[i].performance_index);
  }
  out.stats = summarize(indices);
  return out;
}

}  // namespace ajd
