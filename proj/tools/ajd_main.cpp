// Command-line front end: diagonalize user-supplied matrix sets, run
// Monte-Carlo scenarios, and reproduce the benchmark grid.
//
// Exit codes: 0 success, 2 non-convergence, 64 usage/parse error,
// 65 degenerate data. Human-readable text goes to stderr; data goes to
// files or stdout.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ajd/ajd.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoConvergence = 2;
constexpr int kExitUsage = 64;
constexpr int kExitDegenerate = 65;

// shortest round-trip representation, locale-independent
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct AlgoFlags {
  std::string algo = "sdiag";
  double f = 1e12;
  double tol = 1e-12;
  int max_iter = 1000;
  std::string eig = "full";

  ajd::AlgoConfig to_config() const {
    ajd::AlgoConfig cfg;
    cfg.algorithm = (algo == "ojd") ? ajd::Algorithm::Ojd : ajd::Algorithm::Sdiag;
    cfg.sdiag.f = f;
    cfg.sdiag.rel_tol = tol;
    cfg.sdiag.max_iterations = max_iter;
    cfg.sdiag.eig_strategy =
        (eig == "power") ? ajd::EigStrategy::PowerPasses : ajd::EigStrategy::FullEig;
    cfg.ojd.max_sweeps = max_iter;
    cfg.ojd.angle_tol = tol;
    return cfg;
  }
};

void add_algo_flags(CLI::App* cmd, AlgoFlags& flags, bool with_algo_choice) {
  if (with_algo_choice) {
    cmd->add_option("--algo", flags.algo, "algorithm")
        ->check(CLI::IsMember({"sdiag", "ojd"}))
        ->capture_default_str();
  }
  cmd->add_option("--f", flags.f, "rank-truncation ratio")->capture_default_str();
  cmd->add_option("--tol", flags.tol, "relative convergence tolerance")->capture_default_str();
  cmd->add_option("--max-iter", flags.max_iter, "iteration/sweep cap")->capture_default_str();
  cmd->add_option("--eig", flags.eig, "eigen strategy for the direction stage")
      ->check(CLI::IsMember({"full", "power"}))
      ->capture_default_str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ajd::Error("cannot write " + path);
  out << text;
}

const char kCsvHeader[] = "trial,algo,n,k,sigma,mixing,index,index_as_printed,iterations,final_off,seed";

void append_csv_rows(std::string& csv, const ajd::ScenarioResult& res, const std::string& algo,
                     const ajd::Scenario& scn) {
  const char* mixing = (scn.mixing == ajd::Mixing::Orthogonal) ? "orthogonal" : "general";
  for (const auto& t : res.trials) {
    csv += std::to_string(t.trial_index);
    csv += ',';
    csv += algo;
    csv += ',';
    csv += std::to_string(scn.n);
    csv += ',';
    csv += std::to_string(scn.k);
    csv += ',';
    csv += fmt(scn.sigma);
    csv += ',';
    csv += mixing;
    csv += ',';
    csv += fmt(t.performance_index);
    csv += ',';
    csv += fmt(t.index_as_printed);
    csv += ',';
    csv += std::to_string(t.iterations);
    csv += ',';
    csv += fmt(t.final_off);
    csv += ',';
    csv += std::to_string(t.seed_used);
    csv += '\n';
  }
}

std::string summary_block(const ajd::ScenarioResult& res) {
  std::ostringstream out;
  out << "trials " << res.stats.count << "  failures " << res.failures << '\n'
      << "mean " << fmt(res.stats.mean) << "  std " << fmt(res.stats.std_dev) << "  min "
      << fmt(res.stats.min) << "  max " << fmt(res.stats.max) << '\n';
  return out.str();
}

int cmd_diagonalize(const std::string& input, const std::string& out_path,
                    const AlgoFlags& flags, bool verbose) {
  ajd::MatrixSet set;
  try {
    set = ajd::load_matrix_set(input);
  } catch (const ajd::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (set.k() <= 2) {
    std::cerr << "warning: only " << set.k()
              << " input matrices; the joint diagonalizer may not be identifiable\n";
  }

  const ajd::AlgoConfig cfg = flags.to_config();
  nlohmann::json doc;
  bool converged = false;
  try {
    if (cfg.algorithm == ajd::Algorithm::Sdiag) {
      const ajd::SdiagReport report = ajd::sdiag_run(set, cfg.sdiag);
      const ajd::Diagonalizer& d = report.diagonalizer;
      converged = d.converged;
      doc["algorithm"] = "sdiag";
      doc["n"] = set.n;
      doc["r"] = d.rank;
      doc["b"] = std::vector<double>(d.b.entries().begin(), d.b.entries().end());
      doc["report"] = {
          {"iterations", d.iterations_run},
          {"converged", d.converged},
          {"final_off", d.final_off},
          {"off_initial", report.off_initial},
          {"off_history", d.off_history},
          {"rank", d.rank},
          {"trace_sum_per_iter", report.trace_sum_per_iter},
          {"rank_per_iter", report.rank_per_iter},
          {"top_eigs_final", report.top_eigs_final},
          {"second_eigs_final", report.second_eigs_final},
          {"u_orthogonality_final", report.u_orthogonality_final},
          {"stationarity_residual_final", report.stationarity_residual_final},
          {"power_fallbacks", report.power_fallbacks},
          {"warnings", report.warnings},
      };
      if (verbose) {
        std::cerr << "sdiag: " << d.iterations_run << " iterations, off "
                  << fmt(report.off_initial) << " -> " << fmt(d.final_off) << ", rank "
                  << d.rank << '\n';
      }
    } else {
      const ajd::OjdResult res = ajd::ojd_run(set, cfg.ojd);
      converged = res.converged;
      doc["algorithm"] = "ojd";
      doc["n"] = set.n;
      doc["r"] = set.n;
      doc["b"] = std::vector<double>(res.b.entries().begin(), res.b.entries().end());
      doc["report"] = {
          {"sweeps", res.sweeps_used},
          {"converged", res.converged},
          {"final_off", res.final_off},
          {"orthogonality_defect", ajd::orthogonality_defect(res.b)},
          {"max_descent_violation", res.max_descent_violation},
      };
      if (verbose) {
        std::cerr << "ojd: " << res.sweeps_used << " sweeps, off " << fmt(res.final_off)
                  << '\n';
      }
    }
  } catch (const ajd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDegenerate;
  }

  const std::string text = doc.dump() + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text(out_path, text);
  }
  return converged ? kExitOk : kExitNoConvergence;
}

struct ScenarioFlags {
  std::size_t n = 10;
  std::size_t k = 30;
  double sigma = 0.01;
  std::string mixing = "orthogonal";
  int trials = 50;
  std::uint64_t seed = 1;
  int threads = 1;

  ajd::Scenario to_scenario() const {
    ajd::Scenario s;
    s.n = n;
    s.k = k;
    s.sigma = sigma;
    s.mixing = (mixing == "general") ? ajd::Mixing::General : ajd::Mixing::Orthogonal;
    s.trials = trials;
    s.master_seed = seed;
    return s;
  }
};

int cmd_simulate(const ScenarioFlags& sf, const AlgoFlags& flags, const std::string& out_path,
                 bool verbose) {
  ajd::Scenario scn = sf.to_scenario();
  try {
    ajd::validate(scn);
  } catch (const ajd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (scn.k <= 2) {
    std::cerr << "warning: k <= 2; the joint diagonalizer may not be identifiable\n";
  }
  const ajd::ScenarioResult res = ajd::run_scenario(scn, flags.to_config(), sf.threads);

  std::string csv(kCsvHeader);
  csv += '\n';
  append_csv_rows(csv, res, flags.algo, scn);

  if (out_path.empty()) {
    std::cout << csv;
    std::cerr << summary_block(res);
  } else {
    write_text(out_path, csv);
    std::cout << summary_block(res);
  }
  for (const auto& msg : res.failure_messages) std::cerr << "failure: " << msg << '\n';
  if (verbose) {
    for (const auto& t : res.trials) {
      std::cerr << "trial " << t.trial_index << ": index " << fmt(t.performance_index)
                << " (as printed " << fmt(t.index_as_printed) << "), " << t.iterations
                << " iterations\n";
    }
  }
  return res.failures == 0 ? kExitOk : kExitDegenerate;
}

int cmd_bench(const ScenarioFlags& sf, AlgoFlags flags, const std::string& out_path,
              bool verbose) {
  const double sigmas[] = {0.01, 0.03};
  const ajd::Mixing mixings[] = {ajd::Mixing::Orthogonal, ajd::Mixing::General};
  const ajd::Algorithm algos[] = {ajd::Algorithm::Sdiag, ajd::Algorithm::Ojd};

  std::string csv(kCsvHeader);
  csv += '\n';
  int failures = 0;

  // cell results indexed [algo][mixing][sigma]
  ajd::ScenarioResult cells[2][2][2];
  for (int ai = 0; ai < 2; ++ai) {
    for (int mi = 0; mi < 2; ++mi) {
      for (int si = 0; si < 2; ++si) {
        ajd::Scenario scn = sf.to_scenario();
        scn.sigma = sigmas[si];
        scn.mixing = mixings[mi];
        ajd::AlgoConfig cfg = flags.to_config();
        cfg.algorithm = algos[ai];
        cells[ai][mi][si] = ajd::run_scenario(scn, cfg, sf.threads);
        const auto& res = cells[ai][mi][si];
        failures += res.failures;
        for (const auto& msg : res.failure_messages) std::cerr << "failure: " << msg << '\n';
        append_csv_rows(csv, res, ai == 0 ? "sdiag" : "ojd", scn);
        if (verbose) {
          std::cerr << (ai == 0 ? "sdiag" : "ojd") << " "
                    << (mi == 0 ? "orthogonal" : "general") << " sigma " << sigmas[si]
                    << ": mean " << fmt(res.stats.mean) << '\n';
        }
      }
    }
  }

  char line[256];
  std::printf("%-14s %25s %25s %25s %25s\n", "", "orthogonal s=0.01", "orthogonal s=0.03",
              "general s=0.01", "general s=0.03");
  const char* names[] = {"sdiag", "ojd"};
  for (int ai = 0; ai < 2; ++ai) {
    std::printf("%-14s", names[ai]);
    for (int mi = 0; mi < 2; ++mi) {
      for (int si = 0; si < 2; ++si) {
        const auto& st = cells[ai][mi][si].stats;
        std::snprintf(line, sizeof(line), "%.8f (%.8f)", st.mean, st.std_dev);
        std::printf(" %25s", line);
      }
    }
    std::printf("\n");
  }
  std::printf("%-14s", "t sdiag-ojd");
  for (int mi = 0; mi < 2; ++mi) {
    for (int si = 0; si < 2; ++si) {
      std::vector<double> a, b;
      for (const auto& t : cells[0][mi][si].trials) a.push_back(t.performance_index);
      for (const auto& t : cells[1][mi][si].trials) b.push_back(t.performance_index);
      if (a.size() < 2 || b.size() < 2) {
        std::printf(" %25s", "n/a");
        continue;
      }
      const ajd::TTestResult tt = ajd::t_test(a, b);
      std::snprintf(line, sizeof(line), "%.4f (df=%d)", tt.t, tt.degrees_of_freedom);
      std::printf(" %25s", line);
    }
  }
  std::printf("\n");

  write_text(out_path.empty() ? "bench.csv" : out_path, csv);
  return failures == 0 ? kExitOk : kExitDegenerate;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"approximate joint diagonalization toolkit"};
  app.require_subcommand(1);

  // diagonalize
  auto* diag = app.add_subcommand("diagonalize", "jointly diagonalize a matrix set file");
  std::string diag_input;
  std::string diag_out;
  AlgoFlags diag_flags;
  bool diag_verbose = false;
  diag->add_option("--input", diag_input, "matrix set JSON file")->required();
  diag->add_option("--out", diag_out, "output path (default: stdout)");
  add_algo_flags(diag, diag_flags, true);
  diag->add_flag("--verbose", diag_verbose, "progress to stderr");

  // simulate
  auto* sim = app.add_subcommand("simulate", "run one Monte-Carlo scenario");
  ScenarioFlags sim_sf;
  AlgoFlags sim_flags;
  std::string sim_out;
  bool sim_verbose = false;
  sim->add_option("--n", sim_sf.n, "matrix dimension")->capture_default_str();
  sim->add_option("--k", sim_sf.k, "matrices per set")->capture_default_str();
  sim->add_option("--sigma", sim_sf.sigma, "noise standard deviation")->capture_default_str();
  sim->add_option("--mixing", sim_sf.mixing, "mixing matrix kind")
      ->check(CLI::IsMember({"orthogonal", "general"}))
      ->capture_default_str();
  sim->add_option("--trials", sim_sf.trials, "repetitions")->capture_default_str();
  sim->add_option("--seed", sim_sf.seed, "master seed")->capture_default_str();
  sim->add_option("--threads", sim_sf.threads, "worker threads")->capture_default_str();
  add_algo_flags(sim, sim_flags, true);
  sim->add_option("--out", sim_out, "CSV path (default: stdout)");
  sim->add_flag("--verbose", sim_verbose, "per-trial lines to stderr");

  // bench
  auto* bench = app.add_subcommand(
      "bench", "benchmark grid: {sigma 0.01, 0.03} x {orthogonal, general} x {sdiag, ojd}");
  ScenarioFlags bench_sf;
  AlgoFlags bench_flags;
  std::string bench_out;
  bool bench_verbose = false;
  bench->add_option("--n", bench_sf.n, "matrix dimension")->capture_default_str();
  bench->add_option("--k", bench_sf.k, "matrices per set")->capture_default_str();
  bench->add_option("--trials", bench_sf.trials, "repetitions per cell")->capture_default_str();
  bench->add_option("--seed", bench_sf.seed, "master seed")->capture_default_str();
  bench->add_option("--threads", bench_sf.threads, "worker threads")->capture_default_str();
  add_algo_flags(bench, bench_flags, false);
  bench->add_option("--out", bench_out, "CSV path (default: bench.csv)");
  bench->add_flag("--verbose", bench_verbose, "per-cell lines to stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (diag->parsed()) return cmd_diagonalize(diag_input, diag_out, diag_flags, diag_verbose);
    if (sim->parsed()) return cmd_simulate(sim_sf, sim_flags, sim_out, sim_verbose);
    if (bench->parsed()) return cmd_bench(bench_sf, bench_flags, bench_out, bench_verbose);
  } catch (const ajd::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ajd::DegenerateError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const ajd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDegenerate;
  }
  return kExitUsage;
}
