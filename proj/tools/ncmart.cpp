// Command-line driver: ncmart <command> [options]. Exit status 0 iff every
// assertion of the run passed, 1 on a failed assertion, 2 on bad input.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <omp.h>

#include "ncmart/cli.hpp"

namespace {

int default_jobs() {
  if (const char* env = std::getenv("NCMART_JOBS")) {
    const int j = std::atoi(env);
    if (j > 0) return j;
  }
  return omp_get_num_procs();
}

}  // namespace

int main(int argc, char** argv) {
  using ncmart::cli::ExperimentConfig;
  CLI::App app{"Numerical lab for noncommutative martingale counterexamples"};
  app.set_version_flag("--version", ncmart::cli::version());
  app.set_config("--config", "", "key = value file; command-line flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  ExperimentConfig cfg;
  cfg.jobs = default_jobs();
  app.add_option("--n-list", cfg.n_list, "N (or n) grid, comma separated")->delimiter(',');
  app.add_option("--p-list", cfg.p_list, "exponent grid, comma separated")->delimiter(',');
  app.add_option("--k-list", cfg.k_list, "K grid for the unitary check")->delimiter(',');
  app.add_option("--t", cfg.t, "trace budget t");
  app.add_option("--p-cert", cfg.p_cert, "exponent of the chain certificate (< 1/2)");
  app.add_option("--budget", cfg.budget, "objective evaluations per search");
  app.add_option("--seed", cfg.seed, "master seed");
  app.add_option("--trials", cfg.trials, "random trials");
  app.add_option("--jobs", cfg.jobs, "worker threads (default $NCMART_JOBS or all cores)")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", cfg.out, "output path (default stdout)");
  app.add_option("--dim-cap", cfg.dim_cap, "largest matrix dimension allowed");
  app.add_option("--convention", cfg.convention, "phase convention for the diagonal unitary")
      ->check(CLI::IsMember({"reciprocal", "shifted"}));

  for (const char* name : {"tn-bounds", "mu", "chain", "obstruction", "ergodic"}) {
    auto* sub = app.add_subcommand(name);
    sub->callback([&cfg, name] { cfg.command = name; });
  }
  app.get_subcommand("tn-bounds")->description("bounds for ||T_n||_p and the v_k recursion");
  app.get_subcommand("mu")->description("growth of mu_t for the martingale of X_N");
  app.get_subcommand("chain")->description("inequality chain on random projections");
  app.get_subcommand("obstruction")->description("divergent lower bounds for the L_p element");
  app.get_subcommand("ergodic")->description("Cesaro averages of a diagonal unitary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  omp_set_num_threads(cfg.jobs);

  ncmart::cli::ExperimentResult result;
  try {
    result = ncmart::cli::run(cfg);
  } catch (const std::exception& ex) {
    std::cerr << "ncmart " << cfg.command << ": " << ex.what() << '\n';
    return 2;
  }

  if (cfg.out.empty()) {
    ncmart::cli::write(result, std::cout);
  } else {
    std::ofstream os(cfg.out, std::ios::binary);
    if (!os) {
      std::cerr << "cannot open " << cfg.out << '\n';
      return 2;
    }
    ncmart::cli::write(result, os);
  }
  std::cerr << cfg.command << ": " << result.rows.size() << " rows, "
            << (result.passed ? "all assertions passed" : "ASSERTION FAILED") << '\n';
  return result.passed ? 0 : 1;
}
