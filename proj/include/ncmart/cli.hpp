#pragma once

// Experiment drivers behind the ncmart command-line tool. Each command turns
// an ExperimentConfig into a table of rows plus a summary; writers render the
// result as CSV (with '#' metadata lines) or JSON {config, rows, summary,
// version}. Output depends only on the config, never on timing or jobs.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "ncmart/algebra.hpp"

namespace ncmart::cli {

std::string version();

struct ExperimentConfig {
  std::string command;  // tn-bounds, mu, chain, obstruction, ergodic
  std::vector<Index> n_list;
  std::vector<double> p_list;
  std::vector<Index> k_list;
  double t = -1.0;  // negative: command default
  double p_cert = 0.25;
  long budget = 2000;
  std::uint64_t seed = 0;
  int trials = 0;  // 0: command default
  int jobs = 1;
  std::string format = "csv";
  std::string out;  // empty: stdout
  Index dim_cap = kDefaultDimCap;
  std::string convention = "reciprocal";

  /// Fills empty lists with the command's default grid.
  void apply_defaults();
  /// Ordered key/value echo (jobs and out excluded: they never change results).
  std::vector<std::pair<std::string, std::string>> echo() const;
};

using Cell = std::variant<long long, double, bool, std::string>;

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, Cell>> summary;
  bool passed = true;
};

/// Throws std::invalid_argument on an unknown command or invalid parameters.
ExperimentResult run(ExperimentConfig config);

ExperimentResult cmd_tn_bounds(const ExperimentConfig& c);
ExperimentResult cmd_mu(const ExperimentConfig& c);
ExperimentResult cmd_chain(const ExperimentConfig& c);
ExperimentResult cmd_obstruction(const ExperimentConfig& c);
ExperimentResult cmd_ergodic(const ExperimentConfig& c);

void write_csv(const ExperimentResult& r, std::ostream& os);
void write_json(const ExperimentResult& r, std::ostream& os);
void write(const ExperimentResult& r, std::ostream& os);  // by config.format

/// Number formatting shared by both writers: shortest round-trip decimal.
std::string format_double(double x);

}  // namespace ncmart::cli
