#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mstep {

/// Flat key-value experiment configuration. Every key can also be set from
/// the command line; see the README for the schema.
struct ExperimentConfig {
  std::string experiment;  // resource | consensus | num | robustness
  std::string topology = "ring";
  int n = 10;
  std::uint64_t seed = 1;
  double edge_prob = 0.3;
  std::vector<std::string> methods;         // empty = all valid for the type
  std::vector<std::string> weight_schemes;  // empty = default set
  long max_iters = 50000;
  double tol = 1e-10;
  std::string output_dir = "out";

  // resource allocation instance sampling (a_v kept away from zero)
  double a_min = 0.05, a_max = 2.0;
  double b_max = 2.0;    // b_v in [-b_max, b_max]
  double cd_max = 10.0;  // c_v, d_v in [-cd_max, cd_max]
  double x_tot = 10.0;

  // network utility maximization
  int num_links = 10;
  int num_flows = 20;  // includes the one single-link flow per link
  double rate_max = 1e5;

  // robustness sweep
  double lambda_lo = 1.0;
  double lambda_hi = 4.0;
  double grid_extent = 1.5;
  int grid_points = 41;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
/// Apply a "key=value" override (same keys as the file format).
void apply_override(ExperimentConfig& cfg, const std::string& assignment);
void validate_config(const ExperimentConfig& cfg);

struct CellResult {
  std::string method;
  std::string scheme;
  double predicted_q = 0;
  double measured_q = 0;
  long iterations = 0;
  bool converged = true;
};

struct ExperimentResult {
  std::vector<CellResult> cells;
  std::string summary;  // also written to <output_dir>/summary.txt
};

/// Runs the configured experiment, writing per-cell CSV traces, a summary
/// table and a gnuplot script into cfg.output_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace mstep
