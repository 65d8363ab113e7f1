#include "mstep/experiment.hpp"
#include "mstep/graph.hpp"
#include "mstep/spectral.hpp"
#include "mstep/tuning.hpp"
#include "mstep/weights.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

// Every config key is mirrored as a --key flag on `run`; collected here and
// applied on top of the file.
struct RunArgs {
  std::string config_path;
  std::vector<std::string> overrides;
};

void add_config_flags(CLI::App* cmd, RunArgs& args) {
  static const char* keys[] = {
      "experiment", "topology",   "n",          "seed",        "edge_prob",
      "methods",    "weight_schemes", "max_iters", "tol",      "output_dir",
      "a_min",      "a_max",      "b_max",      "cd_max",      "x_tot",
      "num_links",  "num_flows",  "rate_max",   "lambda_lo",   "lambda_hi",
      "grid_extent", "grid_points"};
  for (const char* key : keys) {
    std::string name = key;
    cmd->add_option_function<std::string>(
        "--" + name,
        [&args, name](const std::string& v) {
          args.overrides.push_back(name + "=" + v);
        },
        "override config key " + name);
  }
}

int do_run(const RunArgs& args) {
  mstep::ExperimentConfig cfg = mstep::load_config(args.config_path);
  for (const auto& ov : args.overrides) mstep::apply_override(cfg, ov);
  mstep::ExperimentResult result = mstep::run_experiment(cfg);
  std::cout << result.summary;
  return 0;
}

void print_tuning(double lo, double hi) {
  mstep::TuningResult ms = mstep::multistep_optimal(lo, hi);
  mstep::TuningResult gr = mstep::gradient_optimal(lo, hi);
  std::cout << std::setprecision(6);
  std::cout << "spectral bounds: [" << lo << ", " << hi << "]\n"
            << "multistep: alpha = " << ms.alpha << "  beta = " << ms.beta
            << "  q = " << ms.predicted_q << "\n"
            << "gradient:  alpha = " << gr.alpha << "  q = " << gr.predicted_q
            << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tuned multi-step gradient methods for network optimization"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run_cmd =
      app.add_subcommand("run", "run an experiment from a config file");
  run_cmd->add_option("config", run_args.config_path, "config file path")
      ->required();
  add_config_flags(run_cmd, run_args);

  CLI::App* tune_cmd = app.add_subcommand(
      "tune", "optimal step sizes for a spectral interval or a graph");
  std::optional<double> lmin, lmax;
  std::string tune_graph;
  double curv_lo = 1.0, curv_hi = 1.0;
  tune_cmd->add_option("--lmin", lmin, "smallest nonzero eigenvalue");
  tune_cmd->add_option("--lmax", lmax, "largest eigenvalue");
  tune_cmd->add_option("--graph", tune_graph,
                       "derive bounds from a graph Laplacian instead");
  tune_cmd->add_option("--l", curv_lo, "curvature lower bound (with --graph)");
  tune_cmd->add_option("--u", curv_hi, "curvature upper bound (with --graph)");

  CLI::App* spec_cmd =
      app.add_subcommand("spectrum", "Laplacian eigenvalues of a graph");
  std::string spec_graph;
  spec_cmd->add_option("graph", spec_graph, "edge-list file")->required();

  CLI::App* weights_cmd =
      app.add_subcommand("weights", "emit a weight matrix for a graph");
  std::string weights_graph, scheme_name = "metropolis", weights_out;
  weights_cmd->add_option("graph", weights_graph, "edge-list file")->required();
  weights_cmd->add_option("--scheme", scheme_name,
                          "laplacian|max_degree|best_constant|metropolis|sdp");
  weights_cmd->add_option("--out", weights_out,
                          "write the matrix here instead of stdout");

  try {
    app.parse(argc, argv);

    if (*run_cmd) return do_run(run_args);

    if (*tune_cmd) {
      if (!tune_graph.empty()) {
        mstep::Graph g = mstep::load_graph(tune_graph);
        mstep::SpectralSummary s = mstep::summarize_spectrum(
            mstep::sym_eigenvalues(mstep::laplacian(g)));
        print_tuning(curv_lo * s.lambda_min_nonzero, curv_hi * s.lambda_max);
      } else if (lmin && lmax) {
        print_tuning(*lmin, *lmax);
      } else {
        std::cerr << "tune: need --lmin/--lmax or --graph\n";
        return 1;
      }
      return 0;
    }

    if (*spec_cmd) {
      mstep::Graph g = mstep::load_graph(spec_graph);
      mstep::SpectralSummary s = mstep::summarize_spectrum(
          mstep::sym_eigenvalues(mstep::laplacian(g)));
      std::cout << std::setprecision(6) << "eigenvalues:";
      for (int i = 0; i < s.eigenvalues.size(); ++i) {
        std::cout << " " << s.eigenvalues[i];
      }
      std::cout << "\nzero eigenvalues: " << s.zero_count
                << "\nnonzero condition number: "
                << s.lambda_max / s.lambda_min_nonzero << "\n";
      return 0;
    }

    mstep::Graph g = mstep::load_graph(weights_graph);
    mstep::WeightScheme scheme = mstep::weight_scheme_from_string(scheme_name);
    mstep::WeightMatrix w =
        scheme == mstep::WeightScheme::kSdp
            ? mstep::sdp_optimal_weights(
                  g, Eigen::VectorXd::Ones(g.num_vertices()))
                  .weights
            : mstep::heuristic_weights(g, scheme);
    if (weights_out.empty()) {
      mstep::write_dense_matrix(w.matrix, std::cout);
    } else {
      std::ofstream out(weights_out);
      if (!out) {
        std::cerr << "cannot open " << weights_out << "\n";
        return 1;
      }
      mstep::write_dense_matrix(w.matrix, out);
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}
