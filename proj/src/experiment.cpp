#include "mstep/experiment.hpp"

#include "mstep/engines.hpp"
#include "mstep/graph.hpp"
#include "mstep/problems.hpp"
#include "mstep/spectral.hpp"
#include "mstep/tuning.hpp"
#include "mstep/weights.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>

namespace mstep {
namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void set_key(ExperimentConfig& cfg, const std::string& key,
             const std::string& value) {
  try {
    if (key == "experiment") cfg.experiment = value;
    else if (key == "topology") cfg.topology = value;
    else if (key == "n") cfg.n = std::stoi(value);
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "edge_prob") cfg.edge_prob = std::stod(value);
    else if (key == "methods") cfg.methods = split_list(value);
    else if (key == "weight_schemes") cfg.weight_schemes = split_list(value);
    else if (key == "max_iters") cfg.max_iters = std::stol(value);
    else if (key == "tol") cfg.tol = std::stod(value);
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "a_min") cfg.a_min = std::stod(value);
    else if (key == "a_max") cfg.a_max = std::stod(value);
    else if (key == "b_max") cfg.b_max = std::stod(value);
    else if (key == "cd_max") cfg.cd_max = std::stod(value);
    else if (key == "x_tot") cfg.x_tot = std::stod(value);
    else if (key == "num_links") cfg.num_links = std::stoi(value);
    else if (key == "num_flows") cfg.num_flows = std::stoi(value);
    else if (key == "rate_max") cfg.rate_max = std::stod(value);
    else if (key == "lambda_lo") cfg.lambda_lo = std::stod(value);
    else if (key == "lambda_hi") cfg.lambda_hi = std::stod(value);
    else if (key == "grid_extent") cfg.grid_extent = std::stod(value);
    else if (key == "grid_points") cfg.grid_points = std::stoi(value);
    else throw std::invalid_argument("unknown config key: " + key);
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad value for config key " + key + ": " +
                                value);
  }
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    }
    set_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  return parse_config(in);
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("override must be key=value: " + assignment);
  }
  set_key(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void validate_config(const ExperimentConfig& cfg) {
  static const std::vector<std::string> kinds = {"resource", "consensus",
                                                 "num", "robustness"};
  if (std::find(kinds.begin(), kinds.end(), cfg.experiment) == kinds.end()) {
    throw std::invalid_argument(
        "experiment must be one of resource|consensus|num|robustness");
  }
  if (cfg.n < 2) throw std::invalid_argument("n must be at least 2");
  if (cfg.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(cfg.tol > 0)) throw std::invalid_argument("tol must be positive");
  if (cfg.experiment == "num") {
    if (cfg.num_links < 1 || cfg.num_flows < cfg.num_links) {
      throw std::invalid_argument("need num_flows >= num_links >= 1");
    }
    if (!(cfg.rate_max > 0)) throw std::invalid_argument("rate_max must be > 0");
  }
  if (cfg.experiment == "robustness") {
    if (!(cfg.lambda_lo > 0 && cfg.lambda_hi > cfg.lambda_lo)) {
      throw std::invalid_argument("need 0 < lambda_lo < lambda_hi");
    }
    if (cfg.grid_points < 2) {
      throw std::invalid_argument("grid_points must be >= 2");
    }
  }
}

namespace {

namespace fs = std::filesystem;

double second_largest_modulus(const Eigen::MatrixXd& q) {
  Eigen::VectorXd ev = sym_eigenvalues(q);
  int drop = 0;
  for (int i = 1; i < ev.size(); ++i) {
    if (std::abs(ev[i] - 1.0) < std::abs(ev[drop] - 1.0)) drop = i;
  }
  double best = 0;
  for (int i = 0; i < ev.size(); ++i) {
    if (i != drop) best = std::max(best, std::abs(ev[i]));
  }
  return best;
}

/// Stable consensus matrix built from a weight matrix: I - W when that is
/// already a contraction on the disagreement space, otherwise the
/// best-constant scaling I - 2W/(lambda_2 + lambda_n).
Eigen::MatrixXd consensus_matrix(const Eigen::MatrixXd& w) {
  int n = static_cast<int>(w.rows());
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n) - w;
  if (second_largest_modulus(q) < 1.0) return q;
  SpectralSummary s = wh_spectrum(w, Eigen::VectorXd::Ones(n));
  double theta = 2.0 / (s.lambda_min_nonzero + s.lambda_max);
  return Eigen::MatrixXd::Identity(n, n) - theta * w;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string trace_csv(const IterateTrace& t) {
  std::ostringstream os;
  write_trace_csv(t, os);
  return os.str();
}

std::string fmt(double v) {
  std::ostringstream os;
  if (std::isnan(v)) return "-";
  os << std::setprecision(6) << v;
  return os.str();
}

struct SummaryBuilder {
  std::ostringstream os;

  explicit SummaryBuilder(const ExperimentConfig& cfg) {
    os << "experiment: " << cfg.experiment << "  topology: " << cfg.topology
       << "  n: " << cfg.n << "  seed: " << cfg.seed << "\n";
    os << std::left << std::setw(16) << "method" << std::setw(16) << "scheme"
       << std::setw(14) << "predicted_q" << std::setw(14) << "measured_q"
       << std::setw(12) << "iterations" << "status\n";
  }

  void row(const CellResult& c) {
    os << std::left << std::setw(16) << c.method << std::setw(16) << c.scheme
       << std::setw(14) << fmt(c.predicted_q) << std::setw(14)
       << fmt(c.measured_q) << std::setw(12) << c.iterations
       << (c.converged ? "converged" : "not-converged") << "\n";
  }
};

CellResult make_cell(const std::string& method, const std::string& scheme,
                     double predicted, const IterateTrace& trace) {
  CellResult cell;
  cell.method = method;
  cell.scheme = scheme;
  cell.predicted_q = predicted;
  FactorEstimate est = estimate_convergence_factor(trace);
  cell.measured_q = est.q;
  cell.iterations = trace.k_stop;
  cell.converged = trace.stop_reason == StopReason::kTolerance;
  return cell;
}

std::string line_plot_script(const std::vector<CellResult>& cells) {
  std::ostringstream os;
  os << "set logscale y\nset xlabel 'iteration k'\nset ylabel 'error norm'\n"
     << "set datafile separator ','\nset key outside\nplot ";
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ", \\\n     ";
    os << "'trace_" << cells[i].method << "_" << cells[i].scheme
       << ".csv' using 1:2 with lines title '" << cells[i].method << " / "
       << cells[i].scheme << "'";
  }
  os << "\npause -1\n";
  return os.str();
}

ExperimentResult run_resource(const ExperimentConfig& cfg,
                              const fs::path& out_dir) {
  Graph g = make_topology(topology_from_string(cfg.topology), cfg.n, cfg.seed,
                          cfg.edge_prob);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> ua(0.0, cfg.a_max);
  std::uniform_real_distribution<double> ub(-cfg.b_max, cfg.b_max);
  std::uniform_real_distribution<double> ucd(-cfg.cd_max, cfg.cd_max);
  Eigen::VectorXd a(cfg.n), b(cfg.n), c(cfg.n), d(cfg.n);
  for (int v = 0; v < cfg.n; ++v) {
    double av = ua(rng);
    while (av < cfg.a_min) av = ua(rng);
    a[v] = av;
    b[v] = ub(rng);
    c[v] = ucd(rng);
    d[v] = ucd(rng);
  }
  ResourceProblem prob =
      resource_allocation_objective(a, b, c, d, cfg.x_tot);
  Eigen::VectorXd x0 =
      Eigen::VectorXd::Constant(cfg.n, cfg.x_tot / cfg.n);
  Eigen::VectorXd x_star =
      prob.objective.known_optimum
          ? *prob.objective.known_optimum
          : reference_solve(prob.objective, prob.constraint, x0, 1e-13);
  Eigen::VectorXd h = prob.objective.hessian_diag(x_star);

  std::vector<std::string> schemes = cfg.weight_schemes;
  if (schemes.empty()) {
    schemes = {"max_degree", "metropolis", "best_constant", "sdp"};
  }
  std::vector<std::string> methods = cfg.methods;
  if (methods.empty()) methods = {"gradient", "multistep"};

  RunOptions opts;
  opts.max_iters = cfg.max_iters;
  opts.tol = cfg.tol;
  opts.oracle = x_star;
  opts.constraint = &prob.constraint;

  SummaryBuilder summary(cfg);
  ExperimentResult result;
  for (const auto& scheme_name : schemes) {
    WeightScheme scheme = weight_scheme_from_string(scheme_name);
    WeightMatrix w = scheme == WeightScheme::kSdp
                         ? sdp_optimal_weights(g, h).weights
                         : heuristic_weights(g, scheme);
    SpectralSummary spec = wh_spectrum(w.matrix, h);
    for (const auto& method : methods) {
      IterateTrace trace;
      double predicted;
      if (method == "multistep") {
        TuningResult t =
            multistep_optimal(spec.lambda_min_nonzero, spec.lambda_max);
        predicted = t.predicted_q;
        trace = run_multistep(prob.objective, w.matrix, t.alpha, t.beta, x0,
                              opts);
      } else if (method == "gradient") {
        TuningResult t =
            gradient_optimal(spec.lambda_min_nonzero, spec.lambda_max);
        predicted = t.predicted_q;
        trace = run_weighted_gradient(prob.objective, w.matrix, t.alpha, x0,
                                      opts);
      } else {
        throw std::invalid_argument("unknown resource method: " + method);
      }
      CellResult cell = make_cell(method, scheme_name, predicted, trace);
      write_file(out_dir / ("trace_" + method + "_" + scheme_name + ".csv"),
                 trace_csv(trace));
      summary.row(cell);
      result.cells.push_back(cell);
    }
  }
  write_file(out_dir / "plot.gp", line_plot_script(result.cells));
  result.summary = summary.os.str();
  return result;
}

ExperimentResult run_consensus_experiment(const ExperimentConfig& cfg,
                                          const fs::path& out_dir) {
  Graph g = make_topology(topology_from_string(cfg.topology), cfg.n, cfg.seed,
                          cfg.edge_prob);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> uc(0.0, 10.0);
  Eigen::VectorXd c(cfg.n);
  for (int v = 0; v < cfg.n; ++v) c[v] = uc(rng);
  Eigen::VectorXd target = Eigen::VectorXd::Constant(cfg.n, c.mean());

  std::vector<std::string> schemes = cfg.weight_schemes;
  if (schemes.empty()) schemes = {"metropolis"};
  std::vector<std::string> methods = cfg.methods;
  if (methods.empty()) {
    methods = {"basic_consensus", "multistep", "shift_register", "nesterov"};
  }

  RunOptions opts;
  opts.max_iters = cfg.max_iters;
  opts.tol = cfg.tol;
  opts.oracle = target;

  SummaryBuilder summary(cfg);
  ExperimentResult result;
  for (const auto& scheme_name : schemes) {
    WeightMatrix w =
        heuristic_weights(g, weight_scheme_from_string(scheme_name));
    Eigen::MatrixXd q = consensus_matrix(w.matrix);
    SpectralSummary spec =
        wh_spectrum(w.matrix, Eigen::VectorXd::Ones(cfg.n));
    for (const auto& method : methods) {
      IterateTrace trace;
      double predicted;
      if (method == "basic_consensus") {
        predicted = second_largest_modulus(q);
        trace = run_consensus(q, c, opts);
      } else if (method == "multistep") {
        TuningResult t =
            multistep_optimal(spec.lambda_min_nonzero, spec.lambda_max);
        predicted = t.predicted_q;
        // node-space averaging: gradient steps of f_v(x) = x^2/2 started at
        // the measurement vector, x(k+1) = x(k) - alpha W x(k) + momentum
        trace = run_multistep(averaging_objective(Eigen::VectorXd::Zero(cfg.n)),
                              w.matrix, t.alpha, t.beta, c, opts);
      } else if (method == "shift_register") {
        ShiftRegisterTuning t = shift_register_zeta(second_largest_modulus(q));
        predicted = t.predicted_q;
        trace = run_shift_register(q, t.zeta, c, opts);
      } else if (method == "nesterov") {
        NesterovParams p = nesterov_consensus_params(w.matrix);
        int n = cfg.n;
        Eigen::MatrixXd step =
            Eigen::MatrixXd::Identity(n, n) - p.step * w.matrix;
        Eigen::MatrixXd companion(2 * n, 2 * n);
        companion << (1 + p.momentum) * step, -p.momentum * step,
            Eigen::MatrixXd::Identity(n, n), Eigen::MatrixXd::Zero(n, n);
        predicted = gamma_convergence_factor(companion, w.kernel_dim);
        trace = run_nesterov_consensus(w.matrix, p.step, p.momentum, c, opts);
      } else {
        throw std::invalid_argument("unknown consensus method: " + method);
      }
      CellResult cell = make_cell(method, scheme_name, predicted, trace);
      write_file(out_dir / ("trace_" + method + "_" + scheme_name + ".csv"),
                 trace_csv(trace));
      summary.row(cell);
      result.cells.push_back(cell);
    }
  }
  write_file(out_dir / "plot.gp", line_plot_script(result.cells));
  result.summary = summary.os.str();
  return result;
}

/// Random routing matrix with the single-link flows appended last; every
/// extra flow crosses at least two links (drawn uniformly until non-trivial).
Eigen::MatrixXd random_routing(int links, int flows, std::mt19937_64& rng) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(links, flows);
  std::bernoulli_distribution coin(0.5);
  for (int s = 0; s + links < flows; ++s) {
    int used = 0;
    while (used < std::min(2, links)) {
      used = 0;
      for (int e = 0; e < links; ++e) {
        r(e, s) = coin(rng) ? 1.0 : 0.0;
        used += static_cast<int>(r(e, s));
      }
    }
  }
  for (int e = 0; e < links; ++e) r(e, flows - links + e) = 1.0;
  return r;
}

ExperimentResult run_num(const ExperimentConfig& cfg, const fs::path& out_dir) {
  std::mt19937_64 rng(cfg.seed);
  int links = cfg.num_links;
  int flows = cfg.num_flows;
  Eigen::MatrixXd routing = random_routing(links, flows, rng);
  // Pick an interior optimum first and derive the capacities from it, so the
  // exact solution is available for error traces.
  std::uniform_real_distribution<double> umu(0.5, 2.0);
  Eigen::VectorXd mu_star(links);
  for (int e = 0; e < links; ++e) mu_star[e] = umu(rng);
  Eigen::VectorXd x_star =
      Eigen::VectorXd::Constant(flows, cfg.rate_max) -
      routing.transpose() * mu_star;
  if (x_star.minCoeff() <= 0) {
    throw std::runtime_error("rate_max too small for an interior optimum");
  }
  Eigen::VectorXd capacity = routing * x_star;
  NumProblem p = quadratic_num_problem(
      routing, capacity, Eigen::VectorXd::Zero(flows),
      Eigen::VectorXd::Constant(flows, cfg.rate_max));

  std::ostringstream routing_text;
  write_routing(routing, capacity, routing_text);
  write_file(out_dir / "instance.routing", routing_text.str());

  std::vector<std::string> methods = cfg.methods;
  if (methods.empty()) methods = {"dual_gradient", "dual_multistep"};

  RunOptions opts;
  opts.max_iters = cfg.max_iters;
  opts.tol = cfg.tol;
  opts.oracle = x_star;
  Eigen::VectorXd mu0 = Eigen::VectorXd::Zero(links);

  NumBounds nb = num_bounds(routing);
  SummaryBuilder summary(cfg);
  ExperimentResult result;
  for (const auto& method : methods) {
    double alpha, beta, predicted;
    if (method == "dual_multistep") {
      TuningResult t = num_params(routing, p.curvature_lo, p.curvature_hi);
      alpha = t.alpha;
      beta = t.beta;
      predicted = t.predicted_q;
    } else if (method == "dual_gradient") {
      TuningResult t = gradient_optimal(nb.gram_lo * p.curvature_lo,
                                        nb.gram_hi * p.curvature_hi);
      alpha = t.alpha;
      beta = 0;
      predicted = t.predicted_q;
    } else {
      throw std::invalid_argument("unknown num method: " + method);
    }
    DualTrace trace = run_dual_multistep(p, alpha, beta, mu0, opts);
    CellResult cell = make_cell(method, "routing", predicted, trace.primal);
    cell.iterations = trace.dual.k_stop;
    write_file(out_dir / ("trace_" + method + "_routing.csv"),
               trace_csv(trace.primal));
    summary.row(cell);
    result.cells.push_back(cell);
  }
  write_file(out_dir / "plot.gp", line_plot_script(result.cells));
  result.summary = summary.os.str();
  return result;
}

ExperimentResult run_robustness(const ExperimentConfig& cfg,
                                const fs::path& out_dir) {
  int n = cfg.n;
  Eigen::VectorXd h(n);
  for (int v = 0; v < n; ++v) {
    h[v] = cfg.lambda_lo +
           (cfg.lambda_hi - cfg.lambda_lo) * v / std::max(1, n - 1);
  }
  SeparableObjective obj;
  obj.n = n;
  for (int v = 0; v < n; ++v) {
    double hv = h[v];
    obj.value.push_back([hv](double x) { return 0.5 * hv * x * x; });
    obj.grad.push_back([hv](double x) { return hv * x; });
    obj.hess.push_back([hv](double) { return hv; });
  }
  obj.curvature_lo = h;
  obj.curvature_hi = h;
  obj.known_optimum = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd x0 = Eigen::VectorXd::Ones(n);

  RunOptions opts;
  opts.max_iters = std::min<long>(cfg.max_iters, 2000);
  opts.tol = cfg.tol;
  opts.oracle = Eigen::VectorXd::Zero(n);

  std::ostringstream grid;
  grid << "eps_lo,eps_hi,predicted_stable,observed_converged,"
          "q_gradient,q_multistep\n";
  grid << std::setprecision(10);
  int agree = 0, total = 0;
  for (int i = 0; i < cfg.grid_points; ++i) {
    double eps_lo = -cfg.grid_extent +
                    2 * cfg.grid_extent * i / (cfg.grid_points - 1);
    for (int j = 0; j < cfg.grid_points; ++j) {
      double eps_hi = -cfg.grid_extent +
                      2 * cfg.grid_extent * j / (cfg.grid_points - 1);
      PerturbedBounds b;
      b.true_lo = cfg.lambda_lo;
      b.true_hi = cfg.lambda_hi;
      b.est_lo = cfg.lambda_lo + eps_lo;
      b.est_hi = cfg.lambda_hi + eps_hi;
      if (!(b.est_lo > 0) || b.est_hi < b.est_lo) continue;
      bool predicted = stability_check(b.est_lo, b.est_hi, b.true_hi);
      double qg = std::numeric_limits<double>::quiet_NaN();
      double qm = std::numeric_limits<double>::quiet_NaN();
      if (predicted) {
        PerturbedFactors f = perturbed_factors(b);
        qg = f.gradient_q;
        qm = f.multistep_q;
      }
      TuningResult t = multistep_optimal(b.est_lo, b.est_hi);
      IterateTrace trace =
          run_multistep(obj, w, t.alpha, t.beta, x0, opts);
      bool observed = trace.stop_reason != StopReason::kDivergence &&
                      trace.error_norms.back() < trace.error_norms.front();
      ++total;
      agree += predicted == observed;
      grid << eps_lo << "," << eps_hi << "," << (predicted ? 1 : 0) << ","
           << (observed ? 1 : 0) << "," << qg << "," << qm << "\n";
    }
  }
  write_file(out_dir / "robustness_grid.csv", grid.str());
  write_file(out_dir / "plot.gp",
             "set datafile separator ','\nset xlabel 'eps_lo'\n"
             "set ylabel 'eps_hi'\nset view map\n"
             "splot 'robustness_grid.csv' using 1:2:4 every ::1 "
             "with points pt 5 palette title 'observed convergence'\n"
             "pause -1\n");

  SummaryBuilder summary(cfg);
  ExperimentResult result;
  // Report the two tuned methods at a representative fourth-quadrant
  // perturbation alongside the grid agreement rate.
  PerturbedBounds example;
  example.true_lo = cfg.lambda_lo;
  example.true_hi = cfg.lambda_hi;
  example.est_lo = std::max(1e-6, cfg.lambda_lo - 0.8);
  example.est_hi = cfg.lambda_hi + 0.8;
  if (stability_check(example.est_lo, example.est_hi, example.true_hi)) {
    PerturbedFactors f = perturbed_factors(example);
    TuningResult tm = multistep_optimal(example.est_lo, example.est_hi);
    TuningResult tg = gradient_optimal(example.est_lo, example.est_hi);
    IterateTrace mt = run_multistep(obj, w, tm.alpha, tm.beta, x0, opts);
    IterateTrace gt = run_weighted_gradient(obj, w, tg.alpha, x0, opts);
    CellResult cm = make_cell("multistep", "perturbed", f.multistep_q, mt);
    CellResult cg = make_cell("gradient", "perturbed", f.gradient_q, gt);
    write_file(out_dir / "trace_multistep_perturbed.csv", trace_csv(mt));
    write_file(out_dir / "trace_gradient_perturbed.csv", trace_csv(gt));
    summary.row(cm);
    summary.row(cg);
    result.cells.push_back(cm);
    result.cells.push_back(cg);
  }
  summary.os << "grid agreement: " << agree << "/" << total << "\n";
  result.summary = summary.os.str();
  return result;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  fs::path out_dir(cfg.output_dir);
  fs::create_directories(out_dir);

  ExperimentResult result;
  if (cfg.experiment == "resource") {
    result = run_resource(cfg, out_dir);
  } else if (cfg.experiment == "consensus") {
    result = run_consensus_experiment(cfg, out_dir);
  } else if (cfg.experiment == "num") {
    result = run_num(cfg, out_dir);
  } else {
    result = run_robustness(cfg, out_dir);
  }
  write_file(out_dir / "summary.txt", result.summary);
  return result;
}

}  // namespace mstep
