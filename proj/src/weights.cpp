#include "mstep/weights.hpp"

#include "mstep/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace mstep {

WeightScheme weight_scheme_from_string(const std::string& name) {
  if (name == "laplacian") return WeightScheme::kLaplacian;
  if (name == "max_degree") return WeightScheme::kMaxDegree;
  if (name == "best_constant") return WeightScheme::kBestConstant;
  if (name == "metropolis") return WeightScheme::kMetropolis;
  if (name == "sdp") return WeightScheme::kSdp;
  if (name == "custom") return WeightScheme::kCustom;
  throw std::invalid_argument("unknown weight scheme: " + name);
}

std::string to_string(WeightScheme scheme) {
  switch (scheme) {
    case WeightScheme::kLaplacian: return "laplacian";
    case WeightScheme::kMaxDegree: return "max_degree";
    case WeightScheme::kBestConstant: return "best_constant";
    case WeightScheme::kMetropolis: return "metropolis";
    case WeightScheme::kSdp: return "sdp";
    case WeightScheme::kCustom: return "custom";
  }
  throw std::logic_error("unreachable");
}

WeightMatrix heuristic_weights(const Graph& g, WeightScheme scheme) {
  if (!g.connected())
    throw std::invalid_argument("weight design requires a connected graph");
  const Eigen::MatrixXd lap = laplacian(g);
  Eigen::MatrixXd w;
  switch (scheme) {
    case WeightScheme::kLaplacian:
      w = lap;
      break;
    case WeightScheme::kMaxDegree:
      w = lap / static_cast<double>(g.max_degree());
      break;
    case WeightScheme::kBestConstant: {
      const SpectralSummary spec = summarize_spectrum(sym_eigenvalues(lap));
      w = 2.0 / (spec.lambda_min_nonzero + spec.lambda_max) * lap;
      break;
    }
    case WeightScheme::kMetropolis: {
      w = Eigen::MatrixXd::Zero(g.num_vertices(), g.num_vertices());
      for (const auto& [v, vw] : g.edges()) {
        const double weight = 1.0 / (1.0 + std::max(g.degree(v), g.degree(vw)));
        w(v - 1, vw - 1) = -weight;
        w(vw - 1, v - 1) = -weight;
        w(v - 1, v - 1) += weight;
        w(vw - 1, vw - 1) += weight;
      }
      break;
    }
    case WeightScheme::kSdp:
    case WeightScheme::kCustom:
      throw std::invalid_argument("not a heuristic scheme");
  }
  return WeightMatrix{std::move(w), g, 1, scheme};
}

namespace {

// Projection onto {symmetric, graph sparsity, Omega V = 0}: von Neumann
// alternation between the two subspaces.
Eigen::MatrixXd project_structure(Eigen::MatrixXd omega,
                                  const std::vector<std::vector<char>>& allowed,
                                  const Eigen::MatrixXd& kernel_proj) {
  const auto n = omega.rows();
  for (int round = 0; round < 200; ++round) {
    Eigen::MatrixXd prev = omega;
    omega = kernel_proj * omega * kernel_proj;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (!allowed[static_cast<size_t>(i)][static_cast<size_t>(j)])
          omega(i, j) = 0.0;
    if ((omega - prev).norm() <= 1e-13 * std::max(1.0, prev.norm())) break;
  }
  return omega;
}

struct Feasibility {
  bool feasible = false;
  Eigen::MatrixXd omega;
};

Feasibility solve_feasibility(double t, Eigen::MatrixXd omega,
                              const std::vector<std::vector<char>>& allowed,
                              const Eigen::MatrixXd& kernel_proj,
                              const Eigen::MatrixXd& range_basis) {
  const double tol = 1e-7;
  for (int round = 0; round < 5000; ++round) {
    const Eigen::MatrixXd structured =
        project_structure(omega, allowed, kernel_proj);
    // clamp the nonzero-eigenspace spectrum into [1, t]
    const Eigen::MatrixXd reduced =
        range_basis.transpose() * structured * range_basis;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        0.5 * (reduced + reduced.transpose()));
    const Eigen::VectorXd clamped =
        eig.eigenvalues().cwiseMax(1.0).cwiseMin(t);
    const Eigen::MatrixXd boxed =
        range_basis *
        (eig.eigenvectors() * clamped.asDiagonal() *
         eig.eigenvectors().transpose()) *
        range_basis.transpose();
    const double residual =
        (boxed - structured).norm() / std::max(1.0, structured.norm());
    if (residual < tol) return {true, structured};
    omega = boxed;
  }
  return {false, std::move(omega)};
}

}  // namespace

SdpWeightResult sdp_optimal_weights(const Graph& g,
                                    const Eigen::VectorXd& h_diag) {
  if (!g.connected())
    throw std::invalid_argument("weight design requires a connected graph");
  const int n = g.num_vertices();
  if (h_diag.size() != n) throw std::invalid_argument("H dimension mismatch");
  if ((h_diag.array() <= 0.0).any())
    throw std::invalid_argument("H must have strictly positive diagonal");
  if (n > 60) throw std::invalid_argument("weight design limited to n <= 60");

  std::vector<std::vector<char>> allowed(
      static_cast<size_t>(n), std::vector<char>(static_cast<size_t>(n), 0));
  for (int v = 0; v < n; ++v) allowed[static_cast<size_t>(v)][static_cast<size_t>(v)] = 1;
  for (const auto& [v, w] : g.edges()) {
    allowed[static_cast<size_t>(v - 1)][static_cast<size_t>(w - 1)] = 1;
    allowed[static_cast<size_t>(w - 1)][static_cast<size_t>(v - 1)] = 1;
  }

  const Eigen::VectorXd h_sqrt = h_diag.array().sqrt();
  const Eigen::VectorXd h_inv_sqrt = h_sqrt.cwiseInverse();
  // kernel direction of Omega = H^{1/2} w H^{1/2} for w 1 = 0
  Eigen::VectorXd v = h_inv_sqrt / h_inv_sqrt.norm();
  const Eigen::MatrixXd kernel_proj =
      Eigen::MatrixXd::Identity(n, n) - v * v.transpose();
  Eigen::MatrixXd vmat = v;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(vmat);
  const Eigen::MatrixXd full_q =
      qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd range_basis = full_q.rightCols(n - 1);

  auto condition_of = [&](const Eigen::MatrixXd& omega) {
    const SpectralSummary s = summarize_spectrum(sym_eigenvalues(omega));
    return s.lambda_max / s.lambda_min_nonzero;
  };
  auto normalized_candidate = [&](const Eigen::MatrixXd& w_raw) {
    Eigen::MatrixXd omega =
        h_sqrt.asDiagonal() * w_raw * h_sqrt.asDiagonal();
    const SpectralSummary s = summarize_spectrum(sym_eigenvalues(omega));
    return Eigen::MatrixXd(omega / s.lambda_min_nonzero);  // lower bound at I
  };

  // Heuristic warm starts; the bisection can only improve on the best one.
  Eigen::MatrixXd best = normalized_candidate(laplacian(g));
  double best_cond = condition_of(best);
  {
    const Eigen::MatrixXd metro =
        normalized_candidate(heuristic_weights(g, WeightScheme::kMetropolis).matrix);
    const double c = condition_of(metro);
    if (c < best_cond) {
      best = metro;
      best_cond = c;
    }
  }

  double lo = 1.0, hi = best_cond;
  bool converged = true;
  for (int iter = 0; iter < 40 && hi - lo > 1e-4 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    Feasibility f = solve_feasibility(mid, best, allowed, kernel_proj,
                                      range_basis);
    if (f.feasible) {
      const double c = condition_of(f.omega);
      if (c < best_cond) {
        best = f.omega;
        best_cond = c;
      }
      hi = std::min(mid, best_cond);
    } else {
      lo = mid;
    }
  }

  // recover w and rescale so lambda_n(WH) = 1
  const SpectralSummary spec = summarize_spectrum(sym_eigenvalues(best));
  Eigen::MatrixXd w = h_inv_sqrt.asDiagonal() *
                      Eigen::MatrixXd(best / spec.lambda_max) *
                      h_inv_sqrt.asDiagonal();
  SdpWeightResult result{WeightMatrix{std::move(w), g, 1, WeightScheme::kSdp},
                         best_cond, converged};
  return result;
}

void write_sdp_export(const Graph& g, const Eigen::VectorXd& h_diag,
                      std::ostream& out) {
  if (h_diag.size() != g.num_vertices())
    throw std::invalid_argument("H dimension mismatch");
  out << "# weight-design export v1\n";
  out << "# minimize t  s.t.  I <= P' H^{1/2} w H^{1/2} P <= t I,\n";
  out << "#   H^{1/2} w H^{1/2} graph-sparse,  H^{1/2} w H^{1/2} V = 0\n";
  out << "n " << g.num_vertices() << "\n";
  out << "edges " << g.num_edges() << "\n";
  for (const auto& [v, w] : g.edges()) out << v << ' ' << w << '\n';
  out << "h";
  out.precision(17);
  for (Eigen::Index i = 0; i < h_diag.size(); ++i) out << ' ' << h_diag(i);
  out << '\n';
  const Eigen::VectorXd v_dir =
      h_diag.array().rsqrt().matrix().normalized();
  out << "kernel";
  for (Eigen::Index i = 0; i < v_dir.size(); ++i) out << ' ' << v_dir(i);
  out << '\n';
}

void write_dense_matrix(const Eigen::MatrixXd& m, std::ostream& out) {
  out << m.rows() << ' ' << m.cols() << '\n';
  out.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out << (j ? " " : "") << m(i, j);
    out << '\n';
  }
}

Eigen::MatrixXd read_dense_matrix(std::istream& in) {
  Eigen::Index rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 1 || cols < 1)
    throw std::runtime_error("dense matrix: bad header");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      if (!(in >> m(i, j))) throw std::runtime_error("dense matrix: truncated");
  return m;
}

}  // namespace mstep
