#include "mstep/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace mstep {

Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix is not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("matrix is not symmetric within tolerance");
  Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym,
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigenvalue computation failed");
  return solver.eigenvalues();  // ascending
}

SpectralSummary summarize_spectrum(const Eigen::VectorXd& ascending) {
  const int n = static_cast<int>(ascending.size());
  if (n == 0) throw std::invalid_argument("empty spectrum");
  SpectralSummary s;
  s.eigenvalues = ascending;
  s.lambda_max = ascending(n - 1);
  const double tol = 1e-9 * std::max(1.0, std::abs(s.lambda_max));
  int m = 0;
  while (m < n && std::abs(ascending(m)) <= tol) ++m;
  if (m == n) throw std::invalid_argument("spectrum has no nonzero part");
  s.zero_count = m;
  s.lambda_min_nonzero = ascending(m);
  return s;
}

SpectralSummary wh_spectrum(const Eigen::MatrixXd& w,
                            const Eigen::VectorXd& h_diag) {
  if (w.rows() != h_diag.size())
    throw std::invalid_argument("W/H dimension mismatch");
  if ((h_diag.array() <= 0.0).any())
    throw std::invalid_argument("H must have strictly positive diagonal");
  const Eigen::VectorXd h_sqrt = h_diag.array().sqrt();
  // H^{1/2} W H^{1/2}, similar to W H but symmetric.
  Eigen::MatrixXd sandwich =
      h_sqrt.asDiagonal() * w * h_sqrt.asDiagonal();
  return summarize_spectrum(sym_eigenvalues(sandwich));
}

Eigen::MatrixXd gamma_matrix(const Eigen::MatrixXd& w,
                             const Eigen::VectorXd& h_diag, double alpha,
                             double beta) {
  if (w.rows() != w.cols() || w.rows() != h_diag.size())
    throw std::invalid_argument("W/H dimension mismatch");
  if (alpha <= 0.0) throw std::invalid_argument("alpha must be positive");
  if (beta < 0.0) throw std::invalid_argument("beta must be nonnegative");
  const auto n = w.rows();
  Eigen::MatrixXd b = -alpha * (w * h_diag.asDiagonal());
  b.diagonal().array() += 1.0 + beta;
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  gamma.topLeftCorner(n, n) = b;
  gamma.topRightCorner(n, n) = -beta * Eigen::MatrixXd::Identity(n, n);
  gamma.bottomLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  return gamma;
}

namespace {

// If the matrix has the block form [[B, -beta I], [I, 0]] produced by
// gamma_matrix, its eigenvalues are the roots of mu^2 - b mu + beta = 0 for
// each eigenvalue b of the n x n block B.  Going through B and the quadratic
// formula is far more accurate than a dense solve on the full matrix: at the
// optimal momentum tuning the iteration matrix has defective double roots,
// where dense nonsymmetric eigensolvers lose about half their digits.
bool companion_eigenvalues(const Eigen::MatrixXd& gamma,
                           Eigen::VectorXcd* out) {
  const auto m = gamma.rows();
  if (m % 2 != 0) return false;
  const auto n = m / 2;
  if (!gamma.bottomLeftCorner(n, n).isIdentity(0.0)) return false;
  if (!gamma.bottomRightCorner(n, n).isZero(0.0)) return false;
  const Eigen::MatrixXd tr = gamma.topRightCorner(n, n);
  if (!tr.isDiagonal(0.0)) return false;
  const double beta = -tr(0, 0);
  if (beta < 0.0) return false;
  for (Eigen::Index i = 1; i < n; ++i)
    if (tr(i, i) != tr(0, 0)) return false;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(gamma.topLeftCorner(n, n),
                                             /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigenvalue computation failed");
  out->resize(m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::complex<double> b = solver.eigenvalues()(i);
    const std::complex<double> disc = std::sqrt(b * b - 4.0 * beta);
    (*out)(2 * i) = 0.5 * (b + disc);
    (*out)(2 * i + 1) = 0.5 * (b - disc);
  }
  return true;
}

}  // namespace

double gamma_convergence_factor(const Eigen::MatrixXd& gamma,
                                int structural_units) {
  if (gamma.rows() != gamma.cols())
    throw std::invalid_argument("Gamma is not square");
  if (structural_units < 0)
    throw std::invalid_argument("negative unit-eigenvalue count");
  Eigen::VectorXcd eigs;
  if (!companion_eigenvalues(gamma, &eigs)) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(gamma,
                                               /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("eigenvalue computation failed");
    eigs = solver.eigenvalues();
  }
  std::vector<int> order(static_cast<size_t>(eigs.size()));
  std::iota(order.begin(), order.end(), 0);
  // drop the structural_units eigenvalues closest to 1
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(eigs(a) - 1.0) < std::abs(eigs(b) - 1.0);
  });
  if (structural_units > static_cast<int>(order.size()))
    throw std::invalid_argument("more structural units than eigenvalues");
  for (int i = 0; i < structural_units; ++i) {
    if (std::abs(eigs(order[static_cast<size_t>(i)]) - 1.0) > 1e-8)
      throw std::runtime_error(
          "claimed kernel dimension exceeds unit eigenvalues of Gamma");
  }
  double radius = 0.0;
  for (size_t i = static_cast<size_t>(structural_units); i < order.size(); ++i)
    radius = std::max(radius, std::abs(eigs(order[i])));
  return radius;
}

double gamma_convergence_factor(const Eigen::MatrixXd& w,
                                const Eigen::VectorXd& h_diag, double alpha,
                                double beta, int structural_units) {
  if (alpha <= 0.0) throw std::invalid_argument("alpha must be positive");
  if (beta < 0.0) throw std::invalid_argument("beta must be nonnegative");
  if (structural_units < 0)
    throw std::invalid_argument("negative unit-eigenvalue count");
  if ((h_diag.array() <= 0.0).any())
    throw std::invalid_argument("H must have strictly positive diagonal");
  const Eigen::VectorXd h_sqrt = h_diag.array().sqrt();
  const Eigen::MatrixXd sandwich =
      h_sqrt.asDiagonal() * w * h_sqrt.asDiagonal();
  const Eigen::VectorXd lambdas = sym_eigenvalues(sandwich);  // ascending
  if (structural_units > lambdas.size())
    throw std::invalid_argument("more structural units than eigenvalues");
  const double tol = 1e-8 * std::max(1.0, lambdas.cwiseAbs().maxCoeff());
  double radius = 0.0;
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
    if (i < structural_units) {
      if (std::abs(lambdas(i)) > tol)
        throw std::runtime_error(
            "claimed kernel dimension exceeds zero eigenvalues of W H");
      // lambda = 0 contributes roots {1, beta}; the unit root is the
      // structural mode, the other one still counts toward the radius
      radius = std::max(radius, beta);
      continue;
    }
    const double b = 1.0 + beta - alpha * lambdas(i);
    const double disc = b * b - 4.0 * beta;
    // A discriminant within rounding of zero is a double root.  At the
    // optimal tuning it is exactly zero in real arithmetic but lands a few
    // ulps to either side in floating point, and sqrt would amplify that to
    // ~1e-8; snapping to the double root keeps the radius fully accurate.
    const double modulus = disc <= 1e-12 * std::max(b * b, 4.0 * beta)
                               ? std::sqrt(beta)
                               : 0.5 * (std::abs(b) + std::sqrt(disc));
    radius = std::max(radius, modulus);
  }
  return radius;
}

}  // namespace mstep
