#pragma once

#include <Eigen/Dense>

namespace mstep {

/// Eigenvalues of a PSD-like matrix, split into the structural zeros and the
/// nonzero part that drives step-size tuning.
struct SpectralSummary {
  Eigen::VectorXd eigenvalues;   // ascending
  int zero_count = 0;            // m
  double lambda_min_nonzero = 0; // eigenvalue m+1
  double lambda_max = 0;         // eigenvalue n
};

/// All eigenvalues of a symmetric matrix, ascending. The input is symmetrized
/// as (M + M^T)/2; asymmetry beyond 1e-10 (relative) is rejected.
Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& m);

/// An eigenvalue counts as zero when |lambda| <= 1e-9 * max(1, lambda_max).
SpectralSummary summarize_spectrum(const Eigen::VectorXd& ascending);

/// Spectrum of W H as the similar symmetric product H^{1/2} W H^{1/2}.
/// H is given by its (strictly positive) diagonal.
SpectralSummary wh_spectrum(const Eigen::MatrixXd& w,
                            const Eigen::VectorXd& h_diag);

/// 2n x 2n linearization [[B, -beta I], [I, 0]] with B = (1+beta)I - alpha W H.
Eigen::MatrixXd gamma_matrix(const Eigen::MatrixXd& w,
                             const Eigen::VectorXd& h_diag, double alpha,
                             double beta);

/// Maximum eigenvalue modulus of Gamma after discarding the
/// structural_units eigenvalues closest to 1. Each discarded eigenvalue must
/// lie within 1e-8 of 1, otherwise the claimed kernel dimension is wrong.
double gamma_convergence_factor(const Eigen::MatrixXd& gamma,
                                int structural_units);

/// Same quantity computed from the curvature-weighted spectrum instead of a
/// dense solve on the assembled 2n x 2n matrix: each eigenvalue lambda of
/// W H contributes the root moduli of mu^2 - (1 + beta - alpha*lambda) mu +
/// beta.  At the optimal tuning the assembled matrix has defective double
/// roots where dense nonsymmetric eigensolvers lose about half their digits;
/// this path stays accurate because the symmetric eigenproblem is
/// well-conditioned and the roots are exact functions of lambda.
double gamma_convergence_factor(const Eigen::MatrixXd& w,
                                const Eigen::VectorXd& h_diag, double alpha,
                                double beta, int structural_units);

}  // namespace mstep
