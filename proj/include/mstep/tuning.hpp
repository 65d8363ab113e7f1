#pragma once

#include <Eigen/Dense>

namespace mstep {

/// Step sizes with the convergence factor they guarantee and the spectral
/// bounds they were derived from.
struct TuningResult {
  double alpha = 0;
  double beta = 0;  // 0 for the one-step gradient method
  double predicted_q = 0;
  double lambda_lo = 0;
  double lambda_hi = 0;
};

/// Spectral-bound estimates alongside the true values, for robustness
/// analysis. Perturbations: eps_lo = est_lo - true_lo, eps_hi = est_hi -
/// true_hi.
struct PerturbedBounds {
  double est_lo = 0;   // lambda-tilde
  double est_hi = 0;   // lambda-hat
  double true_lo = 0;  // lambda-underbar
  double true_hi = 0;  // lambda-overbar

  double eps_lo() const { return est_lo - true_lo; }
  double eps_hi() const { return est_hi - true_hi; }
};

/// Optimal heavy-ball step sizes for nonzero WH spectrum in
/// [lambda_lo, lambda_hi]:
///   alpha* = (2 / (sqrt(hi) + sqrt(lo)))^2,
///   beta*  = q*^2,  q* = (sqrt(hi) - sqrt(lo)) / (sqrt(hi) + sqrt(lo)).
TuningResult multistep_optimal(double lambda_lo, double lambda_hi);

/// Heavy-ball tuning from curvature bounds l, u and the W spectrum alone
/// (bounds l*lambda_W_lo, u*lambda_W_hi sandwich the true WH spectrum).
TuningResult multistep_conservative(double l, double u, double lambda_w_lo,
                                    double lambda_w_hi);

/// Optimal one-step tuning: alpha = 2/(lo+hi), q = (hi-lo)/(hi+lo).
TuningResult gradient_optimal(double lambda_lo, double lambda_hi);

/// Guaranteed heavy-ball factor at given (alpha, beta):
///   max{ sqrt(beta), |1+beta-alpha*lo| - sqrt(beta),
///        |1+beta-alpha*hi| - sqrt(beta) }.
/// Throws outside the stability region 0 <= beta < 1,
/// 0 < alpha < 2(1+beta)/hi.
double multistep_factor(double alpha, double beta, double lambda_lo,
                        double lambda_hi);

/// One-step factor max{|1-alpha*lo|, |1-alpha*hi|}; requires
/// 0 < alpha < 2/hi.
double gradient_factor(double alpha, double lambda_lo, double lambda_hi);

/// Dual-ascent heavy-ball tuning from primal curvature bounds (l, u) and the
/// constraint Gram spectrum [lambda_1(AA^T), lambda_n(AA^T)].
TuningResult dual_multistep_params(double l, double u, double gram_lo,
                                   double gram_hi);

/// Both tuned methods converge whenever true_hi < est_lo + est_hi.
bool stability_check(double est_lo, double est_hi, double true_hi);

struct PerturbedFactors {
  double gradient_q = 0;   // q-tilde_G
  double multistep_q = 0;  // q-tilde
};

/// Convergence factors when step sizes are tuned from misestimated bounds.
/// Throws when the estimates fail stability_check.
PerturbedFactors perturbed_factors(const PerturbedBounds& bounds);

/// True on the fourth-quadrant perturbations (eps_lo < 0, eps_hi > 0) where
/// the tuned gradient method beats the tuned heavy-ball method:
///   est_hi / est_lo >= (true_hi / true_lo)^2.
/// Outside the fourth quadrant the predicate is undefined and throws.
bool gradient_wins_predicate(const PerturbedBounds& bounds);

struct ShiftRegisterTuning {
  double zeta = 0;
  double predicted_q = 0;
};

/// Optimal two-tap coefficient for a fixed consensus matrix Q whose
/// second-largest eigenvalue modulus is lambda_pen:
///   zeta* = 2 / (1 + sqrt(1 - lambda_pen^2)),
///   q*    = sqrt((1 - sqrt(1 - lambda_pen^2)) / (1 + sqrt(1 - lambda_pen^2))).
ShiftRegisterTuning shift_register_zeta(double lambda_pen);

struct ShiftRegisterJoint {
  Eigen::MatrixXd consensus_q;  // Q* = I - theta* W
  double theta = 0;
  double zeta = 0;   // 1 + beta*
  double predicted_q = 0;  // sqrt(beta*)
};

/// Jointly optimal shift-register weights and coefficient built from a PSD
/// weight matrix with one-dimensional kernel.
ShiftRegisterJoint shift_register_joint_optimal(const Eigen::MatrixXd& w);

struct NesterovParams {
  double step = 0;      // a = 1/lambda_n(W)
  double momentum = 0;  // b
};

NesterovParams nesterov_consensus_params(const Eigen::MatrixXd& w);

struct NumBounds {
  double gram_lo = 1.0;        // 1 <= lambda_1(R R^T)
  double gram_hi = 0;          // l_max * s_max >= lambda_L(R R^T)
  int longest_route = 0;       // l_max
  int busiest_link = 0;        // s_max
};

/// Routing-only Gram bounds; requires every link to carry a single-link flow.
NumBounds num_bounds(const Eigen::MatrixXd& routing);

/// Dual heavy-ball tuning for NUM from curvature bounds and num_bounds.
TuningResult num_params(const Eigen::MatrixXd& routing, double l, double u);

}  // namespace mstep
