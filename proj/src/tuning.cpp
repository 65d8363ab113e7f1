#include "mstep/tuning.hpp"

#include "mstep/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace mstep {

namespace {

void check_bounds(double lo, double hi) {
  if (!(lo > 0.0) || !(hi >= lo))
    throw std::invalid_argument("need 0 < lambda_lo <= lambda_hi");
}

}  // namespace

TuningResult multistep_optimal(double lambda_lo, double lambda_hi) {
  check_bounds(lambda_lo, lambda_hi);
  const double sq_lo = std::sqrt(lambda_lo);
  const double sq_hi = std::sqrt(lambda_hi);
  const double sum = sq_hi + sq_lo;
  // q depends on the bounds only through their ratio: scaling both bounds by
  // a constant scales numerator and denominator alike, so the quotient is
  // invariant up to the last-bit rounding of the scaled inputs.
  const double q = (sq_hi - sq_lo) / sum;
  TuningResult t;
  t.alpha = (2.0 / sum) * (2.0 / sum);
  t.beta = q * q;
  t.predicted_q = q;
  t.lambda_lo = lambda_lo;
  t.lambda_hi = lambda_hi;
  return t;
}

TuningResult multistep_conservative(double l, double u, double lambda_w_lo,
                                    double lambda_w_hi) {
  if (!(l > 0.0) || !(u >= l))
    throw std::invalid_argument("need 0 < l <= u");
  check_bounds(lambda_w_lo, lambda_w_hi);
  return multistep_optimal(l * lambda_w_lo, u * lambda_w_hi);
}

TuningResult gradient_optimal(double lambda_lo, double lambda_hi) {
  check_bounds(lambda_lo, lambda_hi);
  TuningResult t;
  t.alpha = 2.0 / (lambda_lo + lambda_hi);
  t.beta = 0.0;
  t.predicted_q = (lambda_hi - lambda_lo) / (lambda_hi + lambda_lo);
  t.lambda_lo = lambda_lo;
  t.lambda_hi = lambda_hi;
  return t;
}

double multistep_factor(double alpha, double beta, double lambda_lo,
                        double lambda_hi) {
  check_bounds(lambda_lo, lambda_hi);
  if (!(beta >= 0.0) || !(beta < 1.0))
    throw std::invalid_argument("multistep_factor: need 0 <= beta < 1");
  if (!(alpha > 0.0) || !(alpha < 2.0 * (1.0 + beta) / lambda_hi))
    throw std::invalid_argument("multistep_factor: step sizes diverge");
  const double sq_beta = std::sqrt(beta);
  const double at_lo = std::abs(1.0 + beta - alpha * lambda_lo) - sq_beta;
  const double at_hi = std::abs(1.0 + beta - alpha * lambda_hi) - sq_beta;
  return std::max({sq_beta, at_lo, at_hi});
}

double gradient_factor(double alpha, double lambda_lo, double lambda_hi) {
  check_bounds(lambda_lo, lambda_hi);
  if (!(alpha > 0.0) || !(alpha < 2.0 / lambda_hi))
    throw std::invalid_argument("gradient_factor: step size diverges");
  return std::max(std::abs(1.0 - alpha * lambda_lo),
                  std::abs(1.0 - alpha * lambda_hi));
}

TuningResult dual_multistep_params(double l, double u, double gram_lo,
                                   double gram_hi) {
  if (!(l > 0.0) || !(u >= l))
    throw std::invalid_argument("need 0 < l <= u");
  check_bounds(gram_lo, gram_hi);
  return multistep_optimal(l * gram_lo, u * gram_hi);
}

bool stability_check(double est_lo, double est_hi, double true_hi) {
  if (!(est_lo > 0.0) || !(est_hi >= est_lo))
    throw std::invalid_argument("invalid spectral estimates");
  return true_hi < est_lo + est_hi;
}

PerturbedFactors perturbed_factors(const PerturbedBounds& bounds) {
  if (!stability_check(bounds.est_lo, bounds.est_hi, bounds.true_hi))
    throw std::invalid_argument("estimates violate the stability condition");
  check_bounds(bounds.true_lo, bounds.true_hi);
  PerturbedFactors out;
  const double est_sum = bounds.est_lo + bounds.est_hi;
  if (est_sum <= bounds.true_lo + bounds.true_hi)
    out.gradient_q = 2.0 * bounds.true_hi / est_sum - 1.0;
  else
    out.gradient_q = 1.0 - 2.0 * bounds.true_lo / est_sum;
  const TuningResult est = multistep_optimal(bounds.est_lo, bounds.est_hi);
  const double sq_beta = std::sqrt(est.beta);
  out.multistep_q = std::max(
      {sq_beta,
       std::abs(1.0 + est.beta - est.alpha * bounds.true_lo) - sq_beta,
       std::abs(1.0 + est.beta - est.alpha * bounds.true_hi) - sq_beta});
  return out;
}

bool gradient_wins_predicate(const PerturbedBounds& bounds) {
  check_bounds(bounds.true_lo, bounds.true_hi);
  if (!(bounds.eps_lo() < 0.0) || !(bounds.eps_hi() > 0.0))
    throw std::invalid_argument(
        "predicate defined only for eps_lo < 0, eps_hi > 0");
  const double cond = bounds.true_hi / bounds.true_lo;
  return bounds.est_hi / bounds.est_lo >= cond * cond;
}

ShiftRegisterTuning shift_register_zeta(double lambda_pen) {
  if (!(std::abs(lambda_pen) < 1.0))
    throw std::invalid_argument("need |lambda_pen| < 1");
  const double root = std::sqrt(1.0 - lambda_pen * lambda_pen);
  ShiftRegisterTuning t;
  t.zeta = 2.0 / (1.0 + root);
  t.predicted_q = std::sqrt((1.0 - root) / (1.0 + root));
  return t;
}

ShiftRegisterJoint shift_register_joint_optimal(const Eigen::MatrixXd& w) {
  const SpectralSummary spec = summarize_spectrum(sym_eigenvalues(w));
  if (spec.zero_count != 1)
    throw std::invalid_argument("weight matrix must have kernel dimension 1");
  const TuningResult ms =
      multistep_optimal(spec.lambda_min_nonzero, spec.lambda_max);
  ShiftRegisterJoint j;
  j.theta = 2.0 / (spec.lambda_min_nonzero + spec.lambda_max);
  j.consensus_q =
      Eigen::MatrixXd::Identity(w.rows(), w.cols()) - j.theta * w;
  j.zeta = 1.0 + ms.beta;
  j.predicted_q = std::sqrt(ms.beta);
  return j;
}

NesterovParams nesterov_consensus_params(const Eigen::MatrixXd& w) {
  const SpectralSummary spec = summarize_spectrum(sym_eigenvalues(w));
  if (spec.zero_count != 1)
    throw std::invalid_argument("weight matrix must have kernel dimension 1");
  const double sq_lo = std::sqrt(spec.lambda_min_nonzero);
  const double sq_hi = std::sqrt(spec.lambda_max);
  NesterovParams p;
  p.step = 1.0 / spec.lambda_max;
  p.momentum = (sq_hi - sq_lo) / (sq_hi + sq_lo);
  return p;
}

NumBounds num_bounds(const Eigen::MatrixXd& routing) {
  const auto links = routing.rows();
  const auto sources = routing.cols();
  if (links < 1 || sources < 1)
    throw std::invalid_argument("empty routing matrix");
  for (Eigen::Index l = 0; l < links; ++l) {
    bool found = false;
    for (Eigen::Index s = 0; s < sources; ++s) {
      const double r = routing(l, s);
      if (r != 0.0 && r != 1.0)
        throw std::invalid_argument("routing entries must be 0 or 1");
      if (r == 1.0 && routing.col(s).sum() == 1.0) found = true;
    }
    if (!found)
      throw std::invalid_argument("every link needs a single-link flow");
  }
  NumBounds b;
  b.longest_route = static_cast<int>(routing.colwise().sum().maxCoeff());
  b.busiest_link = static_cast<int>(routing.rowwise().sum().maxCoeff());
  b.gram_lo = 1.0;
  b.gram_hi = static_cast<double>(b.longest_route) * b.busiest_link;
  return b;
}

TuningResult num_params(const Eigen::MatrixXd& routing, double l, double u) {
  if (!(l > 0.0) || !(u >= l))
    throw std::invalid_argument("need 0 < l <= u");
  const NumBounds b = num_bounds(routing);
  return dual_multistep_params(l, u, b.gram_lo, b.gram_hi);
}

}  // namespace mstep
