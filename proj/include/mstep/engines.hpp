#pragma once

#include "mstep/problems.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mstep {

enum class StopReason { kTolerance, kMaxIters, kDivergence };

std::string to_string(StopReason reason);

/// Per-iteration record of a run. Iterates are stored up to a cap of 1e5
/// vectors; norms are always kept.
struct IterateTrace {
  std::vector<Eigen::VectorXd> iterates;
  std::vector<double> error_norms;          // filled when an oracle is supplied
  std::vector<double> feasibility_residuals;  // filled when a constraint is known
  std::vector<double> step_norms;
  long k_stop = 0;
  StopReason stop_reason = StopReason::kMaxIters;

  const Eigen::VectorXd& last() const { return iterates.back(); }
};

struct RunOptions {
  long max_iters = 10000;
  double tol = 1e-10;  // on the step norm
  std::optional<Eigen::VectorXd> oracle;  // x* for error traces
  const EqualityConstraint* constraint = nullptr;  // for residual traces
};

/// x(k+1) = x(k) - alpha W grad f(x(k)); x0 must satisfy the constraint when
/// one is supplied (within 1e-9 relative).
IterateTrace run_weighted_gradient(const SeparableObjective& obj,
                                   const Eigen::MatrixXd& w, double alpha,
                                   const Eigen::VectorXd& x0,
                                   const RunOptions& opts);

/// Heavy-ball variant with x(-1) = x(0).
IterateTrace run_multistep(const SeparableObjective& obj,
                           const Eigen::MatrixXd& w, double alpha, double beta,
                           const Eigen::VectorXd& x0, const RunOptions& opts);

struct DualTrace {
  IterateTrace dual;    // multiplier iterates
  IterateTrace primal;  // recovered source rates x*(mu(k))
};

/// Dual ascent with momentum on the NUM problem; beta = 0 recovers the
/// plain price update.
DualTrace run_dual_multistep(const NumProblem& p, double alpha, double beta,
                             const Eigen::VectorXd& mu0,
                             const RunOptions& opts);

/// Dual ascent with momentum for the equality-constrained separable problem;
/// primal iterates come from the gradient inverse at A^T mu.
DualTrace run_dual_multistep(const SeparableObjective& obj,
                             const EqualityConstraint& constraint, double alpha,
                             double beta, const Eigen::VectorXd& mu0,
                             const RunOptions& opts);

/// x(k+1) = Q x(k); requires Q 1 = 1 (within 1e-9). Errors are measured
/// against mean(x0) 1 unless an oracle is supplied.
IterateTrace run_consensus(const Eigen::MatrixXd& q, const Eigen::VectorXd& x0,
                           const RunOptions& opts);

/// x(k+1) = zeta Q x(k) + (1 - zeta) x(k-1), x(-1) = x(0).
IterateTrace run_shift_register(const Eigen::MatrixXd& q, double zeta,
                                const Eigen::VectorXd& x0,
                                const RunOptions& opts);

/// x(k+1) = (I - a W)(x(k) + b (x(k) - x(k-1))), x(-1) = x(0).
IterateTrace run_nesterov_consensus(const Eigen::MatrixXd& w, double a,
                                    double b, const Eigen::VectorXd& x0,
                                    const RunOptions& opts);

struct FactorEstimate {
  double q = 0;
  bool exact = false;     // error hit the numerical floor immediately
  bool diverged = false;
};

/// Least-squares slope of log(error) over the last half of the
/// above-floor (1e-13) iterations, exponentiated.
FactorEstimate estimate_convergence_factor(const IterateTrace& trace);

/// CSV export: columns k, error_norm, feasibility_residual, step_norm.
void write_trace_csv(const IterateTrace& trace, std::ostream& out);

}  // namespace mstep
