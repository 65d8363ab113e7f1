#pragma once

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mstep {

using ScalarFn = std::function<double(double)>;

/// Sum of per-node losses f_v(x_v) with two-sided curvature bounds
/// l_v <= f_v'' <= u_v. Houses value, gradient and diagonal Hessian.
struct SeparableObjective {
  int n = 0;
  std::vector<ScalarFn> value;
  std::vector<ScalarFn> grad;
  std::vector<ScalarFn> hess;
  Eigen::VectorXd curvature_lo;  // l_v
  Eigen::VectorXd curvature_hi;  // u_v
  /// Optimizer of the constrained problem when it has a closed form.
  std::optional<Eigen::VectorXd> known_optimum;

  double l() const { return curvature_lo.minCoeff(); }
  double u() const { return curvature_hi.maxCoeff(); }

  double value_at(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  Eigen::VectorXd hessian_diag(const Eigen::VectorXd& x) const;
};

/// Ax = b with b required to lie in range(A).
struct EqualityConstraint {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;

  EqualityConstraint(Eigen::MatrixXd a, Eigen::VectorXd rhs);
  double residual(const Eigen::VectorXd& x) const { return (A * x - b).norm(); }
};

struct ResourceProblem {
  SeparableObjective objective;
  EqualityConstraint constraint;
};

/// Per-node losses a_v (x - c_v)^2 + log(1 + exp(b_v x - d_v)) under the
/// budget constraint 1^T x = x_tot. Curvature bounds: l_v = 2 a_v,
/// u_v = 2 a_v + b_v^2 / 4.
ResourceProblem resource_allocation_objective(const Eigen::VectorXd& a,
                                              const Eigen::VectorXd& b,
                                              const Eigen::VectorXd& c,
                                              const Eigen::VectorXd& d,
                                              double x_tot);

/// f_v(x) = (x - c_v)^2 / 2; the consensus-constrained optimum is mean(c) 1.
SeparableObjective averaging_objective(const Eigen::VectorXd& c);

/// Componentwise solve of grad f_v(x_v) = z_v (each grad f_v is strictly
/// increasing since l_v > 0). Safeguarded bisection + Newton, tol 1e-12.
Eigen::VectorXd conjugate_gradient_inverse(const SeparableObjective& obj,
                                           const Eigen::VectorXd& z);

/// Network utility maximization instance: maximize sum_s u_s(x_s) subject to
/// R x <= c and box bounds, with the link constraints active at optimum.
struct NumProblem {
  Eigen::MatrixXd routing;   // L x S, entries in {0,1}
  Eigen::VectorXd capacity;  // L
  std::vector<ScalarFn> utility;
  std::vector<ScalarFn> utility_grad;
  std::vector<ScalarFn> utility_hess;
  Eigen::VectorXd rate_lo;  // m_s
  Eigen::VectorXd rate_hi;  // M_s
  double curvature_lo = 0;  // l: 0 < l <= -u_s'' <= u
  double curvature_hi = 0;

  int num_links() const { return static_cast<int>(routing.rows()); }
  int num_sources() const { return static_cast<int>(routing.cols()); }
};

/// Validates the 0/1 pattern and the single-link-flow requirement (every link
/// has a source traversing only that link). Throws on violation.
void validate_num_problem(const NumProblem& p);

/// Quadratic utilities u_s(z) = -(M_s - z)^2 / 2 (l = u = 1).
NumProblem quadratic_num_problem(Eigen::MatrixXd routing,
                                 Eigen::VectorXd capacity,
                                 Eigen::VectorXd rate_lo,
                                 Eigen::VectorXd rate_hi);

/// Routing-matrix text format: "L S", then L rows of 0/1, then a line of L
/// capacities.
struct RoutingFile {
  Eigen::MatrixXd routing;
  Eigen::VectorXd capacity;
};
RoutingFile read_routing(std::istream& in);
void write_routing(const Eigen::MatrixXd& routing,
                   const Eigen::VectorXd& capacity, std::ostream& out);

struct DualGradient {
  Eigen::VectorXd primal;    // x*(mu), per source
  Eigen::VectorXd gradient;  // R x*(mu) - c, per link
};

/// Source response (26) plus the dual ascent direction (27).
DualGradient num_dual_gradient(const NumProblem& p, const Eigen::VectorXd& mu);

/// Concave dual objective of the NUM problem at mu (the negated price dual;
/// the inner maximization is evaluated exactly).  The vector returned by
/// num_dual_gradient is its exact gradient wherever the inner maximizers are
/// unique, which makes this a finite-difference oracle for tests.
double num_dual_value(const NumProblem& p, const Eigen::VectorXd& mu);

struct DualCurvature {
  double exact_lo = 0;  // lambda_1(A Q^-1 A^T)
  double exact_hi = 0;
  double lemma_lo = 0;  // lambda_1(A A^T) / lambda_n(Q)
  double lemma_hi = 0;
};

/// Exact dual curvature of the quadratic program min x^T Q x / 2 s.t. Ax=b,
/// side by side with the generic primal-data bounds.
DualCurvature quadratic_dual_curvature(const Eigen::MatrixXd& A,
                                       const Eigen::MatrixXd& Q);

/// Long-run projected-gradient reference solve for error traces; independent
/// of the accelerated iteration paths.
Eigen::VectorXd reference_solve(const SeparableObjective& obj,
                                const EqualityConstraint& constraint,
                                const Eigen::VectorXd& x0,
                                double tol = 1e-12,
                                long max_iters = 1000000);

/// Least-squares multiplier mu* with grad f(x*) ~= A^T mu*.
Eigen::VectorXd least_squares_multiplier(const SeparableObjective& obj,
                                         const EqualityConstraint& constraint,
                                         const Eigen::VectorXd& x_star);

}  // namespace mstep
