#include "mstep/problems.hpp"

#include "mstep/spectral.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mstep {

namespace {

double softplus(double z) { return z > 30.0 ? z : std::log1p(std::exp(z)); }

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Solve g(x) = target for strictly increasing g with slope >= slope_lo.
// Bracket expansion, bisection, then Newton polish.
double solve_increasing(const ScalarFn& g, const ScalarFn& dg, double target,
                        double slope_lo) {
  double hi = std::abs(target) / slope_lo + 1.0;
  double lo = -hi;
  for (int i = 0; g(hi) < target; ++i) {
    if (i >= 200) throw std::runtime_error("root bracket expansion failed");
    hi *= 2.0;
  }
  for (int i = 0; g(lo) > target; ++i) {
    if (i >= 200) throw std::runtime_error("root bracket expansion failed");
    lo *= 2.0;
  }
  for (int i = 0; i < 80 && hi - lo > 1e-3 * (1.0 + std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < target ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 100; ++i) {
    const double step = (g(x) - target) / dg(x);
    double next = x - step;
    if (next < lo || next > hi) next = 0.5 * (lo + hi);  // safeguard
    (g(next) < target ? lo : hi) = next;
    if (std::abs(next - x) <= 1e-12 * (1.0 + std::abs(next))) return next;
    x = next;
  }
  return x;
}

}  // namespace

double SeparableObjective::value_at(const Eigen::VectorXd& x) const {
  double sum = 0.0;
  for (int v = 0; v < n; ++v) sum += value[static_cast<size_t>(v)](x(v));
  return sum;
}

Eigen::VectorXd SeparableObjective::gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g(n);
  for (int v = 0; v < n; ++v) g(v) = grad[static_cast<size_t>(v)](x(v));
  return g;
}

Eigen::VectorXd SeparableObjective::hessian_diag(const Eigen::VectorXd& x) const {
  Eigen::VectorXd h(n);
  for (int v = 0; v < n; ++v) h(v) = hess[static_cast<size_t>(v)](x(v));
  return h;
}

EqualityConstraint::EqualityConstraint(Eigen::MatrixXd a, Eigen::VectorXd rhs)
    : A(std::move(a)), b(std::move(rhs)) {
  if (A.rows() != b.size())
    throw std::invalid_argument("constraint dimension mismatch");
  const Eigen::VectorXd x_ls = A.colPivHouseholderQr().solve(b);
  if ((b - A * x_ls).norm() > 1e-8 * std::max(1.0, b.norm()))
    throw std::invalid_argument("b does not lie in range(A)");
}

ResourceProblem resource_allocation_objective(const Eigen::VectorXd& a,
                                              const Eigen::VectorXd& b,
                                              const Eigen::VectorXd& c,
                                              const Eigen::VectorXd& d,
                                              double x_tot) {
  const int n = static_cast<int>(a.size());
  if (b.size() != n || c.size() != n || d.size() != n)
    throw std::invalid_argument("parameter vectors must have equal length");
  if ((a.array() <= 0.0).any())
    throw std::invalid_argument("quadratic coefficients a_v must be positive");

  SeparableObjective obj;
  obj.n = n;
  obj.curvature_lo = 2.0 * a;
  obj.curvature_hi = 2.0 * a + b.array().square().matrix() / 4.0;
  for (int v = 0; v < n; ++v) {
    const double av = a(v), bv = b(v), cv = c(v), dv = d(v);
    obj.value.emplace_back([av, bv, cv, dv](double x) {
      return av * (x - cv) * (x - cv) + softplus(bv * x - dv);
    });
    obj.grad.emplace_back([av, bv, cv, dv](double x) {
      return 2.0 * av * (x - cv) + bv * logistic(bv * x - dv);
    });
    obj.hess.emplace_back([av, bv, dv](double x) {
      const double s = logistic(bv * x - dv);
      return 2.0 * av + bv * bv * s * (1.0 - s);
    });
  }
  if ((b.array() == 0.0).all()) {
    // KKT in closed form: x_v = c_v + mu / (2 a_v) with mu fixing the budget.
    const double inv_sum = (0.5 / a.array()).sum();
    const double mu = (x_tot - c.sum()) / inv_sum;
    obj.known_optimum = c.array() + 0.5 * mu / a.array();
  }
  Eigen::MatrixXd row = Eigen::MatrixXd::Ones(1, n);
  Eigen::VectorXd rhs(1);
  rhs << x_tot;
  return ResourceProblem{std::move(obj), EqualityConstraint(row, rhs)};
}

SeparableObjective averaging_objective(const Eigen::VectorXd& c) {
  const int n = static_cast<int>(c.size());
  SeparableObjective obj;
  obj.n = n;
  obj.curvature_lo = Eigen::VectorXd::Ones(n);
  obj.curvature_hi = Eigen::VectorXd::Ones(n);
  for (int v = 0; v < n; ++v) {
    const double cv = c(v);
    obj.value.emplace_back([cv](double x) { return 0.5 * (x - cv) * (x - cv); });
    obj.grad.emplace_back([cv](double x) { return x - cv; });
    obj.hess.emplace_back([](double) { return 1.0; });
  }
  obj.known_optimum = Eigen::VectorXd::Constant(n, c.mean());
  return obj;
}

Eigen::VectorXd conjugate_gradient_inverse(const SeparableObjective& obj,
                                           const Eigen::VectorXd& z) {
  if (z.size() != obj.n) throw std::invalid_argument("dimension mismatch");
  if (obj.l() <= 0.0)
    throw std::invalid_argument("gradient inverse needs l_v > 0");
  Eigen::VectorXd x(obj.n);
  for (int v = 0; v < obj.n; ++v) {
    const auto sv = static_cast<size_t>(v);
    x(v) = solve_increasing(obj.grad[sv], obj.hess[sv], z(v),
                            obj.curvature_lo(v));
  }
  return x;
}

void validate_num_problem(const NumProblem& p) {
  const int links = p.num_links();
  const int sources = p.num_sources();
  if (links < 1 || sources < 1)
    throw std::invalid_argument("empty routing matrix");
  for (int l = 0; l < links; ++l)
    for (int s = 0; s < sources; ++s) {
      const double r = p.routing(l, s);
      if (r != 0.0 && r != 1.0)
        throw std::invalid_argument("routing entries must be 0 or 1");
    }
  if (p.capacity.size() != links)
    throw std::invalid_argument("capacity dimension mismatch");
  if (p.rate_lo.size() != sources || p.rate_hi.size() != sources)
    throw std::invalid_argument("rate bound dimension mismatch");
  if ((p.rate_lo.array() >= p.rate_hi.array()).any())
    throw std::invalid_argument("rate boxes must have positive width");
  if (!(p.curvature_lo > 0.0) || p.curvature_hi < p.curvature_lo)
    throw std::invalid_argument("utility curvature bounds invalid");
  // Every link needs a source whose flow traverses only that link.
  for (int l = 0; l < links; ++l) {
    bool found = false;
    for (int s = 0; s < sources && !found; ++s)
      found = p.routing(l, s) == 1.0 && p.routing.col(s).sum() == 1.0;
    if (!found)
      throw std::invalid_argument(
          "link " + std::to_string(l + 1) + " has no single-link flow");
  }
}

NumProblem quadratic_num_problem(Eigen::MatrixXd routing,
                                 Eigen::VectorXd capacity,
                                 Eigen::VectorXd rate_lo,
                                 Eigen::VectorXd rate_hi) {
  NumProblem p;
  p.routing = std::move(routing);
  p.capacity = std::move(capacity);
  p.rate_lo = std::move(rate_lo);
  p.rate_hi = std::move(rate_hi);
  p.curvature_lo = 1.0;
  p.curvature_hi = 1.0;
  for (int s = 0; s < p.num_sources(); ++s) {
    const double hi = p.rate_hi(s);
    p.utility.emplace_back([hi](double z) { return -0.5 * (hi - z) * (hi - z); });
    p.utility_grad.emplace_back([hi](double z) { return hi - z; });
    p.utility_hess.emplace_back([](double) { return -1.0; });
  }
  validate_num_problem(p);
  return p;
}

RoutingFile read_routing(std::istream& in) {
  int links = 0, sources = 0;
  if (!(in >> links >> sources)) throw std::runtime_error("routing: bad header");
  if (links < 1 || sources < 1) throw std::runtime_error("routing: bad dims");
  RoutingFile f;
  f.routing.resize(links, sources);
  for (int l = 0; l < links; ++l)
    for (int s = 0; s < sources; ++s)
      if (!(in >> f.routing(l, s)))
        throw std::runtime_error("routing: truncated matrix");
  f.capacity.resize(links);
  for (int l = 0; l < links; ++l)
    if (!(in >> f.capacity(l)))
      throw std::runtime_error("routing: missing capacities");
  return f;
}

void write_routing(const Eigen::MatrixXd& routing,
                   const Eigen::VectorXd& capacity, std::ostream& out) {
  out << routing.rows() << ' ' << routing.cols() << '\n';
  for (Eigen::Index l = 0; l < routing.rows(); ++l) {
    for (Eigen::Index s = 0; s < routing.cols(); ++s)
      out << (s ? " " : "") << routing(l, s);
    out << '\n';
  }
  for (Eigen::Index l = 0; l < capacity.size(); ++l)
    out << (l ? " " : "") << capacity(l);
  out << '\n';
}

DualGradient num_dual_gradient(const NumProblem& p, const Eigen::VectorXd& mu) {
  if (mu.size() != p.num_links())
    throw std::invalid_argument("multiplier dimension mismatch");
  if (!(p.curvature_lo > 0.0))
    throw std::runtime_error("utility maximizer is not unique (l = 0)");
  const Eigen::VectorXd q = p.routing.transpose() * mu;
  Eigen::VectorXd x(p.num_sources());
  for (int s = 0; s < p.num_sources(); ++s) {
    const auto ss = static_cast<size_t>(s);
    const double lo = p.rate_lo(s), hi = p.rate_hi(s);
    // u_s' is strictly decreasing; the maximizer of u_s(z) - z q_s solves
    // u_s'(z) = q_s, clipped to the rate box.
    if (p.utility_grad[ss](lo) <= q(s)) {
      x(s) = lo;
    } else if (p.utility_grad[ss](hi) >= q(s)) {
      x(s) = hi;
    } else {
      const auto& du = p.utility_grad[ss];
      const auto& d2u = p.utility_hess[ss];
      // -u_s' is strictly increasing with slope >= l
      x(s) = solve_increasing([&](double z) { return -du(z); },
                              [&](double z) { return -d2u(z); }, -q(s),
                              p.curvature_lo);
    }
  }
  return DualGradient{x, p.routing * x - p.capacity};
}

double num_dual_value(const NumProblem& p, const Eigen::VectorXd& mu) {
  const DualGradient dg = num_dual_gradient(p, mu);
  const Eigen::VectorXd q = p.routing.transpose() * mu;
  double d = mu.dot(p.capacity);
  for (int s = 0; s < p.num_sources(); ++s)
    d += p.utility[static_cast<size_t>(s)](dg.primal(s)) - dg.primal(s) * q(s);
  // Return the concave objective the ascent climbs, so that the vector
  // produced by num_dual_gradient is its exact gradient.
  return -d;
}

DualCurvature quadratic_dual_curvature(const Eigen::MatrixXd& A,
                                       const Eigen::MatrixXd& Q) {
  if (A.cols() != Q.rows()) throw std::invalid_argument("dimension mismatch");
  const Eigen::VectorXd q_eigs = sym_eigenvalues(Q);
  if (q_eigs(0) <= 0.0)
    throw std::invalid_argument("Q must be positive definite");
  const Eigen::MatrixXd gram = A * A.transpose();
  const Eigen::VectorXd gram_eigs = sym_eigenvalues(gram);
  if (gram_eigs(0) <= 1e-12 * std::max(1.0, gram_eigs(gram_eigs.size() - 1)))
    throw std::invalid_argument("A must have full row rank");
  const Eigen::MatrixXd dual_hess = A * Q.llt().solve(A.transpose());
  const Eigen::VectorXd dual_eigs = sym_eigenvalues(dual_hess);
  DualCurvature out;
  out.exact_lo = dual_eigs(0);
  out.exact_hi = dual_eigs(dual_eigs.size() - 1);
  out.lemma_lo = gram_eigs(0) / q_eigs(q_eigs.size() - 1);
  out.lemma_hi = gram_eigs(gram_eigs.size() - 1) / q_eigs(0);
  return out;
}

Eigen::VectorXd reference_solve(const SeparableObjective& obj,
                                const EqualityConstraint& constraint,
                                const Eigen::VectorXd& x0, double tol,
                                long max_iters) {
  const Eigen::MatrixXd& A = constraint.A;
  const Eigen::LLT<Eigen::MatrixXd> gram_llt(
      Eigen::MatrixXd(A * A.transpose()));
  // project onto the affine feasible set, then gradient-descend along it
  Eigen::VectorXd x =
      x0 + A.transpose() * gram_llt.solve(constraint.b - A * x0);
  const double step = 1.0 / obj.u();
  for (long k = 0; k < max_iters; ++k) {
    const Eigen::VectorXd g = obj.gradient(x);
    const Eigen::VectorXd pg = g - A.transpose() * gram_llt.solve(A * g);
    if (pg.norm() <= tol) break;
    x -= step * pg;
  }
  return x;
}

Eigen::VectorXd least_squares_multiplier(const SeparableObjective& obj,
                                         const EqualityConstraint& constraint,
                                         const Eigen::VectorXd& x_star) {
  const Eigen::MatrixXd& A = constraint.A;
  return (A * A.transpose()).llt().solve(A * obj.gradient(x_star));
}

}  // namespace mstep
