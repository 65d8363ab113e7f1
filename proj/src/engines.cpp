#include "mstep/engines.hpp"

#include "mstep/kernels.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace mstep {

namespace {

constexpr double kDivergenceThreshold = 1e12;
constexpr long kIterateCap = 100000;

struct Recorder {
  IterateTrace trace;
  const std::optional<Eigen::VectorXd>* oracle = nullptr;
  const EqualityConstraint* constraint = nullptr;

  void record(const Eigen::VectorXd& x, double step_norm) {
    if (static_cast<long>(trace.iterates.size()) < kIterateCap)
      trace.iterates.push_back(x);
    trace.step_norms.push_back(step_norm);
    if (oracle && oracle->has_value())
      trace.error_norms.push_back((x - **oracle).norm());
    if (constraint)
      trace.feasibility_residuals.push_back(constraint->residual(x));
  }

  bool diverged(const Eigen::VectorXd& x) const {
    return !x.allFinite() || x.norm() > kDivergenceThreshold;
  }
};

void check_feasible_start(const Eigen::VectorXd& x0,
                          const EqualityConstraint* constraint) {
  if (constraint &&
      constraint->residual(x0) > 1e-9 * (1.0 + constraint->b.norm()))
    throw std::invalid_argument("x0 violates the equality constraint");
}

Eigen::VectorXd apply(const Eigen::MatrixXd& m, const Eigen::VectorXd& x) {
  Eigen::VectorXd y(m.rows());
  kernels::matvec(m.data(), static_cast<std::size_t>(m.rows()),
                  static_cast<std::size_t>(m.cols()), x.data(), y.data());
  return y;
}

}  // namespace

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kTolerance: return "tolerance";
    case StopReason::kMaxIters: return "max_iters";
    case StopReason::kDivergence: return "divergence";
  }
  throw std::logic_error("unreachable");
}

IterateTrace run_multistep(const SeparableObjective& obj,
                           const Eigen::MatrixXd& w, double alpha, double beta,
                           const Eigen::VectorXd& x0, const RunOptions& opts) {
  if (w.rows() != obj.n || w.cols() != obj.n)
    throw std::invalid_argument("weight matrix dimension mismatch");
  check_feasible_start(x0, opts.constraint);
  Recorder rec;
  rec.oracle = &opts.oracle;
  rec.constraint = opts.constraint;
  rec.record(x0, 0.0);

  Eigen::VectorXd x = x0;
  Eigen::VectorXd x_prev = x0;  // x(-1) = x(0)
  Eigen::VectorXd next(obj.n);
  for (long k = 0; k < opts.max_iters; ++k) {
    const Eigen::VectorXd wg = apply(w, obj.gradient(x));
    kernels::momentum_update(x.data(), x_prev.data(), wg.data(), alpha, beta,
                             next.data(), static_cast<std::size_t>(obj.n));
    const double step_norm = (next - x).norm();
    x_prev.swap(x);
    x.swap(next);
    rec.record(x, step_norm);
    rec.trace.k_stop = k + 1;
    if (rec.diverged(x)) {
      rec.trace.stop_reason = StopReason::kDivergence;
      return rec.trace;
    }
    if (step_norm < opts.tol) {
      rec.trace.stop_reason = StopReason::kTolerance;
      return rec.trace;
    }
  }
  rec.trace.stop_reason = StopReason::kMaxIters;
  return rec.trace;
}

IterateTrace run_weighted_gradient(const SeparableObjective& obj,
                                   const Eigen::MatrixXd& w, double alpha,
                                   const Eigen::VectorXd& x0,
                                   const RunOptions& opts) {
  return run_multistep(obj, w, alpha, /*beta=*/0.0, x0, opts);
}

namespace {

template <typename GradFn, typename PrimalFn>
DualTrace dual_ascent(GradFn&& dual_grad, PrimalFn&& primal_of, double alpha,
                      double beta, const Eigen::VectorXd& mu0,
                      const RunOptions& opts) {
  Recorder dual_rec;
  Recorder primal_rec;
  primal_rec.oracle = &opts.oracle;  // oracle refers to the primal point

  Eigen::VectorXd mu = mu0;
  Eigen::VectorXd mu_prev = mu0;
  Eigen::VectorXd next(mu0.size());
  dual_rec.record(mu, 0.0);
  primal_rec.record(primal_of(mu), 0.0);
  for (long k = 0; k < opts.max_iters; ++k) {
    const Eigen::VectorXd ascent = dual_grad(mu);
    // momentum update with the ascent direction: mu + alpha g + beta (...)
    const Eigen::VectorXd neg = -ascent;
    kernels::momentum_update(mu.data(), mu_prev.data(), neg.data(), alpha,
                             beta, next.data(),
                             static_cast<std::size_t>(mu.size()));
    const double step_norm = (next - mu).norm();
    mu_prev.swap(mu);
    mu.swap(next);
    dual_rec.record(mu, step_norm);
    primal_rec.record(primal_of(mu), step_norm);
    dual_rec.trace.k_stop = k + 1;
    if (dual_rec.diverged(mu)) {
      dual_rec.trace.stop_reason = StopReason::kDivergence;
      break;
    }
    if (step_norm < opts.tol) {
      dual_rec.trace.stop_reason = StopReason::kTolerance;
      break;
    }
    if (k + 1 == opts.max_iters)
      dual_rec.trace.stop_reason = StopReason::kMaxIters;
  }
  primal_rec.trace.k_stop = dual_rec.trace.k_stop;
  primal_rec.trace.stop_reason = dual_rec.trace.stop_reason;
  return DualTrace{std::move(dual_rec.trace), std::move(primal_rec.trace)};
}

}  // namespace

DualTrace run_dual_multistep(const NumProblem& p, double alpha, double beta,
                             const Eigen::VectorXd& mu0,
                             const RunOptions& opts) {
  if (mu0.size() != p.num_links())
    throw std::invalid_argument("multiplier dimension mismatch");
  return dual_ascent(
      [&](const Eigen::VectorXd& mu) { return num_dual_gradient(p, mu).gradient; },
      [&](const Eigen::VectorXd& mu) { return num_dual_gradient(p, mu).primal; },
      alpha, beta, mu0, opts);
}

DualTrace run_dual_multistep(const SeparableObjective& obj,
                             const EqualityConstraint& constraint, double alpha,
                             double beta, const Eigen::VectorXd& mu0,
                             const RunOptions& opts) {
  if (mu0.size() != constraint.A.rows())
    throw std::invalid_argument("multiplier dimension mismatch");
  // d(mu) = inf_x f(x) + mu'(Ax - b); ascent direction A x*(mu) - b with
  // grad f(x*(mu)) = -A' mu.
  auto primal_of = [&](const Eigen::VectorXd& mu) {
    return conjugate_gradient_inverse(obj, -constraint.A.transpose() * mu);
  };
  return dual_ascent(
      [&](const Eigen::VectorXd& mu) {
        return Eigen::VectorXd(constraint.A * primal_of(mu) - constraint.b);
      },
      primal_of, alpha, beta, mu0, opts);
}

namespace {

void check_consensus_matrix(const Eigen::MatrixXd& q) {
  if (q.rows() != q.cols()) throw std::invalid_argument("Q is not square");
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(q.cols());
  if ((q * ones - ones).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("consensus matrix must satisfy Q 1 = 1");
}

}  // namespace

IterateTrace run_consensus(const Eigen::MatrixXd& q, const Eigen::VectorXd& x0,
                           const RunOptions& opts) {
  check_consensus_matrix(q);
  std::optional<Eigen::VectorXd> target = opts.oracle;
  if (!target)
    target = Eigen::VectorXd::Constant(x0.size(), x0.mean());
  Recorder rec;
  rec.oracle = &target;
  rec.record(x0, 0.0);
  Eigen::VectorXd x = x0;
  for (long k = 0; k < opts.max_iters; ++k) {
    Eigen::VectorXd next = apply(q, x);
    const double step_norm = (next - x).norm();
    x.swap(next);
    rec.record(x, step_norm);
    rec.trace.k_stop = k + 1;
    if (rec.diverged(x)) {
      rec.trace.stop_reason = StopReason::kDivergence;
      return rec.trace;
    }
    if (step_norm < opts.tol) {
      rec.trace.stop_reason = StopReason::kTolerance;
      return rec.trace;
    }
  }
  rec.trace.stop_reason = StopReason::kMaxIters;
  return rec.trace;
}

IterateTrace run_shift_register(const Eigen::MatrixXd& q, double zeta,
                                const Eigen::VectorXd& x0,
                                const RunOptions& opts) {
  check_consensus_matrix(q);
  std::optional<Eigen::VectorXd> target = opts.oracle;
  if (!target)
    target = Eigen::VectorXd::Constant(x0.size(), x0.mean());
  Recorder rec;
  rec.oracle = &target;
  rec.record(x0, 0.0);
  Eigen::VectorXd x = x0;
  Eigen::VectorXd x_prev = x0;
  Eigen::VectorXd next(x0.size());
  for (long k = 0; k < opts.max_iters; ++k) {
    const Eigen::VectorXd qx = apply(q, x);
    kernels::blend(qx.data(), x_prev.data(), zeta, next.data(),
                   static_cast<std::size_t>(x0.size()));
    const double step_norm = (next - x).norm();
    x_prev.swap(x);
    x.swap(next);
    rec.record(x, step_norm);
    rec.trace.k_stop = k + 1;
    if (rec.diverged(x)) {
      rec.trace.stop_reason = StopReason::kDivergence;
      return rec.trace;
    }
    if (step_norm < opts.tol) {
      rec.trace.stop_reason = StopReason::kTolerance;
      return rec.trace;
    }
  }
  rec.trace.stop_reason = StopReason::kMaxIters;
  return rec.trace;
}

IterateTrace run_nesterov_consensus(const Eigen::MatrixXd& w, double a,
                                    double b, const Eigen::VectorXd& x0,
                                    const RunOptions& opts) {
  if (w.rows() != w.cols() || w.rows() != x0.size())
    throw std::invalid_argument("dimension mismatch");
  std::optional<Eigen::VectorXd> target = opts.oracle;
  if (!target)
    target = Eigen::VectorXd::Constant(x0.size(), x0.mean());
  Recorder rec;
  rec.oracle = &target;
  rec.record(x0, 0.0);
  Eigen::VectorXd x = x0;
  Eigen::VectorXd x_prev = x0;
  for (long k = 0; k < opts.max_iters; ++k) {
    const Eigen::VectorXd y = x + b * (x - x_prev);
    Eigen::VectorXd next = y - a * apply(w, y);
    const double step_norm = (next - x).norm();
    x_prev = x;
    x.swap(next);
    rec.record(x, step_norm);
    rec.trace.k_stop = k + 1;
    if (rec.diverged(x)) {
      rec.trace.stop_reason = StopReason::kDivergence;
      return rec.trace;
    }
    if (step_norm < opts.tol) {
      rec.trace.stop_reason = StopReason::kTolerance;
      return rec.trace;
    }
  }
  rec.trace.stop_reason = StopReason::kMaxIters;
  return rec.trace;
}

FactorEstimate estimate_convergence_factor(const IterateTrace& trace) {
  FactorEstimate est;
  if (trace.stop_reason == StopReason::kDivergence) {
    est.q = std::numeric_limits<double>::infinity();
    est.diverged = true;
    return est;
  }
  const std::vector<double>& series =
      trace.error_norms.empty() ? trace.step_norms : trace.error_norms;
  constexpr double kFloor = 1e-13;
  // Fit only the decaying part: once the series reaches its minimum it has
  // hit the roundoff plateau (which can sit well above the absolute floor
  // when the iterates are large), and plateau samples would bias the slope
  // toward zero.
  size_t argmin = 0;
  for (size_t k = 1; k < series.size(); ++k)
    if (series[k] < series[argmin]) argmin = k;
  // longest prefix above the numerical floor (skip the leading zero step)
  size_t last = 0;
  for (size_t k = 1; k <= argmin; ++k)
    if (series[k] > kFloor) last = k;
  const size_t count = last;  // indices 1..last usable
  if (count < 20) {
    if (!series.empty() && series.back() <= kFloor) {
      est.q = 0.0;
      est.exact = true;
      return est;
    }
    throw std::invalid_argument("trace too short for a rate estimate");
  }
  const size_t start = 1 + count / 2;
  double sk = 0, sy = 0, skk = 0, sky = 0;
  double m = 0;
  for (size_t k = start; k <= last; ++k) {
    const double kk = static_cast<double>(k);
    const double y = std::log(series[k]);
    sk += kk;
    sy += y;
    skk += kk * kk;
    sky += kk * y;
    m += 1.0;
  }
  const double slope = (m * sky - sk * sy) / (m * skk - sk * sk);
  est.q = std::exp(slope);
  return est;
}

void write_trace_csv(const IterateTrace& trace, std::ostream& out) {
  out << "k,error_norm,feasibility_residual,step_norm\n";
  out.precision(17);
  const size_t rows = trace.step_norms.size();
  for (size_t k = 0; k < rows; ++k) {
    out << k << ',';
    if (k < trace.error_norms.size()) out << trace.error_norms[k];
    out << ',';
    if (k < trace.feasibility_residuals.size())
      out << trace.feasibility_residuals[k];
    out << ',' << trace.step_norms[k] << '\n';
  }
}

}  // namespace mstep
