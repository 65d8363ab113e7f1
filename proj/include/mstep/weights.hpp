#pragma once

#include "mstep/graph.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <string>

namespace mstep {

enum class WeightScheme {
  kLaplacian,
  kMaxDegree,
  kBestConstant,
  kMetropolis,
  kSdp,
  kCustom,
};

WeightScheme weight_scheme_from_string(const std::string& name);
std::string to_string(WeightScheme scheme);

/// Symmetric PSD matrix with the sparsity pattern of a graph and the kernel
/// conditions A W = 0, W A^T = 0 (kernel span(1) for the consensus and
/// budget-constraint constructions).
struct WeightMatrix {
  Eigen::MatrixXd matrix;
  Graph pattern;
  int kernel_dim = 1;
  WeightScheme scheme = WeightScheme::kCustom;
};

/// laplacian -> L; max_degree -> L / d_max; best_constant ->
/// 2L / (lambda_2(L) + lambda_n(L)); metropolis -> edge weights
/// -1/(1 + max(d_v, d_w)) with zero row sums.
WeightMatrix heuristic_weights(const Graph& g, WeightScheme scheme);

struct SdpWeightResult {
  WeightMatrix weights;
  double condition_number = 0;  // t*
  bool converged = true;
};

/// Condition-number-minimizing weight design: bisection on t with a
/// feasibility subproblem solved by alternating projections onto the
/// sparsity/kernel subspace and the spectral box [I, tI] on the nonzero
/// eigenspace. The returned matrix is scaled so lambda_n(W H) = 1.
SdpWeightResult sdp_optimal_weights(const Graph& g,
                                    const Eigen::VectorXd& h_diag);

/// Plain-text export of the weight-design problem (objective and constraint
/// blocks) for use with external SDP solvers.
void write_sdp_export(const Graph& g, const Eigen::VectorXd& h_diag,
                      std::ostream& out);

/// Dense text serialization: "n n" header then n rows of entries.
void write_dense_matrix(const Eigen::MatrixXd& m, std::ostream& out);
Eigen::MatrixXd read_dense_matrix(std::istream& in);

}  // namespace mstep
