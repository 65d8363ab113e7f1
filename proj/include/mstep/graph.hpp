#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mstep {

/// Undirected simple graph. Vertices are 1-based in the public interface.
class Graph {
 public:
  Graph(int n, std::vector<std::pair<int, int>> edges);

  int num_vertices() const { return n_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  /// Edges normalized to (min, max) and sorted lexicographically.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  int degree(int v) const;
  int max_degree() const;
  bool connected() const;

 private:
  int n_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<int> degree_;
};

/// |E| x n signed incidence matrix; row for edge (v,w) has +1 at the smaller
/// endpoint and -1 at the larger one. Only A^T A matters downstream, so the
/// sign convention is fixed for reproducibility.
Eigen::MatrixXd incidence_matrix(const Graph& g);

/// Graph Laplacian L = A^T A: degrees on the diagonal, -1 on edges.
Eigen::MatrixXd laplacian(const Graph& g);

enum class Topology { kRing, kComplete, kPath, kDumbbell, kRandom };

Topology topology_from_string(const std::string& name);
std::string to_string(Topology kind);

/// Benchmark topologies. Dumbbell(n) joins two cliques on floor(n/2) and
/// ceil(n/2) vertices with a single bridge edge. Random graphs are
/// Erdos-Renyi, resampled (up to 1000 draws) until connected.
Graph make_topology(Topology kind, int n,
                    std::optional<std::uint64_t> seed = std::nullopt,
                    std::optional<double> edge_prob = std::nullopt);

/// Edge-list text format: first line "n m", then m lines "v w".
Graph read_edge_list(std::istream& in);
void write_edge_list(const Graph& g, std::ostream& out);
Graph load_graph(const std::string& path);
void save_graph(const Graph& g, const std::string& path);

}  // namespace mstep
