#include "mstep/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mstep {

Graph::Graph(int n, std::vector<std::pair<int, int>> edges)
    : n_(n), edges_(std::move(edges)), degree_(static_cast<size_t>(std::max(n, 0)), 0) {
  if (n_ < 1) throw std::invalid_argument("graph needs at least one vertex");
  for (auto& [v, w] : edges_) {
    if (v < 1 || v > n_ || w < 1 || w > n_)
      throw std::invalid_argument("edge endpoint out of range");
    if (v == w) throw std::invalid_argument("self-loops are not allowed");
    if (v > w) std::swap(v, w);
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
    throw std::invalid_argument("duplicate edge");
  for (const auto& [v, w] : edges_) {
    ++degree_[static_cast<size_t>(v - 1)];
    ++degree_[static_cast<size_t>(w - 1)];
  }
}

int Graph::degree(int v) const {
  if (v < 1 || v > n_) throw std::out_of_range("vertex out of range");
  return degree_[static_cast<size_t>(v - 1)];
}

int Graph::max_degree() const {
  return *std::max_element(degree_.begin(), degree_.end());
}

bool Graph::connected() const {
  std::vector<std::vector<int>> adj(static_cast<size_t>(n_));
  for (const auto& [v, w] : edges_) {
    adj[static_cast<size_t>(v - 1)].push_back(w - 1);
    adj[static_cast<size_t>(w - 1)].push_back(v - 1);
  }
  std::vector<char> seen(static_cast<size_t>(n_), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[static_cast<size_t>(v)]) {
      if (!seen[static_cast<size_t>(w)]) {
        seen[static_cast<size_t>(w)] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == n_;
}

Eigen::MatrixXd incidence_matrix(const Graph& g) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(g.num_edges(), g.num_vertices());
  int row = 0;
  for (const auto& [v, w] : g.edges()) {
    a(row, v - 1) = 1.0;
    a(row, w - 1) = -1.0;
    ++row;
  }
  return a;
}

Eigen::MatrixXd laplacian(const Graph& g) {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(g.num_vertices(), g.num_vertices());
  for (const auto& [v, w] : g.edges()) {
    l(v - 1, v - 1) += 1.0;
    l(w - 1, w - 1) += 1.0;
    l(v - 1, w - 1) -= 1.0;
    l(w - 1, v - 1) -= 1.0;
  }
  return l;
}

Topology topology_from_string(const std::string& name) {
  if (name == "ring") return Topology::kRing;
  if (name == "complete") return Topology::kComplete;
  if (name == "path") return Topology::kPath;
  if (name == "dumbbell") return Topology::kDumbbell;
  if (name == "random") return Topology::kRandom;
  throw std::invalid_argument("unknown topology: " + name);
}

std::string to_string(Topology kind) {
  switch (kind) {
    case Topology::kRing: return "ring";
    case Topology::kComplete: return "complete";
    case Topology::kPath: return "path";
    case Topology::kDumbbell: return "dumbbell";
    case Topology::kRandom: return "random";
  }
  throw std::logic_error("unreachable");
}

namespace {

std::vector<std::pair<int, int>> clique_edges(int lo, int hi) {
  std::vector<std::pair<int, int>> edges;
  for (int v = lo; v <= hi; ++v)
    for (int w = v + 1; w <= hi; ++w) edges.emplace_back(v, w);
  return edges;
}

}  // namespace

Graph make_topology(Topology kind, int n, std::optional<std::uint64_t> seed,
                    std::optional<double> edge_prob) {
  if (n < 2) throw std::invalid_argument("topology needs n >= 2");
  switch (kind) {
    case Topology::kRing: {
      if (n < 3) throw std::invalid_argument("ring needs n >= 3");
      std::vector<std::pair<int, int>> edges;
      for (int v = 1; v < n; ++v) edges.emplace_back(v, v + 1);
      edges.emplace_back(n, 1);
      return Graph(n, std::move(edges));
    }
    case Topology::kComplete:
      return Graph(n, clique_edges(1, n));
    case Topology::kPath: {
      std::vector<std::pair<int, int>> edges;
      for (int v = 1; v < n; ++v) edges.emplace_back(v, v + 1);
      return Graph(n, std::move(edges));
    }
    case Topology::kDumbbell: {
      if (n < 4) throw std::invalid_argument("dumbbell needs n >= 4");
      int half = n / 2;
      auto edges = clique_edges(1, half);
      auto right = clique_edges(half + 1, n);
      edges.insert(edges.end(), right.begin(), right.end());
      edges.emplace_back(half, half + 1);  // bridge
      return Graph(n, std::move(edges));
    }
    case Topology::kRandom: {
      if (!seed || !edge_prob)
        throw std::invalid_argument("random topology requires seed and edge_prob");
      if (*edge_prob <= 0.0 || *edge_prob > 1.0)
        throw std::invalid_argument("edge_prob must lie in (0, 1]");
      std::mt19937_64 rng(*seed);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<std::pair<int, int>> edges;
        for (int v = 1; v <= n; ++v)
          for (int w = v + 1; w <= n; ++w)
            if (unif(rng) < *edge_prob) edges.emplace_back(v, w);
        Graph g(n, std::move(edges));
        if (g.connected()) return g;
      }
      throw std::runtime_error("no connected Erdos-Renyi sample in 1000 draws");
    }
  }
  throw std::logic_error("unreachable");
}

Graph read_edge_list(std::istream& in) {
  int n = 0, m = 0;
  if (!(in >> n >> m)) throw std::runtime_error("edge list: bad header");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<size_t>(std::max(m, 0)));
  for (int i = 0; i < m; ++i) {
    int v = 0, w = 0;
    if (!(in >> v >> w)) throw std::runtime_error("edge list: truncated");
    edges.emplace_back(v, w);
  }
  return Graph(n, std::move(edges));
}

void write_edge_list(const Graph& g, std::ostream& out) {
  out << g.num_vertices() << ' ' << g.num_edges() << '\n';
  for (const auto& [v, w] : g.edges()) out << v << ' ' << w << '\n';
}

Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  return read_edge_list(in);
}

void save_graph(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write graph file: " + path);
  write_edge_list(g, out);
}

}  // namespace mstep
