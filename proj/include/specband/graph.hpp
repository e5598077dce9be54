#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "specband/rng.hpp"

namespace specband {

struct Edge {
  int u = 0;
  int v = 0;
  double w = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Weighted undirected similarity graph. Edges are stored canonically:
// u < v, sorted by (u, v), each unordered pair at most once, weights
// strictly positive and finite. Immutable after construction.
class Graph {
 public:
  Graph(int num_nodes, std::vector<Edge> edges)
      : n_(num_nodes), edges_(std::move(edges)) {
    if (n_ < 0) throw std::invalid_argument("graph: negative node count");
    for (Edge& e : edges_) {
      if (e.u == e.v)
        throw std::invalid_argument("graph: self-loop at node " +
                                    std::to_string(e.u));
      if (e.u > e.v) std::swap(e.u, e.v);
      if (e.u < 0 || e.v >= n_)
        throw std::invalid_argument("graph: edge (" + std::to_string(e.u) +
                                    "," + std::to_string(e.v) +
                                    ") out of range for n=" +
                                    std::to_string(n_));
      if (!(e.w > 0.0) || !std::isfinite(e.w))
        throw std::invalid_argument("graph: non-positive or non-finite weight " +
                                    std::to_string(e.w));
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
      return std::pair(a.u, a.v) < std::pair(b.u, b.v);
    });
    for (std::size_t i = 1; i < edges_.size(); ++i) {
      if (edges_[i - 1].u == edges_[i].u && edges_[i - 1].v == edges_[i].v)
        throw std::invalid_argument("graph: duplicate edge (" +
                                    std::to_string(edges_[i].u) + "," +
                                    std::to_string(edges_[i].v) + ")");
    }
  }

  int num_nodes() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  int n_;
  std::vector<Edge> edges_;
};

// L = D - W with d_ii the weighted degree. Row sums are zero up to
// floating-point roundoff; off-diagonals are -w_ij.
inline Eigen::MatrixXd laplacian(const Graph& g) {
  const int n = g.num_nodes();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) {
    l(e.u, e.u) += e.w;
    l(e.v, e.v) += e.w;
    l(e.u, e.v) -= e.w;
    l(e.v, e.u) -= e.w;
  }
  return l;
}

namespace detail {

// Weights are uniform on (0, 2]: "uniformly random" with unit mean, strictly
// positive. The scale matters because the regularizer lambda is an absolute
// constant in the experiments.
inline double random_weight(Rng& rng) { return 2.0 * rng.uniform01(); }

}  // namespace detail

// Erdos-Renyi G(n, p): every unordered pair independently with probability p.
inline Graph gen_erdos_renyi(int n, double p, std::uint64_t seed) {
  if (n <= 0) throw std::invalid_argument("gen_erdos_renyi: n must be >= 1");
  if (!(p > 0.0) || p > 1.0)
    throw std::invalid_argument("gen_erdos_renyi: p must be in (0,1]");
  Rng rng(seed);
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng.uniform01() <= p) edges.push_back({u, v, detail::random_weight(rng)});
  return Graph(n, std::move(edges));
}

// Barabasi-Albert preferential attachment: an m-clique seed, then every new
// node attaches to m distinct existing nodes sampled without replacement with
// probability proportional to current degree. Edge count is C(m,2) + (n-m)*m.
inline Graph gen_barabasi_albert(int n, int m, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("gen_barabasi_albert: m must be >= 1");
  if (m >= n)
    throw std::invalid_argument("gen_barabasi_albert: m must be < n");
  Rng rng(seed);
  std::vector<Edge> edges;
  std::vector<double> degree(n, 0.0);
  for (int u = 0; u < m; ++u)
    for (int v = u + 1; v < m; ++v) {
      edges.push_back({u, v, detail::random_weight(rng)});
      degree[u] += 1.0;
      degree[v] += 1.0;
    }
  std::vector<double> pool;
  for (int t = m; t < n; ++t) {
    pool.assign(degree.begin(), degree.begin() + t);
    for (int pick = 0; pick < m; ++pick) {
      double total = 0.0;
      for (int v = 0; v < t; ++v) total += pool[v];
      int chosen = -1;
      if (total <= 0.0) {
        // all-degree-zero pool (m = 1 seed): fall back to uniform
        int remaining = 0;
        for (int v = 0; v < t; ++v)
          if (pool[v] >= 0.0) ++remaining;
        auto idx = rng.uniform_index(static_cast<std::uint64_t>(remaining));
        for (int v = 0; v < t; ++v) {
          if (pool[v] >= 0.0 && idx-- == 0) {
            chosen = v;
            break;
          }
        }
      } else {
        double target = rng.uniform01() * total;
        double acc = 0.0;
        for (int v = 0; v < t; ++v) {
          if (pool[v] < 0.0) continue;
          acc += pool[v];
          if (target <= acc) {
            chosen = v;
            break;
          }
        }
        if (chosen < 0) {  // roundoff ran past the end
          for (int v = t - 1; v >= 0; --v)
            if (pool[v] >= 0.0) {
              chosen = v;
              break;
            }
        }
      }
      pool[chosen] = -1.0;  // without replacement
      edges.push_back({chosen, t, detail::random_weight(rng)});
      degree[chosen] += 1.0;
      degree[t] += 1.0;
    }
  }
  return Graph(n, std::move(edges));
}

// Non-periodic dims-dimensional grid with side nodes per axis; N = side^dims.
// Neighbors differ by 1 in exactly one coordinate.
inline Graph gen_lattice(int side, int dims, std::uint64_t seed) {
  if (side < 2) throw std::invalid_argument("gen_lattice: side must be >= 2");
  if (dims < 1) throw std::invalid_argument("gen_lattice: dims must be >= 1");
  std::uint64_t n = 1;
  for (int d = 0; d < dims; ++d) {
    n *= static_cast<std::uint64_t>(side);
    if (n > static_cast<std::uint64_t>(std::numeric_limits<int>::max()))
      throw std::invalid_argument("gen_lattice: side^dims overflows");
  }
  Rng rng(seed);
  std::vector<Edge> edges;
  std::uint64_t stride = 1;
  for (int d = 0; d < dims; ++d) {
    for (std::uint64_t i = 0; i < n; ++i) {
      const std::uint64_t coord = (i / stride) % static_cast<std::uint64_t>(side);
      if (coord + 1 < static_cast<std::uint64_t>(side))
        edges.push_back({static_cast<int>(i), static_cast<int>(i + stride),
                         detail::random_weight(rng)});
    }
    stride *= static_cast<std::uint64_t>(side);
  }
  return Graph(static_cast<int>(n), std::move(edges));
}

// Symmetrized k-nearest-neighbor graph: an edge is present when either
// endpoint lists the other among its k nearest by Euclidean distance
// (ties broken by lower index). All weights are 1.
inline Graph knn_graph(const std::vector<Eigen::VectorXd>& vectors, int k) {
  const int n = static_cast<int>(vectors.size());
  if (k < 1) throw std::invalid_argument("knn_graph: k must be >= 1");
  if (k >= n)
    throw std::invalid_argument("knn_graph: k must be < number of vectors");
  for (int i = 1; i < n; ++i)
    if (vectors[i].size() != vectors[0].size())
      throw std::invalid_argument("knn_graph: inconsistent vector dimensions");
  std::set<std::pair<int, int>> pairs;
  std::vector<std::pair<double, int>> dist;
  for (int i = 0; i < n; ++i) {
    dist.clear();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      dist.emplace_back((vectors[i] - vectors[j]).squaredNorm(), j);
    }
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    for (int r = 0; r < k; ++r) {
      const int j = dist[r].second;
      pairs.emplace(std::min(i, j), std::max(i, j));
    }
  }
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (const auto& [u, v] : pairs) edges.push_back({u, v, 1.0});
  return Graph(n, std::move(edges));
}

// Edge-list format: `u v w` per line, `#` comments, optional leading
// `n <count>` declaring the node count (required to round-trip isolated
// nodes). The writer emits edges sorted by (u,v) and 17 significant digits.
inline void save_edge_list(const Graph& g, std::ostream& out) {
  out << "n " << g.num_nodes() << "\n";
  out << std::setprecision(17);
  for (const Edge& e : g.edges()) out << e.u << " " << e.v << " " << e.w << "\n";
}

inline void save_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_edge_list: cannot open " + path);
  save_edge_list(g, out);
}

inline Graph load_edge_list(std::istream& in) {
  std::string line;
  int line_no = 0;
  long long declared_n = -1;
  bool saw_content = false;
  std::vector<Edge> edges;
  int max_node = -1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    if (!saw_content) {
      saw_content = true;
      if (line[first] == 'n') {
        char tag;
        fields >> tag >> declared_n;
        if (fields.fail() || declared_n < 0)
          throw std::runtime_error("load_edge_list: line " +
                                   std::to_string(line_no) +
                                   ": malformed node-count header");
        std::string rest;
        if (fields >> rest)
          throw std::runtime_error("load_edge_list: line " +
                                   std::to_string(line_no) +
                                   ": trailing tokens after node count");
        continue;
      }
    }
    long long u, v;
    double w;
    fields >> u >> v >> w;
    if (fields.fail())
      throw std::runtime_error("load_edge_list: line " +
                               std::to_string(line_no) + ": malformed edge");
    std::string rest;
    if (fields >> rest)
      throw std::runtime_error("load_edge_list: line " +
                               std::to_string(line_no) +
                               ": trailing tokens after edge");
    if (u < 0 || v < 0 || u > std::numeric_limits<int>::max() ||
        v > std::numeric_limits<int>::max())
      throw std::runtime_error("load_edge_list: line " +
                               std::to_string(line_no) +
                               ": node index out of range");
    if (u == v)
      throw std::runtime_error("load_edge_list: line " +
                               std::to_string(line_no) + ": self-loop");
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::runtime_error("load_edge_list: line " +
                               std::to_string(line_no) +
                               ": weight must be strictly positive");
    edges.push_back({static_cast<int>(u), static_cast<int>(v), w});
    max_node = std::max(max_node, static_cast<int>(std::max(u, v)));
  }
  const int n = static_cast<int>(std::max<long long>(declared_n, max_node + 1));
  return Graph(n, std::move(edges));
}

inline Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_edge_list: cannot open " + path);
  return load_edge_list(in);
}

// FNV-1a over the canonical edge-list serialization; keys the basis cache.
inline std::uint64_t edge_list_content_hash(const Graph& g) {
  std::ostringstream text;
  save_edge_list(g, text);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : text.str()) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace specband
