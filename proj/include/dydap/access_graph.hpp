#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dydap/common.hpp"
#include "dydap/transition_matrix.hpp"

namespace dydap {

// Weighted undirected graph over extents, adjacency given by M + M^T with
// the diagonal dropped.
class AccessGraph {
 public:
  AccessGraph() = default;
  explicit AccessGraph(std::uint64_t n) : n_(n), w_(n * n, 0.0) {}

  std::uint64_t size() const { return n_; }

  double weight(std::uint64_t u, std::uint64_t v) const {
    return w_[u * n_ + v];
  }

  void set_weight(std::uint64_t u, std::uint64_t v, double w) {
    if (u == v) return;  // self-loops are never retained
    w_[u * n_ + v] = w;
    w_[v * n_ + u] = w;
  }

  double total_weight(std::uint64_t v) const {
    double s = 0.0;
    for (std::uint64_t u = 0; u < n_; ++u) s += weight(v, u);
    return s;
  }

 private:
  std::uint64_t n_ = 0;
  std::vector<double> w_;
};

inline AccessGraph build_access_graph(const TransitionMatrix& m_hat) {
  const std::uint64_t n = m_hat.side();
  AccessGraph g(n);
  for (std::uint64_t u = 0; u < n; ++u)
    for (std::uint64_t v = u + 1; v < n; ++v)
      g.set_weight(u, v, m_hat.at(u, v) + m_hat.at(v, u));
  return g;
}

// Per-vertex balancing weights, one column per constraint, each column
// normalized to sum 1 over the graph. Column 0 is the uniform size
// constraint; columns 1..n_DS are normalized data-structure indicators.
class ConstraintMatrix {
 public:
  ConstraintMatrix() = default;

  static ConstraintMatrix uniform(std::uint64_t n) {
    ConstraintMatrix c;
    c.n_ = n;
    c.k_ = 1;
    c.w_.assign(n, 1.0 / static_cast<double>(n));
    return c;
  }

  // ds_tags: extent -> data-structure id in [0, n_ds).
  static ConstraintMatrix with_ds_tags(const std::vector<std::uint32_t>& ds_tags,
                                       std::uint32_t n_ds) {
    const std::uint64_t n = ds_tags.size();
    ConstraintMatrix c;
    c.n_ = n;
    c.k_ = 1 + n_ds;
    c.w_.assign(n * c.k_, 0.0);
    std::vector<std::uint64_t> ds_size(n_ds, 0);
    for (std::uint32_t tag : ds_tags) {
      if (tag >= n_ds)
        throw std::invalid_argument("ConstraintMatrix: ds tag out of range");
      ++ds_size[tag];
    }
    for (std::uint64_t v = 0; v < n; ++v) {
      c.w_[v * c.k_] = 1.0 / static_cast<double>(n);
      const std::uint32_t tag = ds_tags[v];
      c.w_[v * c.k_ + 1 + tag] = 1.0 / static_cast<double>(ds_size[tag]);
    }
    return c;
  }

  std::uint64_t size() const { return n_; }
  std::uint64_t num_constraints() const { return k_; }
  double at(std::uint64_t v, std::uint64_t i) const { return w_[v * k_ + i]; }

 private:
  std::uint64_t n_ = 0;
  std::uint64_t k_ = 0;
  std::vector<double> w_;
};

// Edge-list text: one "u v weight" line per edge with u < v and weight > 0.
inline void write_edge_list(const AccessGraph& g, std::ostream& os) {
  for (std::uint64_t u = 0; u < g.size(); ++u)
    for (std::uint64_t v = u + 1; v < g.size(); ++v)
      if (g.weight(u, v) > 0.0)
        os << u << ' ' << v << ' ' << g.weight(u, v) << '\n';
}

inline AccessGraph read_edge_list(std::istream& is) {
  struct Edge {
    std::uint64_t u, v;
    double w;
  };
  std::vector<Edge> edges;
  std::uint64_t max_vertex = 0;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    Edge e;
    if (!(ss >> e.u >> e.v >> e.w))
      throw format_error("edge list: expected 'u v weight': " + line);
    edges.push_back(e);
    max_vertex = std::max({max_vertex, e.u, e.v});
  }
  AccessGraph g(edges.empty() ? 0 : max_vertex + 1);
  for (const Edge& e : edges) g.set_weight(e.u, e.v, e.w);
  return g;
}

}  // namespace dydap
