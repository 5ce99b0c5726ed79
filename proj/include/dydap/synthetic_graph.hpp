#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dydap/common.hpp"
#include "dydap/workload.hpp"

namespace dydap {

// In-memory graph whose storage is laid out in fixed-size extents. Each edge
// type is a separate data structure: the type's adjacency lists pack
// consecutive vertex ids into consecutive extents, and each type's extents
// form one contiguous block of the global extent space.
class SyntheticGraph {
 public:
  SyntheticGraph(std::uint64_t vertices, std::uint32_t num_types,
                 std::uint64_t extent_size)
      : n_(vertices), extent_size_(extent_size),
        offsets_(num_types, std::vector<std::uint64_t>(vertices + 1, 0)),
        targets_(num_types) {
    if (vertices == 0 || extent_size == 0 || num_types == 0)
      throw std::invalid_argument("SyntheticGraph: empty dimensions");
    const std::uint64_t per_type = (n_ + extent_size_ - 1) / extent_size_;
    for (std::uint32_t t = 0; t < num_types; ++t) {
      bases_.push_back(t * per_type);
      for (std::uint64_t e = 0; e < per_type; ++e) ds_tags_.push_back(t);
    }
    extents_ = per_type * num_types;
  }

  std::uint64_t num_vertices() const { return n_; }
  std::uint32_t num_types() const {
    return static_cast<std::uint32_t>(targets_.size());
  }
  std::uint64_t num_extents() const { return extents_; }
  std::uint64_t extent_size() const { return extent_size_; }
  const std::vector<std::uint32_t>& ds_tags() const { return ds_tags_; }

  extent_id extent_of(std::uint32_t type, std::uint64_t v) const {
    return bases_[type] + v / extent_size_;
  }

  std::span<const std::uint64_t> neighbors(std::uint32_t type,
                                           std::uint64_t v) const {
    const auto& off = offsets_[type];
    return {targets_[type].data() + off[v],
            targets_[type].data() + off[v + 1]};
  }

  std::uint64_t num_edges(std::uint32_t type) const {
    return targets_[type].size();
  }

  // adjacency[v] lists must be provided sorted.
  void set_adjacency(std::uint32_t type,
                     const std::vector<std::vector<std::uint64_t>>& adjacency) {
    auto& off = offsets_[type];
    auto& tgt = targets_[type];
    tgt.clear();
    for (std::uint64_t v = 0; v < n_; ++v) {
      off[v] = tgt.size();
      tgt.insert(tgt.end(), adjacency[v].begin(), adjacency[v].end());
    }
    off[n_] = tgt.size();
  }

 private:
  std::uint64_t n_;
  std::uint64_t extent_size_;
  std::uint64_t extents_ = 0;
  std::vector<std::uint64_t> bases_;
  std::vector<std::uint32_t> ds_tags_;
  std::vector<std::vector<std::uint64_t>> offsets_;
  std::vector<std::vector<std::uint64_t>> targets_;
};

// Undirected single-type graph with recursive-matrix structure: 2^scale
// vertices, roughly mean_degree edges per vertex.
inline SyntheticGraph rmat_graph(unsigned scale, std::uint64_t mean_degree,
                                 std::uint64_t seed, std::uint64_t extent_size,
                                 std::array<double, 4> p = {0.57, 0.19, 0.19,
                                                            0.05}) {
  const std::uint64_t n = std::uint64_t{1} << scale;
  RmatParams params;
  params.p = p;
  params.depth = scale;
  params.validate();
  Rng rng(seed);

  std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
  edges.reserve(n * mean_degree / 2);
  for (std::uint64_t i = 0; i < n * mean_degree / 2; ++i) {
    auto [u, v] = rmat_sample_cell(params, rng);
    if (u == v) continue;
    edges.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<std::vector<std::uint64_t>> adj(n);
  for (auto [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());

  SyntheticGraph g(n, 1, extent_size);
  g.set_adjacency(0, adj);
  return g;
}

// Two data structures over one vertex set: type 0 ("follows"-like links
// between vertices) and type 1 (a second per-vertex list read on the second
// hop). Out-degrees are fixed; targets are sampled uniformly.
inline SyntheticGraph typed_graph(std::uint64_t vertices,
                                  std::uint64_t out_degree_a,
                                  std::uint64_t out_degree_b,
                                  std::uint64_t seed,
                                  std::uint64_t extent_size) {
  Rng rng(seed);
  std::uniform_int_distribution<std::uint64_t> pick(0, vertices - 1);
  auto sample_list = [&](std::uint64_t degree) {
    std::vector<std::uint64_t> list;
    list.reserve(degree);
    for (std::uint64_t d = 0; d < degree; ++d) list.push_back(pick(rng));
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    return list;
  };
  std::vector<std::vector<std::uint64_t>> adj_a(vertices), adj_b(vertices);
  for (std::uint64_t v = 0; v < vertices; ++v) {
    adj_a[v] = sample_list(out_degree_a);
    adj_b[v] = sample_list(out_degree_b);
  }
  SyntheticGraph g(vertices, 2, extent_size);
  g.set_adjacency(0, adj_a);
  g.set_adjacency(1, adj_b);
  return g;
}

}  // namespace dydap
