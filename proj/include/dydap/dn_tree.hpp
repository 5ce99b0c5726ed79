#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>

#include "dydap/common.hpp"
#include "dydap/transition_matrix.hpp"

namespace dydap {

// Parameters of a DN-tree over an m x m extent-transition space.
// Counters at tree level i saturate at tau(i) = ceil(t * k^i); a saturated
// counter stops changing and detail moves to its four children.
struct DnTreeConfig {
  std::uint64_t base_threshold = 4;  // t
  double growth_factor = 1.0;        // k
  std::uint64_t extent_space = 1;    // m

  void validate() const {
    if (extent_space < 1)
      throw std::invalid_argument("DnTreeConfig: extent_space must be >= 1");
    if (growth_factor < 1.0)
      throw std::invalid_argument("DnTreeConfig: growth_factor must be >= 1");
  }

  // Index space padded to a power of two so quadrant halving is exact.
  // Padded cells are outside [0, extent_space) and are never recorded.
  std::uint64_t padded_side() const {
    return next_pow2(extent_space < 2 ? 2 : extent_space);
  }
  unsigned max_depth() const { return log2_exact(padded_side()); }

  std::uint64_t threshold(unsigned level) const {
    double raw = static_cast<double>(base_threshold) *
                 std::pow(growth_factor, static_cast<double>(level));
    if (raw >= 9.0e18) return std::numeric_limits<std::uint64_t>::max();
    // ceil with a small backoff so k^level landing on an integer stays there
    return static_cast<std::uint64_t>(std::ceil(raw - 1e-9));
  }

  bool operator==(const DnTreeConfig&) const = default;
};

struct DnNode {
  std::uint64_t count = 0;
  std::unique_ptr<std::array<DnNode, 4>> children;

  bool has_children() const { return children != nullptr; }
  std::uint64_t child_sum() const {
    const auto& c = *children;
    return c[0].count + c[1].count + c[2].count + c[3].count;
  }
};

// Lossy quadtree summary of the extent-transition matrix M. The root is a
// sentinel holding no counter; its four children sit at level 1. Child order
// everywhere is (row-low,col-low), (row-low,col-high), (row-high,col-low),
// (row-high,col-high).
class DnTree {
 public:
  explicit DnTree(DnTreeConfig config) : config_(config) {
    config_.validate();
  }

  DnTree(DnTree&&) = default;
  DnTree& operator=(DnTree&&) = default;
  DnTree(const DnTree&) = delete;
  DnTree& operator=(const DnTree&) = delete;

  DnTree clone() const {
    DnTree copy(config_);
    copy.total_recorded_ = total_recorded_;
    for (int q = 0; q < 4; ++q) clone_node(root_children_[q], copy.root_children_[q]);
    return copy;
  }

  const DnTreeConfig& config() const { return config_; }
  std::uint64_t total_recorded() const { return total_recorded_; }

  // Records one transition: extent `next` accessed right after `prev`.
  // Walks down from the root child covering (prev, next); a saturated
  // counter forwards the update to the child quadrant (created lazily),
  // an unsaturated one absorbs it. Cells at max depth absorb unboundedly.
  void record(extent_id prev, extent_id next) {
    check_extent(prev);
    check_extent(next);
    const unsigned depth = config_.max_depth();
    DnNode* node = &root_children_[quadrant_at(prev, next, depth - 1)];
    unsigned level = 1;
    while (level < depth && node->count >= config_.threshold(level)) {
      if (!node->children)
        node->children = std::make_unique<std::array<DnNode, 4>>();
      node = &(*node->children)[quadrant_at(prev, next, depth - level - 1)];
      ++level;
    }
    ++node->count;
    ++total_recorded_;
  }

  // Approximate density of cell (i, j). Counter mass met along the walk is
  // carried downward, scaled at each step by the chosen child's share of
  // its siblings' total; where the walk ends early the carried mass spreads
  // uniformly over the in-range cells the node covers. Zero sibling totals
  // (reachable through merged or zero-threshold trees) split mass equally.
  double reconstruct_cell(extent_id i, extent_id j) const {
    check_extent(i);
    check_extent(j);
    const unsigned depth = config_.max_depth();
    const DnNode* node = &root_children_[quadrant_at(i, j, depth - 1)];
    unsigned level = 1;
    double value = 0.0;
    while (true) {
      value += static_cast<double>(node->count);
      if (!node->has_children()) break;
      const DnNode* child = &(*node->children)[quadrant_at(i, j, depth - level - 1)];
      const std::uint64_t sum = node->child_sum();
      if (sum == 0)
        value *= 0.25;
      else
        value *= static_cast<double>(child->count) / static_cast<double>(sum);
      node = child;
      ++level;
    }
    const std::uint64_t span = config_.padded_side() >> level;
    const std::uint64_t r0 = (i / span) * span;
    const std::uint64_t c0 = (j / span) * span;
    return value / static_cast<double>(valid_cells(r0, c0, span));
  }

  // Full approximate matrix; one top-down pass with the same arithmetic as
  // reconstruct_cell, so the two agree bit for bit.
  TransitionMatrix reconstruct_matrix() const {
    TransitionMatrix m(config_.extent_space);
    const std::uint64_t span = config_.padded_side() >> 1;
    for (int q = 0; q < 4; ++q) {
      fill_region(root_children_[q], (q >> 1) * span, (q & 1) * span, span, 0.0,
                  m);
    }
    return m;
  }

  struct Stats {
    std::uint64_t node_count = 0;      // all nodes below the root sentinel
    std::uint64_t total_recorded = 0;
    std::uint64_t memory_estimate = 0; // node_count * kBytesPerNode
  };

  // Cost charged per node: the 8-byte counter plus the children pointer.
  static constexpr std::uint64_t kBytesPerNode = 16;

  Stats stats() const {
    Stats s;
    s.total_recorded = total_recorded_;
    for_each_node([&](unsigned, const DnNode&) { ++s.node_count; });
    s.memory_estimate = s.node_count * kBytesPerNode;
    return s;
  }

  // Preorder visitation (root children first, then descendants); `fn` gets
  // each node's level. Used by serialization, stats and invariant checks.
  void for_each_node(
      const std::function<void(unsigned, const DnNode&)>& fn) const {
    for (int q = 0; q < 4; ++q) visit(root_children_[q], 1, fn);
  }

  const std::array<DnNode, 4>& root_children() const { return root_children_; }
  std::array<DnNode, 4>& mutable_root_children() { return root_children_; }
  void set_total_recorded(std::uint64_t n) { total_recorded_ = n; }

 private:
  void check_extent(extent_id e) const {
    if (e >= config_.extent_space)
      throw std::out_of_range("DnTree: extent id out of range");
  }

  // Quadrant of (row, col) decided by the given bit of each coordinate.
  static unsigned quadrant_at(extent_id row, extent_id col, unsigned bit) {
    return static_cast<unsigned>(((row >> bit) & 1) * 2 + ((col >> bit) & 1));
  }

  // In-range cells of the square [r0, r0+span) x [c0, c0+span).
  std::uint64_t valid_cells(std::uint64_t r0, std::uint64_t c0,
                            std::uint64_t span) const {
    const std::uint64_t m = config_.extent_space;
    const std::uint64_t rows = r0 >= m ? 0 : std::min(span, m - r0);
    const std::uint64_t cols = c0 >= m ? 0 : std::min(span, m - c0);
    return rows * cols;
  }

  void fill_region(const DnNode& node, std::uint64_t r0, std::uint64_t c0,
                   std::uint64_t span, double carried,
                   TransitionMatrix& out) const {
    double value = carried + static_cast<double>(node.count);
    if (node.has_children()) {
      const std::uint64_t sum = node.child_sum();
      const std::uint64_t half = span >> 1;
      for (int q = 0; q < 4; ++q) {
        const DnNode& child = (*node.children)[q];
        double share;
        if (sum == 0)
          share = value * 0.25;
        else
          share = value * (static_cast<double>(child.count) /
                           static_cast<double>(sum));
        fill_region(child, r0 + (q >> 1) * half, c0 + (q & 1) * half, half,
                    share, out);
      }
      return;
    }
    const std::uint64_t valid = valid_cells(r0, c0, span);
    if (valid == 0) return;
    const double per_cell = value / static_cast<double>(valid);
    if (per_cell == 0.0) return;
    const std::uint64_t m = config_.extent_space;
    for (std::uint64_t r = r0; r < std::min(r0 + span, m); ++r)
      for (std::uint64_t c = c0; c < std::min(c0 + span, m); ++c)
        out.at(r, c) = per_cell;
  }

  static void visit(const DnNode& node, unsigned level,
                    const std::function<void(unsigned, const DnNode&)>& fn) {
    fn(level, node);
    if (node.has_children())
      for (int q = 0; q < 4; ++q) visit((*node.children)[q], level + 1, fn);
  }

  static void clone_node(const DnNode& src, DnNode& dst) {
    dst.count = src.count;
    if (src.has_children()) {
      dst.children = std::make_unique<std::array<DnNode, 4>>();
      for (int q = 0; q < 4; ++q)
        clone_node((*src.children)[q], (*dst.children)[q]);
    }
  }

  DnTreeConfig config_;
  std::array<DnNode, 4> root_children_;
  std::uint64_t total_recorded_ = 0;
};

}  // namespace dydap
