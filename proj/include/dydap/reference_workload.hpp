#pragma once

#include <array>
#include <cstdint>

#include "dydap/workload.hpp"

namespace dydap {

// Bundled 4-extent workload with known-good outputs at every pipeline stage
// (t = 4, k = 1). Used by the replay-golden self check and the test suites.
namespace reference {

inline AccessSequence access_sequence() {
  return {1, 2, 1, 3, 0, 1, 3, 1, 0, 1, 0, 2, 1, 3, 1, 3, 0, 2, 1, 0, 2, 1,
          3, 0, 3, 0, 1, 0, 1, 3, 1, 3, 1, 2, 0, 1, 3, 1, 3, 1, 2, 1, 2, 1};
}

inline DnTreeConfig tree_config() {
  return DnTreeConfig{.base_threshold = 4, .growth_factor = 1.0,
                      .extent_space = 4};
}

using Matrix4 = std::array<std::array<std::uint64_t, 4>, 4>;

// Exact transition counts of the sequence.
inline Matrix4 transition_counts() {
  return {{{0, 5, 3, 1}, {4, 0, 4, 9}, {1, 6, 0, 0}, {4, 6, 0, 0}}};
}

// Nearest-integer view of the summary reconstruction.
inline Matrix4 rounded_reconstruction() {
  return {{{0, 5, 3, 1}, {4, 0, 4, 9}, {1, 5, 0, 0}, {4, 7, 0, 0}}};
}

// Symmetrized adjacency M + M^T of the exact counts.
inline Matrix4 symmetrized_counts() {
  return {{{0, 9, 4, 5}, {9, 0, 10, 15}, {4, 10, 0, 0}, {5, 15, 0, 0}}};
}

// Edge cuts of the three balanced 2-part splits, for the exact counts and
// for the rounded reconstruction.
struct SplitCut {
  std::array<std::uint32_t, 2> part0;
  double cut_exact;
  double cut_reconstructed;
};

inline std::array<SplitCut, 3> split_cuts() {
  return {{{{0, 1}, 34, 34}, {{0, 2}, 24, 23}, {{0, 3}, 28, 29}}};
}

// The minimum-cut balanced split: {0,2} | {1,3}.
inline std::array<std::uint32_t, 4> optimal_assignment() {
  return {0, 1, 0, 1};
}

}  // namespace reference
}  // namespace dydap
