#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dydap/common.hpp"
#include "dydap/dn_tree.hpp"
#include "dydap/transition_matrix.hpp"

namespace dydap {

// All randomized generation in the toolkit runs on std::mt19937_64, which is
// fully specified by the standard, so a seed pins every byte of output.
using Rng = std::mt19937_64;

// Recursive-matrix cell model: at each of `depth` levels one of the four
// quadrants is chosen with probabilities p[0..3] (row-low/col-low,
// row-low/col-high, row-high/col-low, row-high/col-high).
struct RmatParams {
  std::array<double, 4> p{0.25, 0.25, 0.25, 0.25};
  unsigned depth = 1;  // log2 of the matrix side

  void validate() const {
    double sum = 0.0;
    for (double pi : p) {
      if (pi <= 0.0) throw std::invalid_argument("RmatParams: p_i must be > 0");
      sum += pi;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("RmatParams: probabilities must sum to 1");
    if (depth < 1) throw std::invalid_argument("RmatParams: depth must be >= 1");
  }

  std::uint64_t side() const { return std::uint64_t{1} << depth; }
};

inline std::pair<extent_id, extent_id> rmat_sample_cell(const RmatParams& params,
                                                        Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  extent_id i = 0, j = 0;
  for (unsigned level = 0; level < params.depth; ++level) {
    const double u = unit(rng);
    unsigned q = 3;
    double acc = 0.0;
    for (unsigned c = 0; c < 3; ++c) {
      acc += params.p[c];
      if (u < acc) {
        q = c;
        break;
      }
    }
    i = (i << 1) | (q >> 1);
    j = (j << 1) | (q & 1);
  }
  return {i, j};
}

using AccessSequence = std::vector<extent_id>;

// Newline-delimited extent ids, one per line.
inline void write_sequence(const AccessSequence& seq, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  for (extent_id e : seq) out << e << '\n';
}

inline AccessSequence read_sequence(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  AccessSequence seq;
  std::uint64_t v;
  while (in >> v) seq.push_back(v);
  return seq;
}

// Feeds every consecutive pair of the sequence (self-transitions included)
// into both the tree and the exact oracle matrix. |seq| - 1 updates.
inline void replay(const AccessSequence& seq, DnTree& tree,
                   TransitionMatrix& oracle) {
  for (std::size_t t = 1; t < seq.size(); ++t) {
    oracle.at(seq[t - 1], seq[t]) += 1.0;
    tree.record(seq[t - 1], seq[t]);
  }
}

struct ErrorReport {
  double error = 0.0;
  std::uint64_t accesses = 0;   // N
  std::uint64_t matrix_side = 0;
};

// Normalized L1 discrepancy: sum |m_ij - m̂_ij| / (2 (N - 1)). Both matrices
// carry total mass N - 1, which bounds the result to [0, 1].
inline ErrorReport compression_error(const TransitionMatrix& exact,
                                     const TransitionMatrix& approx,
                                     std::uint64_t accesses) {
  if (exact.side() != approx.side())
    throw std::invalid_argument("compression_error: matrix sides differ");
  if (accesses < 2)
    throw std::invalid_argument("compression_error: need at least 2 accesses");
  KahanSum sum;
  const auto& a = exact.cells();
  const auto& b = approx.cells();
  for (std::size_t i = 0; i < a.size(); ++i) sum.add(std::abs(a[i] - b[i]));
  ErrorReport report;
  report.error = sum.value() / (2.0 * static_cast<double>(accesses - 1));
  report.accesses = accesses;
  report.matrix_side = exact.side();
  return report;
}

}  // namespace dydap
