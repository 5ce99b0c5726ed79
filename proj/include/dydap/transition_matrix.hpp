#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dydap/common.hpp"

namespace dydap {

// Dense side x side matrix of nonnegative reals. Holds either an exact
// transition count matrix or a reconstructed approximation of one.
class TransitionMatrix {
 public:
  TransitionMatrix() = default;
  explicit TransitionMatrix(std::uint64_t side)
      : side_(side), cells_(side * side, 0.0) {}

  std::uint64_t side() const { return side_; }

  double& at(std::uint64_t i, std::uint64_t j) {
    check_range(i, j);
    return cells_[i * side_ + j];
  }
  double at(std::uint64_t i, std::uint64_t j) const {
    check_range(i, j);
    return cells_[i * side_ + j];
  }

  const std::vector<double>& cells() const { return cells_; }

  double total() const {
    KahanSum sum;
    for (double c : cells_) sum.add(c);
    return sum.value();
  }

  // Nearest-integer view, halves rounded up.
  TransitionMatrix rounded() const {
    TransitionMatrix r(side_);
    for (std::size_t i = 0; i < cells_.size(); ++i)
      r.cells_[i] = std::floor(cells_[i] + 0.5);
    return r;
  }

  bool operator==(const TransitionMatrix& other) const = default;

 private:
  void check_range(std::uint64_t i, std::uint64_t j) const {
    if (i >= side_ || j >= side_)
      throw std::out_of_range("TransitionMatrix: cell index out of range");
  }

  std::uint64_t side_ = 0;
  std::vector<double> cells_;
};

}  // namespace dydap
