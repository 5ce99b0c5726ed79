#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dydap {

using extent_id = std::uint64_t;

// Raised when a partitioning instance admits no assignment within the
// configured imbalance tolerances.
struct infeasible_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when an exhaustive search would exceed its enumeration guard.
struct guard_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised on malformed serialized input (bad magic, truncation, structure).
struct format_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::uint64_t next_pow2(std::uint64_t v) {
  std::uint64_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

inline unsigned log2_exact(std::uint64_t pow2) {
  unsigned d = 0;
  while ((std::uint64_t{1} << d) < pow2) ++d;
  return d;
}

// Compensated accumulator; keeps large float sums close to the exact value.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

}  // namespace dydap
