#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace dydap {

struct ExponentQuery {
  std::array<double, 4> p{0.25, 0.25, 0.25, 0.25};
  double growth_factor = 2.0;  // k

  void validate() const {
    double sum = 0.0;
    for (double pi : p) {
      if (pi <= 0.0)
        throw std::invalid_argument("ExponentQuery: p_i must be > 0");
      sum += pi;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("ExponentQuery: probabilities must sum to 1");
    if (growth_factor < 1.0)
      throw std::invalid_argument("ExponentQuery: growth_factor must be >= 1");
  }
};

// Growth exponent s of the summary size, the root of
//   f(s) = p0^s + p1^s + p2^s + p3^s - k^s = 0.
// f is strictly decreasing on (0, 2] with f(0) = 3 > 0 and f(2) < 0, so
// bisection converges to the unique root.
inline double solve_size_exponent(const ExponentQuery& q) {
  q.validate();
  auto f = [&](double s) {
    double v = -std::pow(q.growth_factor, s);
    for (double pi : q.p) v += std::pow(pi, s);
    return v;
  };
  double lo = 1e-9, hi = 2.0;
  double mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < 300; ++iter) {
    mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::abs(fm) < 1e-12) break;
    if (fm > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return mid;
}

// Worst-case exponent over all quadrant distributions: log 4 / log 4k,
// attained at the uniform distribution.
inline double uniform_bound(double growth_factor) {
  if (growth_factor < 1.0)
    throw std::invalid_argument("uniform_bound: growth_factor must be >= 1");
  return std::log(4.0) / std::log(4.0 * growth_factor);
}

struct GrowthSample {
  std::uint64_t accesses = 0;    // N
  std::uint64_t node_count = 0;
};

// Least-squares slope of log(node_count) against log(N); the empirical
// counterpart of the solved exponent.
inline double fit_growth_exponent(const std::vector<GrowthSample>& samples) {
  if (samples.size() < 2)
    throw std::invalid_argument("fit_growth_exponent: need >= 2 samples");
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (samples[i].accesses <= samples[i - 1].accesses)
      throw std::invalid_argument(
          "fit_growth_exponent: accesses must be strictly increasing");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(samples.size());
  for (const GrowthSample& s : samples) {
    const double x = std::log(static_cast<double>(s.accesses));
    const double y = std::log(static_cast<double>(s.node_count));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace dydap
