#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"

namespace twinepr {

/// Pairwise (cascade) summation; result does not depend on reduction order
/// beyond the fixed recursion split.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline double mean(std::span<const double> v) {
  if (v.empty()) throw InsufficientSamples("mean of empty sequence");
  return pairwise_sum(v) / static_cast<double>(v.size());
}

/// Population variance (divides by n), two-pass.
inline double variance(std::span<const double> v) {
  const double mu = mean(v);
  std::vector<double> sq(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) sq[k] = (v[k] - mu) * (v[k] - mu);
  return pairwise_sum(sq) / static_cast<double>(v.size());
}

inline double stddev(std::span<const double> v) { return std::sqrt(variance(v)); }

/// Nearest-rank percentile: the value of rank ceil(p*n) (1-based), p in [0, 1].
inline double nearest_rank(std::span<const double> values, double p) {
  if (values.empty()) throw InsufficientSamples("percentile of empty sequence");
  const auto n = values.size();
  auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::vector<double> work(values.begin(), values.end());
  std::nth_element(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(rank - 1), work.end());
  return work[rank - 1];
}

struct Interval {
  double low = 0.0;
  double high = 0.0;
  bool contains(double x) const { return x >= low && x <= high; }
};

/// Central interval dropping (1-level)/2 of the values at each end, nearest rank.
inline Interval confidence_interval(std::span<const double> values, double level = 0.95) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
  const double tail = (1.0 - level) / 2.0;
  const auto min_n = static_cast<std::size_t>(std::ceil(1.0 / tail - 1e-9));
  if (values.size() < min_n)
    throw InsufficientSamples("confidence interval at level " + std::to_string(level) + " needs >= " +
                              std::to_string(min_n) + " values, got " + std::to_string(values.size()));
  return {nearest_rank(values, tail), nearest_rank(values, 1.0 - tail)};
}

}  // namespace twinepr
