#pragma once

#include <cstdint>
#include <vector>

#include "riswie/point_cloud.hpp"

namespace riswie {

// One-dimensional weighted sample with nondecreasing values. Weights are
// strictly positive and sum to 1 within 1e-12.
struct SortedSample {
  std::vector<double> values;
  std::vector<double> weights;

  // Validates ordering, positivity, and weight sum.
  static SortedSample from_sorted(std::vector<double> values,
                                  std::vector<double> weights);
  // Co-sorts weights with values (stable, so equal values keep input order).
  // Empty weights means uniform 1/n.
  static SortedSample from_unsorted(std::vector<double> values,
                                    std::vector<double> weights = {});

  std::size_t size() const { return values.size(); }
  bool is_uniform() const;  // all weights bitwise equal
};

// Pushforward under x -> -x: values negated and reversed, weights reversed.
// An involution (reflect(reflect(s)) == s bitwise).
SortedSample reflect(const SortedSample& sample);

// Squared 2-Wasserstein between equally weighted samples of the same length:
// (1/N) sum_i (u_i - v_i)^2 on the sorted values.
double w2sq_sorted_equal(const SortedSample& u, const SortedSample& v);

// Squared 2-Wasserstein between arbitrary weighted sorted samples via the
// monotone coupling (two-pointer mass sweep). O(n1 + n2).
double w2sq_sorted_weighted(const SortedSample& u, const SortedSample& v);

// Dispatches to the equal-length uniform fast path when applicable.
double w2sq_sorted(const SortedSample& u, const SortedSample& v);

struct PairCost {
  double cost;  // min over orientation of the squared W2
  int sign;     // +1 direct, -1 reflected; exact ties resolve to +1
};

// cost = min(W2^2(u, v), W2^2(u, reflect(v))).
PairCost pair_cost(const SortedSample& u, const SortedSample& v);

// Monte Carlo sliced squared 2-Wasserstein: average over `directions` unit
// vectors (normalized standard Gaussians drawn from Rng(seed)) of the 1D
// squared W2 between the projected clouds. No centering is applied; callers
// that want translation invariance must center first. Deterministic for a
// fixed seed.
double sliced_w2sq(const PointCloud& x, const PointCloud& y, int directions,
                   std::uint64_t seed);

}  // namespace riswie
