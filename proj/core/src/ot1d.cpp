#include "riswie/ot1d.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "riswie/errors.hpp"
#include "riswie/rng.hpp"

namespace riswie {

namespace {

constexpr double kWeightSumTol = 1e-12;

void validate_weights(const std::vector<double>& w) {
  double sum = 0.0;
  for (double wi : w) {
    if (!std::isfinite(wi) || wi <= 0.0) {
      throw Error(ErrorCode::bad_spec, "sample weights must be positive");
    }
    sum += wi;
  }
  if (std::abs(sum - 1.0) > kWeightSumTol) {
    throw Error(ErrorCode::bad_spec,
                "sample weights must sum to 1 within 1e-12, got " +
                    std::to_string(sum));
  }
}

void validate_values(const std::vector<double>& v) {
  if (v.empty()) {
    throw Error(ErrorCode::bad_spec, "sample must contain at least one value");
  }
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::non_finite, "sample has non-finite values");
    }
  }
}

}  // namespace

SortedSample SortedSample::from_sorted(std::vector<double> values,
                                       std::vector<double> weights) {
  validate_values(values);
  if (weights.size() != values.size()) {
    throw Error(ErrorCode::length_mismatch,
                "weight count does not match value count");
  }
  validate_weights(weights);
  if (!std::is_sorted(values.begin(), values.end())) {
    throw Error(ErrorCode::bad_spec, "values must be nondecreasing");
  }
  SortedSample s;
  s.values = std::move(values);
  s.weights = std::move(weights);
  return s;
}

SortedSample SortedSample::from_unsorted(std::vector<double> values,
                                         std::vector<double> weights) {
  validate_values(values);
  const std::size_t n = values.size();
  if (weights.empty()) {
    weights.assign(n, 1.0 / static_cast<double>(n));
  } else if (weights.size() != n) {
    throw Error(ErrorCode::length_mismatch,
                "weight count does not match value count");
  }
  validate_weights(weights);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&values](std::size_t a, std::size_t b) {
                     return values[a] < values[b];
                   });

  SortedSample s;
  s.values.resize(n);
  s.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.values[i] = values[order[i]];
    s.weights[i] = weights[order[i]];
  }
  return s;
}

bool SortedSample::is_uniform() const {
  for (double w : weights) {
    if (w != weights[0]) return false;
  }
  return true;
}

SortedSample reflect(const SortedSample& sample) {
  const std::size_t n = sample.size();
  SortedSample out;
  out.values.resize(n);
  out.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] = -sample.values[n - 1 - i];
    out.weights[i] = sample.weights[n - 1 - i];
  }
  return out;
}

double w2sq_sorted_equal(const SortedSample& u, const SortedSample& v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::length_mismatch,
                "equal-weight path requires equal sample lengths (" +
                    std::to_string(u.size()) + " vs " +
                    std::to_string(v.size()) + ")");
  }
  const std::size_t n = u.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = u.values[i] - v.values[i];
    total += diff * diff;
  }
  return total / static_cast<double>(n);
}

double w2sq_sorted_weighted(const SortedSample& u, const SortedSample& v) {
  // Monotone coupling: walk both samples left to right, always matching the
  // smallest unconsumed mass. Weights are positive, so every step consumes
  // mass and the loop terminates after at most n1 + n2 steps.
  std::size_t i = 0;
  std::size_t j = 0;
  double a = u.weights[0];
  double b = v.weights[0];
  double total = 0.0;
  for (;;) {
    const double mass = std::min(a, b);
    const double diff = u.values[i] - v.values[j];
    total += mass * diff * diff;
    a -= mass;
    b -= mass;
    if (a <= 0.0) {
      if (++i == u.size()) break;
      a = u.weights[i];
    }
    if (b <= 0.0) {
      if (++j == v.size()) break;
      b = v.weights[j];
    }
  }
  return total;
}

double w2sq_sorted(const SortedSample& u, const SortedSample& v) {
  if (u.size() == v.size() && u.is_uniform() && v.is_uniform()) {
    return w2sq_sorted_equal(u, v);
  }
  return w2sq_sorted_weighted(u, v);
}

PairCost pair_cost(const SortedSample& u, const SortedSample& v) {
  const double c_plus = w2sq_sorted(u, v);
  const double c_minus = w2sq_sorted(u, reflect(v));
  if (c_minus < c_plus) return {c_minus, -1};
  return {c_plus, +1};
}

double sliced_w2sq(const PointCloud& x, const PointCloud& y, int directions,
                   std::uint64_t seed) {
  if (x.dim() != y.dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "sliced_w2sq: ambient dimensions differ (" +
                    std::to_string(x.dim()) + " vs " + std::to_string(y.dim()) +
                    ")");
  }
  if (directions < 1) {
    throw Error(ErrorCode::bad_spec, "sliced_w2sq: need at least one direction");
  }

  const Eigen::Index d = x.dim();
  Rng rng(seed);
  Eigen::VectorXd direction(d);
  std::vector<double> px(static_cast<std::size_t>(x.size()));
  std::vector<double> py(static_cast<std::size_t>(y.size()));
  std::vector<double> wx(x.weights.data(), x.weights.data() + x.size());
  std::vector<double> wy(y.weights.data(), y.weights.data() + y.size());

  double total = 0.0;
  for (int l = 0; l < directions; ++l) {
    double norm = 0.0;
    do {
      for (Eigen::Index c = 0; c < d; ++c) direction[c] = rng.normal();
      norm = direction.norm();
    } while (norm < 1e-12);
    direction /= norm;

    Eigen::Map<Eigen::VectorXd>(px.data(), x.size()) = x.points * direction;
    Eigen::Map<Eigen::VectorXd>(py.data(), y.size()) = y.points * direction;
    const SortedSample sx = SortedSample::from_unsorted(px, wx);
    const SortedSample sy = SortedSample::from_unsorted(py, wy);
    total += w2sq_sorted(sx, sy);
  }
  return total / static_cast<double>(directions);
}

}  // namespace riswie
