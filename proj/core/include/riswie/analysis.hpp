#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riswie/distance.hpp"

namespace riswie {

// Symmetric distance matrix with zero diagonal, rows/cols labeled by ids.
struct DistanceMatrix {
  std::vector<std::string> ids;
  Eigen::MatrixXd values;
};

struct PairwiseConfig {
  EmbeddingConfig embedding;
  bool soft = false;  // sriswie values instead of riswie
  SoftMatchParams soft_params;
  int jobs = 0;  // 0 resolves via RISWIE_JOBS / hardware concurrency
};

// All-pairs distances. Pairs are computed in parallel; each pair writes only
// its own entry, so the output is identical for every worker count. Ids come
// from the clouds (empty ids fall back to the index). Errors from a pair are
// rethrown with both ids prepended, lowest pair first; a soft pair whose
// plan does not converge is reported the same way as no_convergence (the
// matrix has no channel for per-pair flags).
DistanceMatrix pairwise_matrix(const std::vector<PointCloud>& clouds,
                               const PairwiseConfig& config = {});

// Partition of m items into K equal stacks.
struct StackAssignment {
  std::vector<std::vector<int>> stacks;  // members sorted; stacks sorted by first member
  std::vector<int> stack_of;             // item index -> stack index
  double cost = 0.0;  // sum of within-stack pairwise distances
};

// Greedy capacity-constrained clustering of a distance matrix into
// stack_count equal-size stacks: farthest-point seeding tried from every
// item (plus `restarts` random seed sets drawn from `seed`), then repeated
// assignment of the globally cheapest (item, stack) pair. All ties break to
// the lowest index, so the result is deterministic. Throws not_divisible
// when m is not a multiple of stack_count.
StackAssignment stack_assign(const DistanceMatrix& distances, int stack_count,
                             int restarts = 0, std::uint64_t seed = 0);

// Fraction of items placed consistently with ground-truth labels, maximized
// over the stack-to-label pairing. Label count must equal the stack count
// (label_cardinality_mismatch otherwise).
double match_accuracy(const StackAssignment& assignment,
                      const std::vector<std::string>& truth_labels);

struct HybridMatrix {
  DistanceMatrix matrix;
  // A blend input whose off-diagonal entries were all equal carries no
  // ranking information; its normalized matrix is set to zero and flagged.
  bool spatial_degenerate = false;
  bool marker_degenerate = false;
};

// Blend of two distance matrices over the same ids: each is min-max
// normalized over its off-diagonal entries, then combined as
// lambda * spatial' + (1 - lambda) * marker'. lambda must lie in [0, 1].
HybridMatrix hybrid_matrix(const DistanceMatrix& spatial,
                           const DistanceMatrix& marker, double lambda);

struct OrderingAgreement {
  // Fraction of entry pairs ordered the same way by both matrices (ties in
  // both count as agreement). NaN when no pair passes the separation filter.
  double fraction = 0.0;
  std::int64_t compared = 0;  // entry pairs that passed the filter
  // Mean over entries of |percentile in first - percentile in second|,
  // percentiles from average ranks over all off-diagonal entries.
  double mean_abs_percentile_gap = 0.0;
};

// Rank agreement between two distance matrices over the same ids. Only entry
// pairs whose first-matrix gap is at least min_sep times the sample standard
// deviation of the first matrix's entries count toward the fraction.
OrderingAgreement ordering_agreement(const DistanceMatrix& first,
                                     const DistanceMatrix& second,
                                     double min_sep = 0.0);

// Least-squares fit of y ~ amplitude * x^(-exponent) in log-log space.
struct PowerLawFit {
  double amplitude = 0.0;
  double exponent = 0.0;
};

PowerLawFit fit_power_law(const std::vector<double>& xs,
                          const std::vector<double>& ys);

// Empirical bias/variance of the PCA distance estimator on Gaussian draws.
struct BiasVarianceSpec {
  std::vector<int> dims;
  std::vector<int> sample_sizes;  // at least 3, spanning a decade or more
  int trials = 50;                // at least 2
  // Covariance spectra; padded with 1.0 up to each dim (longer than a dim is
  // an error).
  std::vector<double> spectrum_a;
  std::vector<double> spectrum_b;
  std::uint64_t seed = 0;
  int jobs = 0;
};

struct BiasVarianceRow {
  int dim = 0;
  int n = 0;
  double truth = 0.0;          // population closed form
  double mean_distance = 0.0;  // over trials
  double bias = 0.0;           // |mean - truth|
  double variance = 0.0;       // sample variance over trials
  // Fitted decay exponents across this dim's sample sizes (bias ~ n^-a,
  // variance ~ n^-a); identical on every row of the same dim.
  double alpha_bias = 0.0;
  double alpha_var = 0.0;
};

// Trials are parallelized with one split RNG stream per (dim, n, trial), so
// results do not depend on the worker count.
std::vector<BiasVarianceRow> bias_variance_experiment(const BiasVarianceSpec& spec);

}  // namespace riswie
