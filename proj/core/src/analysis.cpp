#include "riswie/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "riswie/errors.hpp"
#include "riswie/parallel.hpp"
#include "riswie/rng.hpp"

namespace riswie {

namespace {

void check_same_ids(const DistanceMatrix& a, const DistanceMatrix& b) {
  if (a.ids != b.ids) {
    throw Error(ErrorCode::id_mismatch,
                "distance matrices are over different id sequences");
  }
  if (a.values.rows() != b.values.rows() ||
      a.values.cols() != b.values.cols()) {
    throw Error(ErrorCode::dimension_mismatch,
                "distance matrices have different shapes");
  }
}

// Off-diagonal entries of the upper triangle in row-major order.
std::vector<double> upper_entries(const Eigen::MatrixXd& values) {
  const Eigen::Index m = values.rows();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m * (m - 1) / 2));
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) out.push_back(values(i, j));
  }
  return out;
}

// Average ranks (1-based, ties averaged) divided by the entry count.
std::vector<double> percentile_ranks(const std::vector<double>& values) {
  const std::size_t p = values.size();
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&values](std::size_t a, std::size_t b) {
                     return values[a] < values[b];
                   });
  std::vector<double> ranks(p);
  std::size_t i = 0;
  while (i < p) {
    std::size_t j = i;
    while (j + 1 < p && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  for (double& r : ranks) r /= static_cast<double>(p);
  return ranks;
}

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

}  // namespace

DistanceMatrix pairwise_matrix(const std::vector<PointCloud>& clouds,
                               const PairwiseConfig& config) {
  const std::size_t m = clouds.size();
  if (m < 2) {
    throw Error(ErrorCode::bad_spec, "pairwise matrix needs at least two clouds");
  }

  DistanceMatrix out;
  out.ids.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    out.ids.push_back(clouds[i].id.empty() ? std::to_string(i) : clouds[i].id);
  }
  out.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                     static_cast<Eigen::Index>(m));

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(m * (m - 1) / 2);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
  }

  std::vector<double> results(pairs.size());
  parallel_for(
      static_cast<std::int64_t>(pairs.size()), config.jobs,
      [&](std::int64_t t) {
        const auto [i, j] = pairs[static_cast<std::size_t>(t)];
        try {
          if (config.soft) {
            const SriswieResult r = sriswie_distance(
                clouds[i], clouds[j], config.embedding, config.soft_params);
            if (!r.soft.converged) {
              throw Error(ErrorCode::no_convergence,
                          "soft plan missed the marginal tolerance within "
                          "the iteration budget");
            }
            results[static_cast<std::size_t>(t)] = r.value;
          } else {
            results[static_cast<std::size_t>(t)] =
                riswie_distance(clouds[i], clouds[j], config.embedding)
                    .distance;
          }
        } catch (const Error& e) {
          throw Error(e.code(), "pair (" + out.ids[i] + ", " + out.ids[j] +
                                    "): " + e.what());
        }
      });

  for (std::size_t t = 0; t < pairs.size(); ++t) {
    const auto [i, j] = pairs[t];
    out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
        results[t];
    out.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
        results[t];
  }
  return out;
}

namespace {

struct GreedyRun {
  std::vector<std::vector<int>> stacks;
  std::vector<int> stack_of;
  double cost = 0.0;
};

// Fill stacks from the given seeds by repeatedly assigning the globally
// cheapest (item, stack) pair; ties break to the lowest item, then stack.
GreedyRun greedy_fill(const Eigen::MatrixXd& d, const std::vector<int>& seeds,
                      int capacity) {
  const int m = static_cast<int>(d.rows());
  const int stack_count = static_cast<int>(seeds.size());
  GreedyRun run;
  run.stacks.assign(static_cast<std::size_t>(stack_count), {});
  run.stack_of.assign(static_cast<std::size_t>(m), -1);

  // attach[r][k] = sum of distances from r to the current members of k.
  Eigen::MatrixXd attach = Eigen::MatrixXd::Zero(m, stack_count);
  for (int k = 0; k < stack_count; ++k) {
    const int s = seeds[static_cast<std::size_t>(k)];
    run.stacks[static_cast<std::size_t>(k)].push_back(s);
    run.stack_of[static_cast<std::size_t>(s)] = k;
    attach.col(k) = d.col(s);
  }

  for (int placed = stack_count; placed < m; ++placed) {
    int best_r = -1;
    int best_k = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < m; ++r) {
      if (run.stack_of[static_cast<std::size_t>(r)] >= 0) continue;
      for (int k = 0; k < stack_count; ++k) {
        if (static_cast<int>(run.stacks[static_cast<std::size_t>(k)].size()) >=
            capacity) {
          continue;
        }
        if (attach(r, k) < best) {
          best = attach(r, k);
          best_r = r;
          best_k = k;
        }
      }
    }
    run.stacks[static_cast<std::size_t>(best_k)].push_back(best_r);
    run.stack_of[static_cast<std::size_t>(best_r)] = best_k;
    for (int r = 0; r < m; ++r) {
      if (run.stack_of[static_cast<std::size_t>(r)] < 0) {
        attach(r, best_k) += d(r, best_r);
      }
    }
  }

  for (const auto& stack : run.stacks) {
    for (std::size_t i = 0; i < stack.size(); ++i) {
      for (std::size_t j = i + 1; j < stack.size(); ++j) {
        run.cost += d(stack[i], stack[j]);
      }
    }
  }
  return run;
}

std::vector<int> farthest_point_seeds(const Eigen::MatrixXd& d, int start,
                                      int stack_count) {
  const int m = static_cast<int>(d.rows());
  std::vector<int> seeds{start};
  std::vector<char> chosen(static_cast<std::size_t>(m), 0);
  chosen[static_cast<std::size_t>(start)] = 1;
  Eigen::VectorXd dist_to_set = d.col(start);
  while (static_cast<int>(seeds.size()) < stack_count) {
    int next = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < m; ++r) {
      if (chosen[static_cast<std::size_t>(r)]) continue;
      if (dist_to_set[r] > best) {  // strict: ties keep the lowest index
        best = dist_to_set[r];
        next = r;
      }
    }
    seeds.push_back(next);
    chosen[static_cast<std::size_t>(next)] = 1;
    dist_to_set = dist_to_set.cwiseMin(d.col(next));
  }
  return seeds;
}

}  // namespace

StackAssignment stack_assign(const DistanceMatrix& distances, int stack_count,
                             int restarts, std::uint64_t seed) {
  const int m = static_cast<int>(distances.values.rows());
  if (m < 1 || distances.values.cols() != m) {
    throw Error(ErrorCode::dimension_mismatch,
                "distance matrix must be square and nonempty");
  }
  if (stack_count < 1 || stack_count > m) {
    throw Error(ErrorCode::bad_spec,
                "stack count must lie in [1, m], got " +
                    std::to_string(stack_count));
  }
  if (m % stack_count != 0) {
    throw Error(ErrorCode::not_divisible,
                std::to_string(m) + " items cannot form " +
                    std::to_string(stack_count) + " equal stacks");
  }
  if (restarts < 0) {
    throw Error(ErrorCode::bad_spec, "restart count must be nonnegative");
  }
  const int capacity = m / stack_count;

  GreedyRun best;
  best.cost = std::numeric_limits<double>::infinity();
  const auto consider = [&](const std::vector<int>& seeds) {
    GreedyRun run = greedy_fill(distances.values, seeds, capacity);
    if (run.cost < best.cost) best = std::move(run);
  };

  for (int s = 0; s < m; ++s) {
    consider(farthest_point_seeds(distances.values, s, stack_count));
  }
  const Rng root(seed);
  for (int r = 0; r < restarts; ++r) {
    Rng rng = root.split(static_cast<std::uint64_t>(r));
    // Partial Fisher-Yates: the first stack_count entries of a shuffle.
    std::vector<int> pool(static_cast<std::size_t>(m));
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<int> seeds;
    seeds.reserve(static_cast<std::size_t>(stack_count));
    for (int k = 0; k < stack_count; ++k) {
      const std::size_t pick =
          static_cast<std::size_t>(k) +
          static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(m - k)));
      std::swap(pool[static_cast<std::size_t>(k)], pool[pick]);
      seeds.push_back(pool[static_cast<std::size_t>(k)]);
    }
    consider(seeds);
  }

  // Canonical form: members ascending, stacks ordered by first member.
  StackAssignment out;
  out.cost = best.cost;
  out.stacks = std::move(best.stacks);
  for (auto& stack : out.stacks) std::sort(stack.begin(), stack.end());
  std::sort(out.stacks.begin(), out.stacks.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) {
              return a.front() < b.front();
            });
  out.stack_of.assign(static_cast<std::size_t>(m), -1);
  for (std::size_t k = 0; k < out.stacks.size(); ++k) {
    for (int item : out.stacks[k]) {
      out.stack_of[static_cast<std::size_t>(item)] = static_cast<int>(k);
    }
  }
  return out;
}

double match_accuracy(const StackAssignment& assignment,
                      const std::vector<std::string>& truth_labels) {
  const std::size_t m = assignment.stack_of.size();
  if (truth_labels.size() != m) {
    throw Error(ErrorCode::dimension_mismatch,
                "label count " + std::to_string(truth_labels.size()) +
                    " does not match item count " + std::to_string(m));
  }
  const int stack_count = static_cast<int>(assignment.stacks.size());

  // Dense label ids in first-occurrence order.
  std::vector<std::string> label_names;
  std::vector<int> truth(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto it =
        std::find(label_names.begin(), label_names.end(), truth_labels[i]);
    if (it == label_names.end()) {
      truth[i] = static_cast<int>(label_names.size());
      label_names.push_back(truth_labels[i]);
    } else {
      truth[i] = static_cast<int>(it - label_names.begin());
    }
  }
  if (static_cast<int>(label_names.size()) != stack_count) {
    throw Error(ErrorCode::label_cardinality_mismatch,
                "found " + std::to_string(label_names.size()) +
                    " distinct labels for " + std::to_string(stack_count) +
                    " stacks");
  }

  Eigen::MatrixXd overlap = Eigen::MatrixXd::Zero(stack_count, stack_count);
  for (std::size_t i = 0; i < m; ++i) {
    overlap(assignment.stack_of[i], truth[i]) += 1.0;
  }
  // Maximize the matched overlap = minimize its negation.
  const HungarianResult pairing = hungarian(-overlap);
  double matched = 0.0;
  for (int k = 0; k < stack_count; ++k) {
    matched += overlap(k, pairing.assignment[static_cast<std::size_t>(k)]);
  }
  return matched / static_cast<double>(m);
}

HybridMatrix hybrid_matrix(const DistanceMatrix& spatial,
                           const DistanceMatrix& marker, double lambda) {
  check_same_ids(spatial, marker);
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error(ErrorCode::bad_spec,
                "blend weight must lie in [0, 1], got " + std::to_string(lambda));
  }
  const Eigen::Index m = spatial.values.rows();

  const auto normalized = [m](const Eigen::MatrixXd& values, bool& degenerate) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        if (i == j) continue;
        lo = std::min(lo, values(i, j));
        hi = std::max(hi, values(i, j));
      }
    }
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
    if (!(hi > lo)) {
      degenerate = true;  // constant off-diagonals carry no ranking signal
      return out;
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        if (i != j) out(i, j) = (values(i, j) - lo) / (hi - lo);
      }
    }
    return out;
  };

  HybridMatrix out;
  const Eigen::MatrixXd s = normalized(spatial.values, out.spatial_degenerate);
  const Eigen::MatrixXd k = normalized(marker.values, out.marker_degenerate);
  out.matrix.ids = spatial.ids;
  out.matrix.values = lambda * s + (1.0 - lambda) * k;
  return out;
}

OrderingAgreement ordering_agreement(const DistanceMatrix& first,
                                     const DistanceMatrix& second,
                                     double min_sep) {
  check_same_ids(first, second);
  if (min_sep < 0.0) {
    throw Error(ErrorCode::bad_spec, "separation multiplier must be nonnegative");
  }
  if (first.values.rows() < 2) {
    throw Error(ErrorCode::bad_spec,
                "ordering agreement needs at least two items");
  }

  const std::vector<double> e1 = upper_entries(first.values);
  const std::vector<double> e2 = upper_entries(second.values);
  const std::size_t p = e1.size();

  double threshold = 0.0;
  if (min_sep > 0.0 && p >= 2) {
    const double mean =
        std::accumulate(e1.begin(), e1.end(), 0.0) / static_cast<double>(p);
    double ss = 0.0;
    for (double v : e1) ss += (v - mean) * (v - mean);
    threshold = min_sep * std::sqrt(ss / static_cast<double>(p - 1));
  }

  std::int64_t compared = 0;
  std::int64_t agreements = 0;
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a + 1; b < p; ++b) {
      const double gap = e1[a] - e1[b];
      if (std::abs(gap) < threshold) continue;
      ++compared;
      if (sign_of(gap) == sign_of(e2[a] - e2[b])) ++agreements;
    }
  }

  OrderingAgreement out;
  out.compared = compared;
  out.fraction = compared > 0 ? static_cast<double>(agreements) /
                                    static_cast<double>(compared)
                              : std::numeric_limits<double>::quiet_NaN();

  const std::vector<double> r1 = percentile_ranks(e1);
  const std::vector<double> r2 = percentile_ranks(e2);
  double gap_sum = 0.0;
  for (std::size_t i = 0; i < p; ++i) gap_sum += std::abs(r1[i] - r2[i]);
  out.mean_abs_percentile_gap = gap_sum / static_cast<double>(p);
  return out;
}

PowerLawFit fit_power_law(const std::vector<double>& xs,
                          const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw Error(ErrorCode::bad_spec,
                "power-law fit needs matching series of length >= 2");
  }
  const std::size_t n = xs.size();
  std::vector<double> lx(n);
  std::vector<double> ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0)) {
      throw Error(ErrorCode::bad_spec, "power-law fit needs positive x values");
    }
    lx[i] = std::log(xs[i]);
    // Exact zeros would put -inf into the fit; floor far below anything a
    // finite experiment can produce.
    ly[i] = std::log(std::max(ys[i], 1e-300));
  }
  const double mlx =
      std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(n);
  const double mly =
      std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mlx) * (lx[i] - mlx);
    sxy += (lx[i] - mlx) * (ly[i] - mly);
  }
  if (sxx == 0.0) {
    throw Error(ErrorCode::bad_spec, "power-law fit needs distinct x values");
  }
  PowerLawFit fit;
  fit.exponent = -sxy / sxx;
  fit.amplitude = std::exp(mly + fit.exponent * mlx);
  return fit;
}

std::vector<BiasVarianceRow> bias_variance_experiment(
    const BiasVarianceSpec& spec) {
  if (spec.dims.empty()) {
    throw Error(ErrorCode::bad_spec, "no dimensions given");
  }
  for (int d : spec.dims) {
    if (d < 1) throw Error(ErrorCode::bad_spec, "dimensions must be >= 1");
  }
  if (spec.sample_sizes.size() < 3) {
    throw Error(ErrorCode::bad_spec,
                "need at least three sample sizes for a decay fit");
  }
  int n_min = spec.sample_sizes.front();
  int n_max = n_min;
  for (int n : spec.sample_sizes) {
    if (n < 2) throw Error(ErrorCode::bad_spec, "sample sizes must be >= 2");
    n_min = std::min(n_min, n);
    n_max = std::max(n_max, n);
  }
  if (n_max < 10 * n_min) {
    throw Error(ErrorCode::bad_spec,
                "sample sizes must span at least one decade");
  }
  if (spec.trials < 2) {
    throw Error(ErrorCode::bad_spec, "need at least two trials for a variance");
  }

  const auto padded = [](const std::vector<double>& spectrum, int d) {
    if (static_cast<int>(spectrum.size()) > d) {
      throw Error(ErrorCode::bad_spec,
                  "spectrum of length " + std::to_string(spectrum.size()) +
                      " does not fit dimension " + std::to_string(d));
    }
    std::vector<double> full(static_cast<std::size_t>(d), 1.0);
    std::copy(spectrum.begin(), spectrum.end(), full.begin());
    return GaussianSpec::from_eigenvalues(std::move(full));
  };

  const Rng root(spec.seed);
  std::vector<BiasVarianceRow> rows;
  rows.reserve(spec.dims.size() * spec.sample_sizes.size());

  for (std::size_t di = 0; di < spec.dims.size(); ++di) {
    const int d = spec.dims[di];
    const GaussianSpec spec_a = padded(spec.spectrum_a, d);
    const GaussianSpec spec_b = padded(spec.spectrum_b, d);
    const double truth = gaussian_closed_form(spec_a, spec_b);

    EmbeddingConfig config;
    config.kind = EmbeddingKind::pca;
    config.k = d;

    const Rng dim_rng = root.split(static_cast<std::uint64_t>(di));
    std::vector<double> ns;
    std::vector<double> biases;
    std::vector<double> variances;
    const std::size_t first_row = rows.size();

    for (std::size_t ni = 0; ni < spec.sample_sizes.size(); ++ni) {
      const int n = spec.sample_sizes[ni];
      const Rng size_rng = dim_rng.split(static_cast<std::uint64_t>(ni));

      std::vector<double> values(static_cast<std::size_t>(spec.trials));
      parallel_for(spec.trials, spec.jobs, [&](std::int64_t t) {
        Rng rng = size_rng.split(static_cast<std::uint64_t>(t));
        const auto sample = [&rng, n, d](const GaussianSpec& g) {
          Eigen::MatrixXd pts(n, d);
          for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index c = 0; c < d; ++c) {
              pts(i, c) = std::sqrt(g.eigenvalues[c]) * rng.normal();
            }
          }
          return PointCloud::from_points(std::move(pts));
        };
        const PointCloud x = sample(spec_a);
        const PointCloud y = sample(spec_b);
        values[static_cast<std::size_t>(t)] =
            riswie_distance(x, y, config).distance;
      });

      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= static_cast<double>(spec.trials);
      double var = 0.0;
      for (double v : values) var += (v - mean) * (v - mean);
      var /= static_cast<double>(spec.trials - 1);

      BiasVarianceRow row;
      row.dim = d;
      row.n = n;
      row.truth = truth;
      row.mean_distance = mean;
      row.bias = std::abs(mean - truth);
      row.variance = var;
      rows.push_back(row);

      ns.push_back(static_cast<double>(n));
      biases.push_back(row.bias);
      variances.push_back(var);
    }

    const double alpha_bias = fit_power_law(ns, biases).exponent;
    const double alpha_var = fit_power_law(ns, variances).exponent;
    for (std::size_t r = first_row; r < rows.size(); ++r) {
      rows[r].alpha_bias = alpha_bias;
      rows[r].alpha_var = alpha_var;
    }
  }
  return rows;
}

}  // namespace riswie
