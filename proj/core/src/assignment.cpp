#include "riswie/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "riswie/errors.hpp"

namespace riswie {

namespace {

void check_axis_counts(const AxisMarginals& a, const AxisMarginals& b) {
  if (a.k() != b.k()) {
    throw Error(ErrorCode::axis_count_mismatch,
                "axis counts differ: " + std::to_string(a.k()) + " vs " +
                    std::to_string(b.k()));
  }
  if (a.k() < 1) {
    throw Error(ErrorCode::axis_count_mismatch, "no axes to match");
  }
}

// Direct and reflected squared-W2 costs for every axis pair.
void orientation_costs(const AxisMarginals& a, const AxisMarginals& b,
                       Eigen::MatrixXd& c_plus, Eigen::MatrixXd& c_minus) {
  const int k = a.k();
  c_plus.resize(k, k);
  c_minus.resize(k, k);
  for (int m = 0; m < k; ++m) {
    const SortedSample reflected = reflect(b.axes[static_cast<std::size_t>(m)]);
    for (int l = 0; l < k; ++l) {
      const SortedSample& al = a.axes[static_cast<std::size_t>(l)];
      c_plus(l, m) = w2sq_sorted(al, b.axes[static_cast<std::size_t>(m)]);
      c_minus(l, m) = w2sq_sorted(al, reflected);
    }
  }
}

// Kuhn augmenting search over tight edges, restricted to free columns.
bool kuhn_augment(int row, const std::vector<std::vector<int>>& tight_cols,
                  const std::vector<char>& col_blocked,
                  std::vector<char>& visited, std::vector<int>& match_col) {
  for (int m : tight_cols[static_cast<std::size_t>(row)]) {
    if (col_blocked[static_cast<std::size_t>(m)] ||
        visited[static_cast<std::size_t>(m)]) {
      continue;
    }
    visited[static_cast<std::size_t>(m)] = 1;
    if (match_col[static_cast<std::size_t>(m)] < 0 ||
        kuhn_augment(match_col[static_cast<std::size_t>(m)], tight_cols,
                     col_blocked, visited, match_col)) {
      match_col[static_cast<std::size_t>(m)] = row;
      return true;
    }
  }
  return false;
}

// Can rows [first_row, k) be perfectly matched into the unblocked columns?
bool rows_matchable(int first_row, int k,
                    const std::vector<std::vector<int>>& tight_cols,
                    const std::vector<char>& col_blocked) {
  std::vector<int> match_col(static_cast<std::size_t>(k), -1);
  std::vector<char> visited(static_cast<std::size_t>(k));
  for (int r = first_row; r < k; ++r) {
    std::fill(visited.begin(), visited.end(), char{0});
    if (!kuhn_augment(r, tight_cols, col_blocked, visited, match_col)) {
      return false;
    }
  }
  return true;
}

}  // namespace

CostSignMatrix cost_matrix(const AxisMarginals& a, const AxisMarginals& b) {
  check_axis_counts(a, b);
  const int k = a.k();
  Eigen::MatrixXd c_plus;
  Eigen::MatrixXd c_minus;
  orientation_costs(a, b, c_plus, c_minus);

  CostSignMatrix out;
  out.cost.resize(k, k);
  out.sign.resize(k, k);
  for (int l = 0; l < k; ++l) {
    for (int m = 0; m < k; ++m) {
      if (c_minus(l, m) < c_plus(l, m)) {
        out.cost(l, m) = c_minus(l, m);
        out.sign(l, m) = -1;
      } else {
        out.cost(l, m) = c_plus(l, m);
        out.sign(l, m) = +1;
      }
    }
  }
  return out;
}

HungarianResult hungarian(const Eigen::MatrixXd& cost) {
  const int k = static_cast<int>(cost.rows());
  if (cost.cols() != k || k < 1) {
    throw Error(ErrorCode::dimension_mismatch,
                "hungarian: cost matrix must be square and nonempty");
  }
  if (!cost.allFinite()) {
    throw Error(ErrorCode::non_finite, "hungarian: non-finite cost entries");
  }

  // Shortest augmenting paths with potentials (1-indexed, column 0 is the
  // virtual source). Ties in the delta scan resolve to the lowest column.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(k) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(k) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(k) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(k) + 1, 0);
  for (int i = 1; i <= k; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(k) + 1, kInf);
    std::vector<char> used(static_cast<std::size_t>(k) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= k; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= k; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> assignment(static_cast<std::size_t>(k), -1);
  for (int j = 1; j <= k; ++j) {
    assignment[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] =
        j - 1;
  }

  // Lexicographic selection among cost ties: optimal assignments are exactly
  // the perfect matchings of edges tight under the optimal duals
  // (complementary slackness), so pick columns greedily row by row, keeping
  // only choices that leave the remaining rows matchable.
  double magnitude = cost.cwiseAbs().maxCoeff();
  for (int i = 1; i <= k; ++i) {
    magnitude = std::max(magnitude, std::abs(u[static_cast<std::size_t>(i)]));
    magnitude = std::max(magnitude, std::abs(v[static_cast<std::size_t>(i)]));
  }
  const double tau =
      64.0 * std::numeric_limits<double>::epsilon() * (1.0 + magnitude);
  std::vector<std::vector<int>> tight_cols(static_cast<std::size_t>(k));
  for (int l = 0; l < k; ++l) {
    for (int m = 0; m < k; ++m) {
      const double reduced = cost(l, m) - u[static_cast<std::size_t>(l) + 1] -
                             v[static_cast<std::size_t>(m) + 1];
      if (reduced <= tau) tight_cols[static_cast<std::size_t>(l)].push_back(m);
    }
  }

  std::vector<int> lex(static_cast<std::size_t>(k), -1);
  std::vector<char> col_blocked(static_cast<std::size_t>(k), 0);
  bool ok = true;
  for (int l = 0; l < k && ok; ++l) {
    ok = false;
    for (int m : tight_cols[static_cast<std::size_t>(l)]) {
      if (col_blocked[static_cast<std::size_t>(m)]) continue;
      col_blocked[static_cast<std::size_t>(m)] = 1;
      if (rows_matchable(l + 1, k, tight_cols, col_blocked)) {
        lex[static_cast<std::size_t>(l)] = m;
        ok = true;
        break;
      }
      col_blocked[static_cast<std::size_t>(m)] = 0;
    }
  }
  if (ok) assignment = lex;  // otherwise keep the augmenting-path assignment

  double total = 0.0;
  for (int l = 0; l < k; ++l) {
    total += cost(l, assignment[static_cast<std::size_t>(l)]);
  }
  return {std::move(assignment), total};
}

SignedMatch solve_signed_match(const CostSignMatrix& costs) {
  const HungarianResult solved = hungarian(costs.cost);
  const int k = static_cast<int>(costs.cost.rows());
  SignedMatch match;
  match.permutation = solved.assignment;
  match.signs.resize(static_cast<std::size_t>(k));
  match.pair_costs.resize(static_cast<std::size_t>(k));
  for (int l = 0; l < k; ++l) {
    const int m = match.permutation[static_cast<std::size_t>(l)];
    match.signs[static_cast<std::size_t>(l)] = costs.sign(l, m);
    match.pair_costs[static_cast<std::size_t>(l)] = costs.cost(l, m);
  }
  match.total = solved.total;
  return match;
}

SignedMatch brute_force_signed(const AxisMarginals& a, const AxisMarginals& b) {
  check_axis_counts(a, b);
  const int k = a.k();
  if (k > 8) {
    throw Error(ErrorCode::k_too_large,
                "brute_force_signed is limited to k <= 8, got k=" +
                    std::to_string(k));
  }
  Eigen::MatrixXd c_plus;
  Eigen::MatrixXd c_minus;
  orientation_costs(a, b, c_plus, c_minus);

  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best_perm;
  unsigned best_mask = 0;
  double best_total = std::numeric_limits<double>::infinity();
  const unsigned mask_end = 1u << k;
  do {
    // Bit l set selects the reflected orientation for axis l, so lower masks
    // prefer the direct orientation on ties.
    for (unsigned mask = 0; mask < mask_end; ++mask) {
      double total = 0.0;
      for (int l = 0; l < k; ++l) {
        const int m = perm[static_cast<std::size_t>(l)];
        total += (mask >> l & 1u) ? c_minus(l, m) : c_plus(l, m);
      }
      if (total < best_total) {
        best_total = total;
        best_perm = perm;
        best_mask = mask;
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  SignedMatch match;
  match.permutation = best_perm;
  match.signs.resize(static_cast<std::size_t>(k));
  match.pair_costs.resize(static_cast<std::size_t>(k));
  match.total = 0.0;
  for (int l = 0; l < k; ++l) {
    const int m = best_perm[static_cast<std::size_t>(l)];
    const bool reflected = (best_mask >> l & 1u) != 0;
    match.signs[static_cast<std::size_t>(l)] = reflected ? -1 : +1;
    match.pair_costs[static_cast<std::size_t>(l)] =
        reflected ? c_minus(l, m) : c_plus(l, m);
    match.total += match.pair_costs[static_cast<std::size_t>(l)];
  }
  return match;
}

namespace {

double log_sum_exp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

}  // namespace

SoftMatch soft_match(const AxisMarginals& a, const AxisMarginals& b,
                     double beta, double eps) {
  SoftMatchParams params;
  params.beta = beta;
  params.eps = eps;
  return soft_match(a, b, params);
}

SoftMatch soft_match(const AxisMarginals& a, const AxisMarginals& b,
                     const SoftMatchParams& params) {
  check_axis_counts(a, b);
  const int k = a.k();
  const double kd = static_cast<double>(k);

  Eigen::MatrixXd c_plus;
  Eigen::MatrixXd c_minus;
  orientation_costs(a, b, c_plus, c_minus);

  double beta = params.beta;
  if (beta <= 0.0) {
    std::vector<double> gaps;
    gaps.reserve(static_cast<std::size_t>(k) * static_cast<std::size_t>(k));
    for (int l = 0; l < k; ++l) {
      for (int m = 0; m < k; ++m) gaps.push_back(std::abs(c_plus(l, m) - c_minus(l, m)));
    }
    std::sort(gaps.begin(), gaps.end());
    const std::size_t mid = gaps.size() / 2;
    const double median = gaps.size() % 2 == 1
                              ? gaps[mid]
                              : 0.5 * (gaps[mid - 1] + gaps[mid]);
    beta = median > 0.0 ? 10.0 / median : 1.0;
  }

  SoftMatch out;
  out.sign_weights.resize(k, k);
  out.soft_costs.resize(k, k);
  for (int l = 0; l < k; ++l) {
    for (int m = 0; m < k; ++m) {
      // Saturates exactly to 0/1 when |beta * gap| overflows exp, which is
      // what makes the hard-matching limit exact in floating point.
      const double w = 1.0 / (1.0 + std::exp(beta * (c_plus(l, m) - c_minus(l, m))));
      out.sign_weights(l, m) = w;
      out.soft_costs(l, m) = w * c_plus(l, m) + (1.0 - w) * c_minus(l, m);
    }
  }

  double eps = params.eps;
  if (eps <= 0.0) eps = 1e-2 * out.soft_costs.mean();
  if (eps <= 0.0) eps = 1e-12;  // degenerate all-zero costs

  const Eigen::MatrixXd cp = out.soft_costs / kd;  // cost fed to the solver

  // Geometric annealing schedule from the cost scale down to the target.
  std::vector<double> stages;
  if (params.anneal) {
    double e = std::max(cp.cwiseAbs().mean(), eps);
    while (e > eps * (1.0 + 1e-9)) {
      stages.push_back(e);
      e = std::max(0.5 * e, eps);
    }
  }
  stages.push_back(eps);

  Eigen::VectorXd f = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd scratch(k);
  Eigen::MatrixXd plan(k, k);

  const auto compute_plan = [&](double e) {
    for (int l = 0; l < k; ++l) {
      for (int m = 0; m < k; ++m) {
        plan(l, m) = std::exp((f[l] + g[m] - cp(l, m)) / e);
      }
    }
  };
  const auto marginal_error = [&]() {
    double err = 0.0;
    for (int l = 0; l < k; ++l) err = std::max(err, std::abs(plan.row(l).sum() - 1.0));
    for (int m = 0; m < k; ++m) err = std::max(err, std::abs(plan.col(m).sum() - 1.0));
    return err;
  };

  int sweeps = 0;
  const int budget = std::max(params.max_iterations, 1);
  for (std::size_t stage = 0; stage < stages.size(); ++stage) {
    const double e = stages[stage];
    const bool final_stage = stage + 1 == stages.size();
    const int remaining = budget - sweeps;
    if (remaining <= 0) break;
    // Early stages only need to place the potentials well enough to warm-start
    // the next one; they get a loose tolerance and a bounded sweep count so
    // the final epsilon keeps most of the budget.
    const double stage_tol =
        final_stage ? params.tolerance : std::max(1e-6, params.tolerance);
    const int stage_budget =
        final_stage ? remaining
                    : std::min(200, std::max(1, remaining -
                                                    static_cast<int>(
                                                        stages.size() - 1 - stage)));

    for (int it = 0; it < stage_budget; ++it) {
      for (int l = 0; l < k; ++l) {
        scratch = (g - cp.row(l).transpose()) / e;
        f[l] = -e * log_sum_exp(scratch);
      }
      for (int m = 0; m < k; ++m) {
        scratch = (f - cp.col(m)) / e;
        g[m] = -e * log_sum_exp(scratch);
      }
      ++sweeps;

      compute_plan(e);
      // Dual of the entropic problem at this stage's epsilon; nondecreasing
      // under exact alternating maximization.
      out.dual_trace.push_back(f.sum() + g.sum() + e * kd - e * plan.sum());
      if (marginal_error() <= stage_tol) break;
    }
  }

  compute_plan(eps);
  out.plan = plan;
  out.iterations = sweeps;
  out.marginal_error = marginal_error();
  out.converged = out.marginal_error <= params.tolerance;

  double transport = 0.0;
  double entropy = 0.0;
  for (int l = 0; l < k; ++l) {
    for (int m = 0; m < k; ++m) {
      const double p = plan(l, m);
      transport += p * out.soft_costs(l, m);
      if (p > 0.0) entropy += p * std::log(p);
    }
  }
  out.objective = transport / kd + eps * entropy;
  return out;
}

}  // namespace riswie
