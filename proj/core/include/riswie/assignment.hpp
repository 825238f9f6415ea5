#pragma once

#include <vector>

#include <Eigen/Dense>

#include "riswie/embedding.hpp"

namespace riswie {

// Orientation-resolved axis-to-axis transport costs:
// cost(l, m) = min(W2^2(a_l, b_m), W2^2(a_l, reflect(b_m))),
// sign(l, m) = +1 if the direct orientation won (ties included), else -1.
struct CostSignMatrix {
  Eigen::MatrixXd cost;
  Eigen::MatrixXi sign;
};

CostSignMatrix cost_matrix(const AxisMarginals& a, const AxisMarginals& b);

struct HungarianResult {
  std::vector<int> assignment;  // row l -> column assignment[l]
  double total;                 // sum of selected entries
};

// Exact minimum-cost perfect assignment on a square cost matrix, O(k^3)
// shortest augmenting paths with dual potentials. Among cost-equal optima
// the lexicographically smallest assignment vector is returned (recovered
// from the tight-edge graph of the optimal duals). Throws non_finite on
// non-finite costs.
HungarianResult hungarian(const Eigen::MatrixXd& cost);

// One signed axis matching: permutation pi, orientation signs, and the
// selected per-axis squared-W2 costs. total = sum of pair_costs (divide by k
// for the mean).
struct SignedMatch {
  std::vector<int> permutation;
  std::vector<int> signs;
  std::vector<double> pair_costs;
  double total = 0.0;
};

// Hungarian on cost_matrix(a, b) plus sign/cost bookkeeping.
SignedMatch solve_signed_match(const CostSignMatrix& costs);

// Exhaustive minimum over all 2^k * k! signed permutations, evaluated from
// precomputed per-pair direct/reflected costs. Oracle for the solver above;
// k <= 8 (k_too_large otherwise). Ties resolve to the first combination in
// (lexicographic permutation, signs with +1 first) order.
SignedMatch brute_force_signed(const AxisMarginals& a, const AxisMarginals& b);

struct SoftMatchParams {
  double beta = 0.0;      // <= 0 selects 10 / median |c+ - c-|
  double eps = 0.0;       // <= 0 selects 1e-2 * mean soft cost
  int max_iterations = 10000;
  double tolerance = 1e-9;  // max row/column marginal violation
  // Geometric epsilon annealing from the cost scale down to eps. Disabling
  // it runs plain scaling at the target eps (used by the dual-monotonicity
  // property test; much slower to converge for small eps).
  bool anneal = true;
};

// Entropic soft relaxation of the signed matching.
struct SoftMatch {
  Eigen::MatrixXd plan;          // doubly stochastic, rows/cols sum to 1
  Eigen::MatrixXd soft_costs;    // sigmoid-blended orientation costs
  Eigen::MatrixXd sign_weights;  // weight on the direct orientation
  double objective = 0.0;  // <P, soft_costs>/k + eps * <P, log P>
  bool converged = false;  // marginal_error <= tolerance within budget
  int iterations = 0;      // scaling sweeps performed
  double marginal_error = 0.0;
  // Dual objective after each sweep at that sweep's epsilon. With annealing
  // disabled this sequence is nondecreasing (block coordinate ascent).
  std::vector<double> dual_trace;
};

// Blends orientations with w = sigmoid(-beta (c+ - c-)) into
// soft_costs = w c+ + (1 - w) c-, then solves the entropic transport problem
//   min_P <P, soft_costs>/k + eps <P, log P>  over doubly stochastic P
// by alternating row/column scaling in the log domain. Non-convergence sets
// converged = false on the result rather than throwing.
SoftMatch soft_match(const AxisMarginals& a, const AxisMarginals& b,
                     double beta = 0.0, double eps = 0.0);
SoftMatch soft_match(const AxisMarginals& a, const AxisMarginals& b,
                     const SoftMatchParams& params);

}  // namespace riswie
