#pragma once

#include <vector>

#include "riswie/assignment.hpp"
#include "riswie/embedding.hpp"
#include "riswie/point_cloud.hpp"

namespace riswie {

struct EmbeddingConfig {
  EmbeddingKind kind = EmbeddingKind::pca;
  // 0 selects min(d_x, d_y) for pca/coordinate and min(d_x, d_y, n-2) for
  // diffusion.
  int k = 0;
  DiffusionParams diffusion;
};

// Rigid-invariant sliced transport distance between two clouds:
// both are centered, embedded into k axis marginals, the axes are matched by
// a minimum-cost signed permutation, and the distance is
// sqrt(total matched squared-W2 / k).
struct RiswieResult {
  double distance = 0.0;
  double squared = 0.0;  // total / k
  int k = 0;
  SignedMatch match;
  EmbeddingBasis basis_x;
  EmbeddingBasis basis_y;
};

RiswieResult riswie_distance(const PointCloud& x, const PointCloud& y,
                             const EmbeddingConfig& config = {});

// Soft relaxation: the signed permutation is replaced by an entropic
// transport plan over sigmoid-blended orientation costs. value converges to
// the hard distance as beta -> inf, eps -> 0.
struct SriswieResult {
  double value = 0.0;      // sqrt(max(objective, 0))
  double objective = 0.0;  // <P, soft costs>/k + eps <P, log P>
  int k = 0;
  SoftMatch soft;
  EmbeddingBasis basis_x;
  EmbeddingBasis basis_y;
};

SriswieResult sriswie_distance(const PointCloud& x, const PointCloud& y,
                               const EmbeddingConfig& config = {},
                               const SoftMatchParams& params = {});

// A centered Gaussian identified by its covariance spectrum.
struct GaussianSpec {
  Eigen::VectorXd eigenvalues;  // sorted descending, nonnegative

  // Sorts and validates (nonnegative, finite, nonempty).
  static GaussianSpec from_eigenvalues(std::vector<double> values);
  int dim() const { return static_cast<int>(eigenvalues.size()); }
};

// Population distance between centered Gaussians with the PCA embedding:
// sqrt( (1/d) sum_i (sqrt(lambda_i) - sqrt(mu_i))^2 ) on the descending
// spectra. Throws dimension_mismatch if the dimensions differ.
double gaussian_closed_form(const GaussianSpec& a, const GaussianSpec& b);

struct BoundValue {
  double value = 0.0;
  // bound_ii only: the radicand was negative and clamped to zero, so the
  // bound is vacuous for the supplied gw2.
  bool radicand_clamped = false;
};

// Comparison of the squared Gaussian distance against Gromov-Wasserstein
// lower bounds for equal-dimension centered Gaussians.
struct GwBounds {
  int dim = 0;
  double lgw2 = 0.0;  // 4 (tr gap)^2 + 4 (Frobenius-norm gap)^2 + 4 |spectrum gap|_F^2
  double ggw2 = 0.0;  // 4 (tr gap)^2 + 8 |spectrum gap|_F^2
  double alpha = 0.0;  // min_i (sqrt(lambda_i) + sqrt(mu_i))
  double sigma_a_fro = 0.0;  // |Sigma_A|_F = |Lambda_A|_F
  double sigma_b_fro = 0.0;
  double trace_gap = 0.0;      // tr Sigma_A - tr Sigma_B
  double fro_gap = 0.0;        // |Sigma_A|_F - |Sigma_B|_F
  double spectrum_gap_fro = 0.0;  // |Lambda_A - Lambda_B|_F

  // D^2 <= gw2 / (8 d alpha^2) + |Sigma_A|_F |Sigma_B|_F (1 - 1/sqrt(d)) / (d alpha^2).
  // Throws rank_deficient when alpha == 0 (both spectra share a zero).
  double bound_i_rhs(double gw2) const;
  // D^2 <= (1/(2 sqrt(d))) sqrt(gw2 - 4 (tr gap)^2 - 4 (fro gap)^2); the
  // radicand is clamped at zero with a flag.
  BoundValue bound_ii_rhs(double gw2) const;
};

GwBounds gw_bounds(const GaussianSpec& a, const GaussianSpec& b);

// Perturbation bound: for spectra of Sigma and Sigma + E with all eigenvalues
// >= lambda_min > 0, the Gaussian distance moves by at most
// |E|_2 / (2 sqrt(lambda_min)). Throws non_positive_lambda for
// lambda_min <= 0.
double stability_bound(double lambda_min, double e_norm);

}  // namespace riswie
