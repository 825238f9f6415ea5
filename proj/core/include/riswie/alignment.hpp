#pragma once

#include <cstdint>

#include "riswie/distance.hpp"

namespace riswie {

// x ~ rotation * y + translation.
struct RigidTransform {
  Eigen::MatrixXd rotation;     // d x d orthogonal (det +1 or -1)
  Eigen::VectorXd translation;  // d

  // Applies the transform to every point; weights and id are kept.
  PointCloud apply(const PointCloud& cloud) const;
  double determinant() const { return rotation.determinant(); }
};

// Reassembles the orthogonal map aligning y to x from full PCA bases and a
// signed axis matching: R = sum_l sign_l u^x_l (u^y_{pi(l)})^T, then
// translation = mean_x - R mean_y. Requires both bases to be PCA with
// k == d == d_x == d_y (not_full_basis / dimension_mismatch otherwise).
// When the covariance has (near-)repeated or zero eigenvalues the recovered
// map is only determined up to rotations inside those eigenspaces.
RigidTransform recover_transform(const EmbeddingBasis& basis_x,
                                 const EmbeddingBasis& basis_y,
                                 const SignedMatch& match,
                                 const Eigen::VectorXd& mean_x,
                                 const Eigen::VectorXd& mean_y);

enum class BoostedBase {
  sliced_w2,          // Monte Carlo sliced squared W2, reported as sqrt
  euclidean_mean_nn,  // symmetric weighted mean nearest-neighbor distance
};

struct BoostedParams {
  int directions = 128;   // sliced_w2 only
  std::uint64_t seed = 0;  // sliced_w2 only
};

// Not-invariant base distances made rigid-aware: runs the full-basis PCA
// matching, recovers the rigid transform, applies it to y, and evaluates the
// base distance between x and the aligned y. Requires d_x == d_y.
double boosted_distance(const PointCloud& x, const PointCloud& y,
                        BoostedBase base, const BoostedParams& params = {});

}  // namespace riswie
