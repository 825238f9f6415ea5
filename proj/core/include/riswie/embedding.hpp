#pragma once

#include <vector>

#include <Eigen/Dense>

#include "riswie/ot1d.hpp"
#include "riswie/point_cloud.hpp"

namespace riswie {

enum class EmbeddingKind { pca, diffusion, coordinate };

// A family of k one-dimensional coordinate maps for one cloud.
//  - pca / coordinate: axes is k x d with unit rows; coordinate j of point x
//    is <x, axes.row(j)>. scales holds the covariance eigenvalues (pca) or
//    ones (coordinate).
//  - diffusion: axes is n x k holding the embedded coordinates of the very
//    cloud the basis was built from (column j = mode j); scales holds
//    lambda_j^t. Diffusion bases cannot be applied to other clouds.
struct EmbeddingBasis {
  EmbeddingKind kind = EmbeddingKind::pca;
  int k = 0;
  Eigen::MatrixXd axes;
  Eigen::VectorXd scales;
};

struct DiffusionParams {
  // kNN graph size; 0 selects ceil(d * ln n), clamped to [1, n-1]. The graph
  // is symmetrized by union, so actual degrees may exceed this.
  int neighbors = 0;
  // Gaussian bandwidth for exp(-|x_i - x_j|^2 / epsilon); 0 selects the
  // median squared length of the kNN edges.
  double epsilon = 0.0;
  // Diffusion time; coordinates are scaled by lambda_j^t.
  double time = 1.0;
  // false drops the lambda_j^t factor (coordinates are the conjugated
  // eigenvectors only).
  bool scale_by_eigenvalue = true;
};

// Top-k eigenvectors of the covariance as rows, eigenvalues as scales.
// Throws bad_k if k < 1 or k > d. Does not center; pair with center() when
// translation invariance is wanted.
EmbeddingBasis pca_basis(const PointCloud& cloud, int k);

// First k standard coordinate axes. Throws bad_k if k < 1 or k > d.
EmbeddingBasis coordinate_basis(const PointCloud& cloud, int k);

// The affinity matrix behind diffusion_basis: exp(-|x_i - x_j|^2 / epsilon)
// on the union-symmetrized kNN graph, unit diagonal, zero off the graph.
// neighbors and epsilon follow the DiffusionParams defaulting rules. Throws
// disconnected if the graph has more than one component.
Eigen::MatrixXd diffusion_kernel(const PointCloud& cloud, int neighbors = 0,
                                 double epsilon = 0.0);

// Symmetrically normalized graph-diffusion embedding: the kernel above
// conjugated by the inverse square-root degree, dense symmetric eigensolve,
// the top (trivial) mode dropped, the next k modes mapped back through the
// conjugation and scaled by lambda^t. Throws bad_k if k < 1 or n < k + 2.
// Dense O(n^2) memory; desk scale (n up to a few thousand).
EmbeddingBasis diffusion_basis(const PointCloud& cloud, int k,
                               const DiffusionParams& params = {});

// Per-axis sorted 1D marginals of a cloud under a basis.
struct AxisMarginals {
  std::vector<SortedSample> axes;
  int k() const { return static_cast<int>(axes.size()); }
};

// For pca/coordinate bases: sorted inner products with each axis, weights
// co-sorted. For diffusion bases: sorted columns of the embedded coordinates
// (the cloud must be the one the basis was built from; sizes are checked).
AxisMarginals project(const PointCloud& cloud, const EmbeddingBasis& basis);

}  // namespace riswie
