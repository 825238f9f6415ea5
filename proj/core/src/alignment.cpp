#include "riswie/alignment.hpp"

#include <cmath>
#include <string>

#include "riswie/errors.hpp"
#include "riswie/ot1d.hpp"

namespace riswie {

PointCloud RigidTransform::apply(const PointCloud& cloud) const {
  if (cloud.dim() != rotation.cols()) {
    throw Error(ErrorCode::dimension_mismatch,
                "transform dimension " + std::to_string(rotation.cols()) +
                    " does not match cloud dimension " +
                    std::to_string(cloud.dim()));
  }
  PointCloud out = cloud;
  out.points = cloud.points * rotation.transpose();
  out.points.rowwise() += translation.transpose();
  return out;
}

RigidTransform recover_transform(const EmbeddingBasis& basis_x,
                                 const EmbeddingBasis& basis_y,
                                 const SignedMatch& match,
                                 const Eigen::VectorXd& mean_x,
                                 const Eigen::VectorXd& mean_y) {
  if (basis_x.kind != EmbeddingKind::pca || basis_y.kind != EmbeddingKind::pca) {
    throw Error(ErrorCode::not_full_basis,
                "transform recovery needs PCA bases");
  }
  const Eigen::Index d = basis_x.axes.cols();
  if (basis_y.axes.cols() != d) {
    throw Error(ErrorCode::dimension_mismatch,
                "bases live in different ambient dimensions");
  }
  if (basis_x.k != d || basis_y.k != d) {
    throw Error(ErrorCode::not_full_basis,
                "transform recovery needs full bases (k = d), got k=" +
                    std::to_string(basis_x.k) + "/" +
                    std::to_string(basis_y.k) + " for d=" + std::to_string(d));
  }
  if (static_cast<Eigen::Index>(match.permutation.size()) != d) {
    throw Error(ErrorCode::dimension_mismatch,
                "matching size does not match basis size");
  }
  if (mean_x.size() != d || mean_y.size() != d) {
    throw Error(ErrorCode::dimension_mismatch,
                "mean vectors do not match basis dimension");
  }

  // Axis l of x corresponds to axis pi(l) of y with orientation sign_l, so
  // the orthogonal map sending y's frame onto x's is
  // R = sum_l sign_l u^x_l (u^y_{pi(l)})^T  (rows of `axes` are the axes).
  Eigen::MatrixXd rotation = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index l = 0; l < d; ++l) {
    const int m = match.permutation[static_cast<std::size_t>(l)];
    const double sign =
        static_cast<double>(match.signs[static_cast<std::size_t>(l)]);
    rotation.noalias() +=
        sign * basis_x.axes.row(l).transpose() * basis_y.axes.row(m);
  }

  RigidTransform transform;
  transform.rotation = std::move(rotation);
  transform.translation = mean_x - transform.rotation * mean_y;
  return transform;
}

double boosted_distance(const PointCloud& x, const PointCloud& y,
                        BoostedBase base, const BoostedParams& params) {
  if (x.dim() != y.dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "boosted distance needs equal ambient dimensions, got " +
                    std::to_string(x.dim()) + " vs " + std::to_string(y.dim()));
  }

  EmbeddingConfig config;
  config.kind = EmbeddingKind::pca;
  config.k = static_cast<int>(x.dim());
  const RiswieResult matched = riswie_distance(x, y, config);
  const RigidTransform transform = recover_transform(
      matched.basis_x, matched.basis_y, matched.match,
      weighted_mean(x).transpose(), weighted_mean(y).transpose());
  const PointCloud aligned = transform.apply(y);

  switch (base) {
    case BoostedBase::sliced_w2:
      return std::sqrt(std::max(
          0.0, sliced_w2sq(x, aligned, params.directions, params.seed)));
    case BoostedBase::euclidean_mean_nn: {
      // Symmetric weighted mean nearest-neighbor (chamfer-type) distance.
      double forward = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double nearest = (aligned.points.rowwise() - x.points.row(i))
                                   .rowwise()
                                   .norm()
                                   .minCoeff();
        forward += x.weights[i] * nearest;
      }
      double backward = 0.0;
      for (Eigen::Index j = 0; j < aligned.size(); ++j) {
        const double nearest = (x.points.rowwise() - aligned.points.row(j))
                                   .rowwise()
                                   .norm()
                                   .minCoeff();
        backward += aligned.weights[j] * nearest;
      }
      return 0.5 * (forward + backward);
    }
  }
  throw Error(ErrorCode::bad_spec, "unknown boosted base distance");
}

}  // namespace riswie
