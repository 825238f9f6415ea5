#pragma once

#include <string>

#include <Eigen/Dense>

namespace riswie {

// Weighted point cloud in R^d, one point per row. Weights are strictly
// positive is not required (zeros allowed), but they must be nonnegative and
// sum to 1 within 1e-12; the factories validate this, so downstream code can
// assume it.
struct PointCloud {
  Eigen::MatrixXd points;   // n x d
  Eigen::VectorXd weights;  // length n
  std::string id;

  // Uniform weights 1/n.
  static PointCloud from_points(Eigen::MatrixXd pts, std::string id = {});
  static PointCloud from_weighted(Eigen::MatrixXd pts, Eigen::VectorXd w,
                                  std::string id = {});

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
};

Eigen::RowVectorXd weighted_mean(const PointCloud& cloud);

// Subtracts the weighted mean from every point; weights and id unchanged.
// center(center(x)) differs from center(x) only by round-off in the mean.
PointCloud center(const PointCloud& cloud);

// Weighted covariance sum_i w_i (x_i - mean)(x_i - mean)^T, centered
// defensively even if the input already is. Symmetric by construction.
Eigen::MatrixXd covariance(const PointCloud& cloud);

// Scale used in relative tolerances throughout: sqrt(tr Sigma_x + tr Sigma_y).
double combined_scale(const PointCloud& x, const PointCloud& y);

}  // namespace riswie
