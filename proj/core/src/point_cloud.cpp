#include "riswie/point_cloud.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "riswie/errors.hpp"

namespace riswie {

namespace {

constexpr double kWeightSumTol = 1e-12;

void validate_points(const Eigen::MatrixXd& pts) {
  if (pts.rows() < 1 || pts.cols() < 1) {
    throw Error(ErrorCode::bad_spec,
                "point cloud must have at least one point and one dimension");
  }
  if (!pts.allFinite()) {
    throw Error(ErrorCode::non_finite, "point cloud has non-finite coordinates");
  }
}

}  // namespace

PointCloud PointCloud::from_points(Eigen::MatrixXd pts, std::string id) {
  validate_points(pts);
  const Eigen::Index n = pts.rows();
  PointCloud cloud;
  cloud.points = std::move(pts);
  cloud.weights = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  cloud.id = std::move(id);
  return cloud;
}

PointCloud PointCloud::from_weighted(Eigen::MatrixXd pts, Eigen::VectorXd w,
                                     std::string id) {
  validate_points(pts);
  if (w.size() != pts.rows()) {
    throw Error(ErrorCode::dimension_mismatch,
                "weight count " + std::to_string(w.size()) +
                    " does not match point count " + std::to_string(pts.rows()));
  }
  if (!w.allFinite() || (w.array() < 0.0).any()) {
    throw Error(ErrorCode::bad_spec, "weights must be finite and nonnegative");
  }
  if (std::abs(w.sum() - 1.0) > kWeightSumTol) {
    throw Error(ErrorCode::bad_spec,
                "weights must sum to 1 within 1e-12, got " +
                    std::to_string(w.sum()));
  }
  PointCloud cloud;
  cloud.points = std::move(pts);
  cloud.weights = std::move(w);
  cloud.id = std::move(id);
  return cloud;
}

Eigen::RowVectorXd weighted_mean(const PointCloud& cloud) {
  return cloud.weights.transpose() * cloud.points;
}

PointCloud center(const PointCloud& cloud) {
  PointCloud out = cloud;
  out.points.rowwise() -= weighted_mean(cloud);
  return out;
}

Eigen::MatrixXd covariance(const PointCloud& cloud) {
  const Eigen::RowVectorXd mean = weighted_mean(cloud);
  const Eigen::MatrixXd centered = cloud.points.rowwise() - mean;
  const Eigen::MatrixXd sigma =
      centered.transpose() * cloud.weights.asDiagonal() * centered;
  return 0.5 * (sigma + sigma.transpose());
}

double combined_scale(const PointCloud& x, const PointCloud& y) {
  return std::sqrt(covariance(x).trace() + covariance(y).trace());
}

}  // namespace riswie
