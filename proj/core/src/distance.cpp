#include "riswie/distance.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "riswie/errors.hpp"

namespace riswie {

namespace {

int resolve_k(const PointCloud& x, const PointCloud& y,
              const EmbeddingConfig& config) {
  if (config.k > 0) return config.k;
  int k = static_cast<int>(std::min(x.dim(), y.dim()));
  if (config.kind == EmbeddingKind::diffusion) {
    k = std::min<int>(k, static_cast<int>(std::min(x.size(), y.size())) - 2);
    k = std::max(k, 1);
  }
  return k;
}

EmbeddingBasis build_basis(const PointCloud& centered, int k,
                           const EmbeddingConfig& config) {
  switch (config.kind) {
    case EmbeddingKind::pca:
      return pca_basis(centered, k);
    case EmbeddingKind::coordinate:
      return coordinate_basis(centered, k);
    case EmbeddingKind::diffusion:
      return diffusion_basis(centered, k, config.diffusion);
  }
  throw Error(ErrorCode::bad_spec, "unknown embedding kind");
}

void check_cross_cloud_k(const PointCloud& x, const PointCloud& y, int k,
                         const EmbeddingConfig& config) {
  if ((config.kind == EmbeddingKind::pca ||
       config.kind == EmbeddingKind::coordinate) &&
      k > std::min(x.dim(), y.dim())) {
    throw Error(ErrorCode::bad_k,
                "k=" + std::to_string(k) + " exceeds min ambient dimension " +
                    std::to_string(std::min(x.dim(), y.dim())));
  }
}

}  // namespace

RiswieResult riswie_distance(const PointCloud& x, const PointCloud& y,
                             const EmbeddingConfig& config) {
  const int k = resolve_k(x, y, config);
  check_cross_cloud_k(x, y, k, config);

  const PointCloud cx = center(x);
  const PointCloud cy = center(y);

  RiswieResult result;
  result.k = k;
  result.basis_x = build_basis(cx, k, config);
  result.basis_y = build_basis(cy, k, config);

  const AxisMarginals mx = project(cx, result.basis_x);
  const AxisMarginals my = project(cy, result.basis_y);
  result.match = solve_signed_match(cost_matrix(mx, my));
  result.squared = result.match.total / static_cast<double>(k);
  result.distance = std::sqrt(std::max(0.0, result.squared));
  return result;
}

SriswieResult sriswie_distance(const PointCloud& x, const PointCloud& y,
                               const EmbeddingConfig& config,
                               const SoftMatchParams& params) {
  const int k = resolve_k(x, y, config);
  check_cross_cloud_k(x, y, k, config);

  const PointCloud cx = center(x);
  const PointCloud cy = center(y);

  SriswieResult result;
  result.k = k;
  result.basis_x = build_basis(cx, k, config);
  result.basis_y = build_basis(cy, k, config);

  const AxisMarginals mx = project(cx, result.basis_x);
  const AxisMarginals my = project(cy, result.basis_y);
  result.soft = soft_match(mx, my, params);
  result.objective = result.soft.objective;
  result.value = std::sqrt(std::max(0.0, result.objective));
  return result;
}

GaussianSpec GaussianSpec::from_eigenvalues(std::vector<double> values) {
  if (values.empty()) {
    throw Error(ErrorCode::bad_spec, "spectrum must be nonempty");
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::non_finite, "spectrum has non-finite entries");
    }
    if (v < 0.0) {
      throw Error(ErrorCode::bad_spec,
                  "covariance eigenvalues must be nonnegative, got " +
                      std::to_string(v));
    }
  }
  std::sort(values.begin(), values.end(), std::greater<double>());
  GaussianSpec spec;
  spec.eigenvalues =
      Eigen::Map<const Eigen::VectorXd>(values.data(),
                                        static_cast<Eigen::Index>(values.size()));
  return spec;
}

double gaussian_closed_form(const GaussianSpec& a, const GaussianSpec& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "spectra dimensions differ: " + std::to_string(a.dim()) +
                    " vs " + std::to_string(b.dim()));
  }
  const Eigen::ArrayXd gap =
      a.eigenvalues.array().sqrt() - b.eigenvalues.array().sqrt();
  return std::sqrt(gap.square().mean());
}

double GwBounds::bound_i_rhs(double gw2) const {
  if (alpha <= 0.0) {
    throw Error(ErrorCode::rank_deficient,
                "bound (i) undefined: both spectra vanish in some direction "
                "(alpha = 0)");
  }
  const double d = static_cast<double>(dim);
  const double denom = d * alpha * alpha;
  return gw2 / (8.0 * denom) +
         sigma_a_fro * sigma_b_fro * (1.0 - 1.0 / std::sqrt(d)) / denom;
}

BoundValue GwBounds::bound_ii_rhs(double gw2) const {
  const double d = static_cast<double>(dim);
  double radicand = gw2 - 4.0 * trace_gap * trace_gap - 4.0 * fro_gap * fro_gap;
  BoundValue out;
  if (radicand < 0.0) {
    radicand = 0.0;
    out.radicand_clamped = true;
  }
  out.value = std::sqrt(radicand) / (2.0 * std::sqrt(d));
  return out;
}

GwBounds gw_bounds(const GaussianSpec& a, const GaussianSpec& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "spectra dimensions differ: " + std::to_string(a.dim()) +
                    " vs " + std::to_string(b.dim()));
  }
  GwBounds out;
  out.dim = a.dim();
  out.sigma_a_fro = a.eigenvalues.norm();
  out.sigma_b_fro = b.eigenvalues.norm();
  out.trace_gap = a.eigenvalues.sum() - b.eigenvalues.sum();
  out.fro_gap = out.sigma_a_fro - out.sigma_b_fro;
  out.spectrum_gap_fro = (a.eigenvalues - b.eigenvalues).norm();
  out.lgw2 = 4.0 * out.trace_gap * out.trace_gap +
             4.0 * out.fro_gap * out.fro_gap +
             4.0 * out.spectrum_gap_fro * out.spectrum_gap_fro;
  // Equal dimensions: the truncation term vanishes and the remainder doubles
  // the spectrum-gap contribution.
  out.ggw2 = 4.0 * out.trace_gap * out.trace_gap +
             8.0 * out.spectrum_gap_fro * out.spectrum_gap_fro;
  out.alpha =
      (a.eigenvalues.array().sqrt() + b.eigenvalues.array().sqrt()).minCoeff();
  return out;
}

double stability_bound(double lambda_min, double e_norm) {
  if (!(lambda_min > 0.0)) {
    throw Error(ErrorCode::non_positive_lambda,
                "stability bound needs lambda_min > 0, got " +
                    std::to_string(lambda_min));
  }
  if (e_norm < 0.0) {
    throw Error(ErrorCode::bad_spec, "perturbation norm must be nonnegative");
  }
  return e_norm / (2.0 * std::sqrt(lambda_min));
}

}  // namespace riswie
