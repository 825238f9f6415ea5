#include "riswie/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "riswie/eigen_sym.hpp"
#include "riswie/errors.hpp"

namespace riswie {

namespace {

void check_k_against_dim(int k, Eigen::Index d) {
  if (k < 1 || k > d) {
    throw Error(ErrorCode::bad_k, "embedding size k=" + std::to_string(k) +
                                      " must lie in [1, d=" +
                                      std::to_string(d) + "]");
  }
}

// Median of a scratch vector (averages the middle pair for even sizes).
double median_inplace(std::vector<double>& v) {
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid),
                   v.end());
  double hi = v[mid];
  if (n % 2 == 1) return hi;
  const double lo =
      *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

}  // namespace

EmbeddingBasis pca_basis(const PointCloud& cloud, int k) {
  check_k_against_dim(k, cloud.dim());
  const SymmetricSpectrum spectrum = eig_sym(covariance(cloud));
  EmbeddingBasis basis;
  basis.kind = EmbeddingKind::pca;
  basis.k = k;
  basis.axes = spectrum.eigenvectors.leftCols(k).transpose();
  basis.scales = spectrum.eigenvalues.head(k);
  return basis;
}

EmbeddingBasis coordinate_basis(const PointCloud& cloud, int k) {
  check_k_against_dim(k, cloud.dim());
  EmbeddingBasis basis;
  basis.kind = EmbeddingKind::coordinate;
  basis.k = k;
  basis.axes = Eigen::MatrixXd::Identity(k, cloud.dim());
  basis.scales = Eigen::VectorXd::Ones(k);
  return basis;
}

Eigen::MatrixXd diffusion_kernel(const PointCloud& cloud, int neighbors,
                                 double epsilon) {
  const Eigen::Index n = cloud.size();
  const Eigen::Index d = cloud.dim();
  if (n < 2) {
    throw Error(ErrorCode::bad_spec,
                "diffusion kernel needs at least two points");
  }

  if (neighbors <= 0) {
    neighbors = static_cast<int>(
        std::ceil(static_cast<double>(d) * std::log(static_cast<double>(n))));
  }
  neighbors = std::clamp<int>(neighbors, 1, static_cast<int>(n) - 1);

  // Dense squared distances; n is desk scale by contract.
  const Eigen::VectorXd sq_norms = cloud.points.rowwise().squaredNorm();
  Eigen::MatrixXd dist_sq =
      (-2.0 * (cloud.points * cloud.points.transpose())).eval();
  dist_sq.colwise() += sq_norms;
  dist_sq.rowwise() += sq_norms.transpose();
  dist_sq = dist_sq.cwiseMax(0.0);

  // kNN adjacency, symmetrized by union. Ties on distance break by index so
  // the graph is a pure function of the input.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> adj(n, n);
  adj.setConstant(false);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&dist_sq, i](Eigen::Index a, Eigen::Index b) {
                       return dist_sq(i, a) < dist_sq(i, b);
                     });
    int taken = 0;
    for (Eigen::Index idx : order) {
      if (idx == i) continue;
      adj(i, idx) = true;
      adj(idx, i) = true;
      if (++taken == neighbors) break;
    }
  }

  // Connectivity check (BFS).
  {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<Eigen::Index> queue{0};
    seen[0] = 1;
    std::size_t head = 0;
    while (head < queue.size()) {
      const Eigen::Index u = queue[head++];
      for (Eigen::Index w = 0; w < n; ++w) {
        if (adj(u, w) && !seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          queue.push_back(w);
        }
      }
    }
    if (queue.size() != static_cast<std::size_t>(n)) {
      throw Error(ErrorCode::disconnected,
                  "diffusion kNN graph has more than one connected component "
                  "(neighbors=" +
                      std::to_string(neighbors) +
                      "); increase the neighbor count or bandwidth");
    }
  }

  if (epsilon <= 0.0) {
    std::vector<double> edge_sq;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        if (adj(i, j)) edge_sq.push_back(dist_sq(i, j));
      }
    }
    epsilon = median_inplace(edge_sq);
    if (!(epsilon > 0.0)) {
      throw Error(ErrorCode::bad_spec,
                  "auto bandwidth is zero (coincident points); pass an "
                  "explicit epsilon");
    }
  }

  // Gaussian kernel on edges, unit diagonal, zero elsewhere.
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    kernel(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (adj(i, j)) {
        const double v = std::exp(-dist_sq(i, j) / epsilon);
        kernel(i, j) = v;
        kernel(j, i) = v;
      }
    }
  }
  return kernel;
}

EmbeddingBasis diffusion_basis(const PointCloud& cloud, int k,
                               const DiffusionParams& params) {
  const Eigen::Index n = cloud.size();
  if (k < 1 || n < k + 2) {
    throw Error(ErrorCode::bad_k,
                "diffusion embedding needs 1 <= k and n >= k + 2, got k=" +
                    std::to_string(k) + ", n=" + std::to_string(n));
  }

  const Eigen::MatrixXd kernel =
      diffusion_kernel(cloud, params.neighbors, params.epsilon);

  // Symmetric normalization S = E^{-1/2} K E^{-1/2}; degrees are >= 1 thanks
  // to the unit diagonal.
  const Eigen::VectorXd degree = kernel.rowwise().sum();
  const Eigen::VectorXd inv_sqrt_deg = degree.array().rsqrt();
  Eigen::MatrixXd s = inv_sqrt_deg.asDiagonal() * kernel;
  s = s * inv_sqrt_deg.asDiagonal();

  const SymmetricSpectrum spectrum = eig_sym(s);

  // Mode 0 is the trivial stationary mode (eigenvalue ~1, eigenvector
  // proportional to sqrt(degree)); the embedding starts at mode 1.
  EmbeddingBasis basis;
  basis.kind = EmbeddingKind::diffusion;
  basis.k = k;
  basis.axes.resize(n, k);
  basis.scales.resize(k);
  for (int j = 0; j < k; ++j) {
    const double lambda = spectrum.eigenvalues[j + 1];
    double factor;
    if (lambda >= 0.0) {
      factor = std::pow(lambda, params.time);
    } else if (params.time == std::nearbyint(params.time)) {
      factor = std::pow(lambda, params.time);
    } else {
      throw Error(ErrorCode::no_convergence,
                  "diffusion mode " + std::to_string(j + 1) +
                      " has negative eigenvalue " + std::to_string(lambda) +
                      "; lambda^t undefined for non-integral t");
    }
    basis.scales[j] = factor;
    Eigen::VectorXd coords =
        inv_sqrt_deg.asDiagonal() * spectrum.eigenvectors.col(j + 1);
    if (params.scale_by_eigenvalue) coords *= factor;
    basis.axes.col(j) = coords;
  }
  return basis;
}

AxisMarginals project(const PointCloud& cloud, const EmbeddingBasis& basis) {
  if (basis.k < 1) {
    throw Error(ErrorCode::bad_k, "basis has no axes");
  }
  const std::vector<double> weights(cloud.weights.data(),
                                    cloud.weights.data() + cloud.size());
  AxisMarginals out;
  out.axes.reserve(static_cast<std::size_t>(basis.k));

  if (basis.kind == EmbeddingKind::diffusion) {
    if (basis.axes.rows() != cloud.size()) {
      throw Error(ErrorCode::dimension_mismatch,
                  "diffusion basis was built from a cloud of size " +
                      std::to_string(basis.axes.rows()) +
                      ", cannot project a cloud of size " +
                      std::to_string(cloud.size()));
    }
    for (int j = 0; j < basis.k; ++j) {
      std::vector<double> column(basis.axes.col(j).data(),
                                 basis.axes.col(j).data() + cloud.size());
      out.axes.push_back(SortedSample::from_unsorted(std::move(column), weights));
    }
    return out;
  }

  if (basis.axes.cols() != cloud.dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "basis dimension " + std::to_string(basis.axes.cols()) +
                    " does not match cloud dimension " +
                    std::to_string(cloud.dim()));
  }
  const Eigen::MatrixXd projections = cloud.points * basis.axes.transpose();
  for (int j = 0; j < basis.k; ++j) {
    std::vector<double> column(projections.col(j).data(),
                               projections.col(j).data() + cloud.size());
    out.axes.push_back(SortedSample::from_unsorted(std::move(column), weights));
  }
  return out;
}

}  // namespace riswie
