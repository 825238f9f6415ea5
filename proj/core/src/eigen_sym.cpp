#include "riswie/eigen_sym.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "riswie/errors.hpp"

namespace riswie {

namespace {

constexpr double kAsymmetryTol = 1e-9;
constexpr double kOffDiagStop = 1e-12;  // relative to on-diagonal Frobenius norm
constexpr int kMaxSweeps = 100;

// Rotations with |a_pq| below this fraction of the local diagonal mass cannot
// move the relative off-diagonal norm near the stopping threshold; skipping
// them avoids churning on round-off.
constexpr double kSkipRel = 1e-18;

}  // namespace

SymmetricSpectrum eig_sym(const Eigen::MatrixXd& matrix) {
  const Eigen::Index n = matrix.rows();
  if (n != matrix.cols()) {
    throw Error(ErrorCode::dimension_mismatch,
                "eig_sym: matrix must be square, got " + std::to_string(n) +
                    "x" + std::to_string(matrix.cols()));
  }
  if (n == 0) {
    throw Error(ErrorCode::dimension_mismatch, "eig_sym: empty matrix");
  }
  if (!matrix.allFinite()) {
    throw Error(ErrorCode::non_finite, "eig_sym: matrix has non-finite entries");
  }

  const double max_abs = matrix.cwiseAbs().maxCoeff();
  const double asymmetry = (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
  if (asymmetry > kAsymmetryTol * std::max(1.0, max_abs)) {
    throw Error(ErrorCode::non_symmetric,
                "eig_sym: asymmetry " + std::to_string(asymmetry) +
                    " exceeds tolerance");
  }

  Eigen::MatrixXd a = 0.5 * (matrix + matrix.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off_sq = 0.0;
    double diag_sq = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      diag_sq += a(p, p) * a(p, p);
      for (Eigen::Index q = p + 1; q < n; ++q) off_sq += a(p, q) * a(p, q);
    }
    if (off_sq == 0.0) break;
    if (std::sqrt(2.0 * off_sq) <= kOffDiagStop * std::sqrt(diag_sq)) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        const double app = a(p, p);
        const double aqq = a(q, q);
        if (std::abs(apq) <= kSkipRel * (std::abs(app) + std::abs(aqq))) {
          continue;
        }

        // Stable rotation angle: t = sign(theta) / (|theta| + sqrt(theta^2+1))
        // with theta = (aqq - app) / (2 apq).
        const double theta = (aqq - app) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 1.0 / (2.0 * theta);  // avoids theta^2 overflow
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (Eigen::Index i = 0; i < n; ++i) {
          const double aip = a(i, p);
          const double aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (Eigen::Index i = 0; i < n; ++i) {
          const double api = a(p, i);
          const double aqi = a(q, i);
          a(p, i) = c * api - s * aqi;
          a(q, i) = s * api + c * aqi;
        }
        // Restore exact symmetry of the rotated 2x2 block.
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        for (Eigen::Index i = 0; i < n; ++i) {
          const double vip = v(i, p);
          const double viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
    }
  }

  // Stable descending sort keeps the original Jacobi order among exactly
  // equal eigenvalues.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&a](Eigen::Index lhs, Eigen::Index rhs) {
                     return a(lhs, lhs) > a(rhs, rhs);
                   });

  SymmetricSpectrum out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index src = order[static_cast<std::size_t>(j)];
    out.eigenvalues[j] = a(src, src);
    out.eigenvectors.col(j) = v.col(src);

    Eigen::Index lead = 0;
    double lead_abs = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mag = std::abs(out.eigenvectors(i, j));
      if (mag > lead_abs) {  // strict: ties keep the lowest index
        lead_abs = mag;
        lead = i;
      }
    }
    if (out.eigenvectors(lead, j) < 0.0) out.eigenvectors.col(j) = -out.eigenvectors.col(j);
  }
  return out;
}

}  // namespace riswie
