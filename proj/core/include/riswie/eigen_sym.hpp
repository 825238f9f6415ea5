#pragma once

#include <Eigen/Dense>

namespace riswie {

// Full eigendecomposition of a symmetric matrix.
struct SymmetricSpectrum {
  // Sorted descending; eigenvectors.col(j) pairs with eigenvalues[j].
  Eigen::VectorXd eigenvalues;
  // Orthonormal columns. Sign convention: in each column the entry of
  // largest magnitude is nonnegative (ties broken by lowest row index), so
  // the decomposition is a pure function of the input bits.
  Eigen::MatrixXd eigenvectors;
};

// Cyclic Jacobi rotations in a fixed row-major sweep order on the
// symmetrized input (M + M^T)/2. Deterministic: no pivoting by magnitude,
// stable descending sort, canonical signs. Throws:
//  - dimension_mismatch if the matrix is not square,
//  - non_symmetric if max |M - M^T| exceeds 1e-9 * max(1, max |M|),
//  - non_finite if any entry is not finite.
// Converges when the off-diagonal Frobenius norm falls below 1e-12 times the
// on-diagonal Frobenius norm (at most 100 sweeps). Intended for dense
// desk-scale problems (n up to a few thousand).
SymmetricSpectrum eig_sym(const Eigen::MatrixXd& matrix);

}  // namespace riswie
