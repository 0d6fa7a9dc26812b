#pragma once

#include <Eigen/Dense>

namespace hardy_hinf {

/// max Re lambda(A).
double spectral_abscissa(const Eigen::MatrixXd& A);

/// Smallest |Re lambda| over the eigenvalues of A, scaled by max(1, |A|_1).
double min_relative_real_part(const Eigen::MatrixXd& A);

/// Orthonormal basis of the invariant subspace of the eigenvalues with
/// Re < 0, from a complex Schur form reordered with Givens swaps. Returns the number of stable
/// eigenvalues through `stable_count`.
Eigen::MatrixXd stable_invariant_subspace(const Eigen::MatrixXd& A,
                                          int* stable_count);

/// Solves A^T X + X A + Q = 0 (Bartels-Stewart on the complex Schur form).
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q);

inline Eigen::MatrixXd symmetric_part(const Eigen::MatrixXd& X) {
  return 0.5 * (X + X.transpose());
}

/// 2-norm of a general matrix via its largest singular value.
double spectral_norm(const Eigen::MatrixXd& X);

}  // namespace hardy_hinf
