#include "hardy_hinf/linalg.hpp"

#include <algorithm>
#include <complex>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

#include "hardy_hinf/errors.hpp"

namespace hardy_hinf {

double spectral_abscissa(const Eigen::MatrixXd& A) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  if (es.info() != Eigen::Success)
    throw HinfError(ErrorKind::kSolverFailure, "eigenvalue computation failed");
  return es.eigenvalues().real().maxCoeff();
}

double min_relative_real_part(const Eigen::MatrixXd& A) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  if (es.info() != Eigen::Success)
    throw HinfError(ErrorKind::kSolverFailure, "eigenvalue computation failed");
  const double scale = std::max(1.0, A.cwiseAbs().colwise().sum().maxCoeff());
  return es.eigenvalues().real().cwiseAbs().minCoeff() / scale;
}

namespace {

using cd = std::complex<double>;

// Complex Givens rotation [c s; -conj(s) c] mapping (f, g) to (r, 0).
void givens(cd f, cd g, double& c, cd& s) {
  const double af = std::abs(f);
  const double ag = std::abs(g);
  if (ag == 0.0) {
    c = 1.0;
    s = 0.0;
  } else if (af == 0.0) {
    c = 0.0;
    s = std::conj(g) / ag;
  } else {
    const double d = std::hypot(af, ag);
    c = af / d;
    s = (f / af) * std::conj(g) / d;
  }
}

// Exchanges the adjacent diagonal entries k and k+1 of the upper triangular
// T = Q^H A Q, updating Q.
void swap_adjacent(Eigen::MatrixXcd& T, Eigen::MatrixXcd& Q, Eigen::Index k) {
  const Eigen::Index n = T.rows();
  const cd t11 = T(k, k);
  const cd t22 = T(k + 1, k + 1);
  double c;
  cd s;
  givens(T(k, k + 1), t22 - t11, c, s);
  for (Eigen::Index j = k + 2; j < n; ++j) {
    const cd x = T(k, j), y = T(k + 1, j);
    T(k, j) = c * x + s * y;
    T(k + 1, j) = c * y - std::conj(s) * x;
  }
  const cd sc = std::conj(s);
  for (Eigen::Index i = 0; i < k; ++i) {
    const cd x = T(i, k), y = T(i, k + 1);
    T(i, k) = c * x + sc * y;
    T(i, k + 1) = c * y - s * x;
  }
  T(k, k) = t22;
  T(k + 1, k + 1) = t11;
  for (Eigen::Index i = 0; i < n; ++i) {
    const cd x = Q(i, k), y = Q(i, k + 1);
    Q(i, k) = c * x + sc * y;
    Q(i, k + 1) = c * y - s * x;
  }
}

}  // namespace

Eigen::MatrixXd stable_invariant_subspace(const Eigen::MatrixXd& A,
                                          int* stable_count) {
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(A.cast<cd>());
  if (schur.info() != Eigen::Success)
    throw HinfError(ErrorKind::kSolverFailure, "Schur decomposition failed");
  Eigen::MatrixXcd T = schur.matrixT();
  Eigen::MatrixXcd Q = schur.matrixU();
  const Eigen::Index n = T.rows();

  // Bubble every stable eigenvalue up to the leading block.
  Eigen::Index placed = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!(T(j, j).real() < 0.0)) continue;
    for (Eigen::Index k = j; k > placed; --k) swap_adjacent(T, Q, k - 1);
    ++placed;
  }
  if (stable_count) *stable_count = static_cast<int>(placed);
  if (placed == 0) return Eigen::MatrixXd(n, 0);

  // The subspace is closed under conjugation, so the real and imaginary parts
  // of its complex basis span it; extract a real orthonormal basis.
  Eigen::MatrixXd parts(n, 2 * placed);
  parts << Q.leftCols(placed).real(), Q.leftCols(placed).imag();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(parts, Eigen::ComputeThinU);
  return svd.matrixU().leftCols(placed);
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q) {
  using Eigen::MatrixXcd;
  using cd = std::complex<double>;
  const Eigen::Index n = A.rows();
  Eigen::ComplexSchur<MatrixXcd> schur(A.cast<cd>());
  if (schur.info() != Eigen::Success)
    throw HinfError(ErrorKind::kSolverFailure, "Schur decomposition failed");
  const MatrixXcd& T = schur.matrixT();
  const MatrixXcd& U = schur.matrixU();
  // T^H Y + Y T = F with F = -U^H Q U, solved column by column.
  const MatrixXcd F = -(U.adjoint() * Q.cast<cd>() * U);
  const MatrixXcd TH = T.adjoint();
  MatrixXcd Y = MatrixXcd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXcd rhs = F.col(j);
    if (j > 0) rhs -= Y.leftCols(j) * T.col(j).head(j);
    MatrixXcd lower = TH;
    lower.diagonal().array() += T(j, j);
    for (Eigen::Index k = 0; k < n; ++k)
      if (std::abs(lower(k, k)) < std::numeric_limits<double>::epsilon() *
                                      (1.0 + std::abs(T(j, j))))
        throw HinfError(ErrorKind::kSolverFailure,
                        "Lyapunov operator is singular (eigenvalues sum to 0)");
    Y.col(j) = lower.triangularView<Eigen::Lower>().solve(rhs);
  }
  const MatrixXcd X = U * Y * U.adjoint();
  return X.real();
}

double spectral_norm(const Eigen::MatrixXd& X) {
  if (X.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
  return svd.singularValues()[0];
}

}  // namespace hardy_hinf
