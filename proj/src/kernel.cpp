#include "hardy_hinf/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "hardy_hinf/errors.hpp"

namespace hardy_hinf {

KernelMatrix kernel_from_P(const RadialGrid& grid, const Eigen::MatrixXd& P) {
  if (P.rows() != grid.n || P.cols() != grid.n)
    throw_invalid("kernel_from_P: matrix size does not match the grid");
  const Eigen::VectorXd s = grid.weights.cwiseSqrt().cwiseInverse();
  return {s.asDiagonal() * P * s.asDiagonal(), grid};
}

Eigen::MatrixXd P_from_kernel(const KernelMatrix& k) {
  const Eigen::VectorXd s = k.grid.weights.cwiseSqrt();
  return s.asDiagonal() * k.P0 * s.asDiagonal();
}

Eigen::VectorXd apply_kernel(const KernelMatrix& k, const Eigen::VectorXd& phi) {
  return k.P0 * k.grid.weights.cwiseProduct(phi);
}

double kernel_weak_residual(const DiscreteSystem& sys, const KernelMatrix& k,
                            double gamma, int family) {
  const RadialGrid& g = k.grid;
  const Eigen::VectorXd& w = g.weights;
  family = std::min(family, g.n);

  // Nodal Dirichlet eigenvectors: K phi = mu W phi, W-orthonormal.
  const Eigen::VectorXd s = w.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd K = stiffness_matrix(g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.asDiagonal() * K *
                                                     s.asDiagonal());
  const Eigen::MatrixXd Phi =
      s.asDiagonal() * eig.eigenvectors().leftCols(family);

  const Eigen::MatrixXd WP = w.asDiagonal() * k.P0;
  // Columns P phi for every test function, and A phi.
  const Eigen::MatrixXd PPhi = k.P0 * w.asDiagonal() * Phi;
  const Eigen::MatrixXd APhi = sys.A_weak * Phi;
  const Eigen::MatrixXd lin = Phi.transpose() * WP * APhi;  // (psi, phi) -> psi^T W P0 A phi
  const Eigen::RowVectorXd bP = sys.b_nodal.cwiseProduct(w).transpose() * PPhi;
  const double g2 = std::isfinite(gamma) && gamma > 0.0 ? 1.0 / (gamma * gamma) : 0.0;
  const Eigen::MatrixXd dist =
      PPhi.transpose() * w.cwiseProduct(sys.omega1_mask).asDiagonal() * PPhi;
  const Eigen::MatrixXd obs =
      Phi.transpose() * w.cwiseProduct(sys.omegaC_mask).asDiagonal() * Phi;

  double worst = 0.0;
  double largest = 0.0;
  for (int a = 0; a < family; ++a) {
    for (int c = 0; c < family; ++c) {
      const double t1 = lin(c, a);
      const double t2 = lin(a, c);
      const double t3 = bP[a] * bP[c];
      const double t4 = g2 * dist(a, c);
      const double rhs = -obs(a, c);
      const double mismatch = t1 + t2 - t3 + t4 - rhs;
      const double scale = std::abs(t1) + std::abs(t2) + std::abs(t3) +
                           std::abs(t4) + std::abs(rhs);
      worst = std::max(worst, std::abs(mismatch));
      largest = std::max(largest, scale);
    }
  }
  // Normalized by the largest term in the family so that pairs where every
  // term nearly vanishes do not amplify rounding.
  return largest > 0.0 ? worst / largest : 0.0;
}

double feedback_from_kernel(const KernelMatrix& k, const Eigen::VectorXd& b,
                            const Eigen::VectorXd& y) {
  const Eigen::VectorXd& w = k.grid.weights;
  return -(w.cwiseProduct(b)).dot(k.P0 * w.cwiseProduct(y));
}

KernelChecks check_kernel(const KernelMatrix& k) {
  KernelChecks c;
  const double top = k.P0.cwiseAbs().maxCoeff();
  const double fro = k.P0.norm();
  if (!(top > 0.0)) {
    c.symmetric = c.nonnegative = true;
    return c;
  }
  c.symmetry = (k.P0 - k.P0.transpose()).norm() / fro;
  c.min_entry = k.P0.minCoeff() / top;
  c.boundary = k.P0.row(k.grid.n - 1).cwiseAbs().maxCoeff() / top;
  c.symmetric = c.symmetry <= 1e-8;
  c.nonnegative = c.min_entry >= -1e-8;
  return c;
}

std::string kernel_csv(const KernelMatrix& k) {
  std::ostringstream out;
  out.precision(12);
  out << "r";
  for (double r : k.grid.nodes) out << ',' << r;
  out << '\n';
  for (int i = 0; i < k.grid.n; ++i) {
    out << k.grid.nodes[i];
    for (int j = 0; j < k.grid.n; ++j) out << ',' << k.P0(i, j);
    out << '\n';
  }
  return out.str();
}

}  // namespace hardy_hinf
