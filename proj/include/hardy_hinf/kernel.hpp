#pragma once

#include <string>

#include <Eigen/Dense>

#include "hardy_hinf/domain.hpp"
#include "hardy_hinf/operators.hpp"

namespace hardy_hinf {

/// Samples P0(r_i, r_j) of the integral kernel of a Riccati operator, so that
/// (P phi)(r_i) = sum_j P0(i, j) w_j phi_j.
struct KernelMatrix {
  Eigen::MatrixXd P0;
  RadialGrid grid;
};

/// P given in symmetrized coordinates: P0 = M^{-1/2} P M^{-1/2}.
KernelMatrix kernel_from_P(const RadialGrid& grid, const Eigen::MatrixXd& P);

/// Inverse of kernel_from_P.
Eigen::MatrixXd P_from_kernel(const KernelMatrix& k);

/// (P phi) at the nodes by quadrature of the kernel; phi is nodal.
Eigen::VectorXd apply_kernel(const KernelMatrix& k, const Eigen::VectorXd& phi);

/// Weak form of the kernel equation paired with phi(x) psi(xi), phi and psi
/// taken from the first `family` Dirichlet eigenvectors. Returns the largest
/// mismatch relative to the size of the individual terms. Uses the nodal weak
/// matrix and never the symmetrized generator.
double kernel_weak_residual(const DiscreteSystem& sys, const KernelMatrix& k,
                            double gamma, int family = 10);

/// -sum_i sum_j w_i b_i P0(i, j) w_j y_j for nodal b and y.
double feedback_from_kernel(const KernelMatrix& k, const Eigen::VectorXd& b,
                            const Eigen::VectorXd& y);

struct KernelChecks {
  double symmetry = 0.0;        ///< |P0 - P0^T| / |P0|
  double min_entry = 0.0;       ///< min P0 / max |P0|
  double boundary = 0.0;        ///< max |P0(n-1, :)| / max |P0|
  bool symmetric = false;
  bool nonnegative = false;
};

KernelChecks check_kernel(const KernelMatrix& k);

/// CSV with a leading `r` row and column of node radii.
std::string kernel_csv(const KernelMatrix& k);

}  // namespace hardy_hinf
