#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hardy_hinf/domain.hpp"
#include "hardy_hinf/profiles.hpp"

namespace hardy_hinf {

/// Physical data of the controlled system. All quantities nondimensional.
struct ProblemConfig {
  double lambda = 0.0;
  double a0 = 0.0;
  Annulus omega0_set{0.0, 0.5};
  Annulus omegaC_set{0.0, 0.9};
  Annulus omega1_set{0.0, 0.8};
  RadialProfile b_profile = RadialProfile::shell(0.2, 0.4);
  RadialProfile v_profile = RadialProfile::zero();
  /// Upper bounds ||div v||_inf and ||v||_inf. Negative means "derive from
  /// v_profile".
  double divv_max = -1.0;
  double v_max = -1.0;
  double gamma = 2.0;
  bool critical = false;
  double epsilon = 0.0;
};

/// Fills divv_max / v_max from the profile when unset and checks that user
/// supplied values really bound the sampled field. Validates the nesting of
/// the subdomains and the admissible lambda range.
ProblemConfig validate_config(const RadialGrid& grid, ProblemConfig cfg);

/// Operators of the controlled system in symmetrized coordinates
/// y_hat = M^{1/2} y, where the Euclidean product equals the discrete L2
/// product. Adjoints are transposes.
struct DiscreteSystem {
  RadialGrid grid;
  int n = 0;
  Eigen::MatrixXd A;
  Eigen::MatrixXd B1;
  Eigen::MatrixXd B2;
  Eigen::MatrixXd C1;
  Eigen::MatrixXd D1;
  /// Quadrature weights w_i (the diagonal of M).
  Eigen::VectorXd M;
  double omega0_const = 0.0;
  /// 1 - lambda/H_N, or 1 - lambda_eps/H_N on the regularized critical path.
  double C_N = 0.0;
  double lambda = 0.0;
  double v_max = 0.0;
  double divv_max = 0.0;
  double a0 = 0.0;

  /// Stiffness form of the Dirichlet Laplacian (lambda = 0), symmetrized.
  Eigen::MatrixXd L;
  /// A without convection, and the convection part alone (A = A0 + Bconv).
  Eigen::MatrixXd A0;
  Eigen::MatrixXd Bconv;
  /// Weak (bilinear-form) matrix in nodal coordinates: <Ay, z> = z^T A_weak y.
  Eigen::MatrixXd A_weak;
  /// Nodal samples of the inverse-square (or regularized) potential 1/r^2.
  Eigen::VectorXd potential;
  /// Nodal samples of b, chi_{omega_1}, chi_{Omega_C}.
  Eigen::VectorXd b_nodal;
  Eigen::VectorXd omega1_mask;
  Eigen::VectorXd omegaC_mask;

  bool critical = false;
  double epsilon = 0.0;
  /// H_N R^2 / (R^2 + eps) on the critical path.
  double lambda_eps_bound = 0.0;

  Eigen::VectorXd to_symmetrized(const Eigen::VectorXd& nodal) const {
    return M.cwiseSqrt().cwiseProduct(nodal);
  }
  Eigen::VectorXd to_nodal(const Eigen::VectorXd& symmetrized) const {
    return symmetrized.cwiseQuotient(M.cwiseSqrt());
  }
};

/// Conservative flux-form stiffness matrix K (nodal, unscaled) with the
/// no-flux closure at r = 0 and Dirichlet y(R) = 0: y^T K y ~ int |grad y|^2.
Eigen::MatrixXd stiffness_matrix(const RadialGrid& grid);

DiscreteSystem assemble_A(const RadialGrid& grid, const ProblemConfig& cfg);
DiscreteSystem assemble_A_critical(const RadialGrid& grid,
                                   const ProblemConfig& cfg, double eps);
DiscreteSystem assemble_io(const RadialGrid& grid, const ProblemConfig& cfg,
                           DiscreteSystem sys);
/// assemble_A (or the critical variant when cfg.critical) followed by
/// assemble_io.
DiscreteSystem assemble_system(const RadialGrid& grid, const ProblemConfig& cfg);

/// a0 + ||div v||_inf / 2.
double omega0(const ProblemConfig& cfg);

/// min over `trials` random unit vectors of
///   ((omega I - A) y, y) - C_N (L y, y) - (omega - omega0) |y|^2.
/// A nonnegative value certifies the sampled accretivity estimate.
double accretivity_margin(const DiscreteSystem& sys, double omega, int trials,
                          std::uint64_t seed = 7);

/// ((omega I - A) y, y) / |y|^2 for one vector.
double accretivity_form(const DiscreteSystem& sys, double omega,
                        const Eigen::VectorXd& y);

/// max over samples of |B y|^2 - eps |A0 y|^2 - K(eps) |y|^2, with
/// K(eps) = (|v|^2 / C_N)(|v|^2 / (4 eps C_N) + a0). Nonpositive certifies
/// the relative bound of the convection part. Samples are random vectors and
/// the leading eigenvectors of the stiffness form.
double relative_bound_excess(const DiscreteSystem& sys, double eps, int samples,
                             std::uint64_t seed = 11);

/// Row-major CSV with a `# n=..,N=..,R=..,lambda=..` header line.
void export_matrix_csv(const std::string& path, const Eigen::MatrixXd& mat,
                       const DiscreteSystem& sys);
/// Little-endian binary: int32 rows, int32 cols, int32 N, double R,
/// double lambda, then rows*cols doubles in row-major order.
void export_matrix_binary(const std::string& path, const Eigen::MatrixXd& mat,
                          const DiscreteSystem& sys);
Eigen::MatrixXd import_matrix_binary(const std::string& path);

}  // namespace hardy_hinf
