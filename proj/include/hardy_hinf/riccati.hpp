#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "hardy_hinf/operators.hpp"

namespace hardy_hinf {

/// Stabilizing solution of the game Riccati equation
///   A^T P + P A - P B2 B2^T P + gamma^-2 P B1 B1^T P + C1^T C1 = 0
/// together with its certificates.
struct RiccatiSolution {
  Eigen::MatrixXd P;
  double gamma = 0.0;
  double residual = 0.0;
  /// f = -B2^T P; the control is u = f y.
  Eigen::RowVectorXd feedback;
  /// Spectral abscissae of A - B2 B2^T P + gamma^-2 B1 B1^T P and of
  /// A - B2 B2^T P.
  double abscissa_LP = 0.0;
  double abscissa_LP1 = 0.0;
  double psd_min = 0.0;
  int iterations = 0;
  std::string method;
};

/// gamma <= 0 or infinity drops the B1 term.
Eigen::MatrixXd riccati_quadratic_weight(const DiscreteSystem& sys, double gamma);

/// Frobenius norm of the Riccati residual at P.
double gare_residual(const DiscreteSystem& sys, const Eigen::MatrixXd& P,
                     double gamma);

/// Tolerances from the certificate: symmetry and PSD to 1e-8 relative,
/// both closed-loop generators Hurwitz, residual <= 1e-8 (|A||P| + |C1^T C1|).
struct CertificateTolerances {
  double symmetry = 1e-8;
  double psd = 1e-8;
  double residual = 1e-8;
};

/// Evaluates every certificate for P. Throws GammaInfeasible when P is not a
/// PSD stabilizing solution and SolverFailure when the residual is too large.
RiccatiSolution certify_solution(const DiscreteSystem& sys, Eigen::MatrixXd P,
                                 double gamma, const std::string& method,
                                 const CertificateTolerances& tol = {});

/// Hamiltonian matrix [[A, gamma^-2 B1 B1^T - B2 B2^T], [-C1^T C1, -A^T]].
Eigen::MatrixXd gare_hamiltonian(const DiscreteSystem& sys, double gamma);

/// Stable invariant subspace of the Hamiltonian; P = Y X^{-1}, symmetrized.
RiccatiSolution solve_gare_hamiltonian(const DiscreteSystem& sys, double gamma);

struct NewtonOptions {
  double abs_tol = 1e-10;
  int max_iter = 50;
  /// Continuation levels from 4 gamma down to gamma when no start is given.
  int continuation_steps = 8;
};

/// Newton-Kleinman iteration with Lyapunov solves on the closed-loop matrix
/// A - (B2 B2^T - gamma^-2 B1 B1^T) P_k. Without `P_init`, starts from the
/// LQR solution (gamma = infinity, from P = 0; A must be Hurwitz) and walks
/// gamma down geometrically.
RiccatiSolution solve_gare_newton(const DiscreteSystem& sys, double gamma,
                                  const std::optional<Eigen::MatrixXd>& P_init = std::nullopt,
                                  const NewtonOptions& opts = {});

/// Feasibility as used by the bisection: the Hamiltonian solve succeeds and
/// passes every certificate.
bool gamma_feasible(const DiscreteSystem& sys, double gamma);

/// Smallest feasible attenuation level in [lo, hi], to within `tol`. The
/// returned value is feasible.
double gamma_opt(const DiscreteSystem& sys, double lo, double hi, double tol);

std::string riccati_summary_json(const RiccatiSolution& sol);

}  // namespace hardy_hinf
