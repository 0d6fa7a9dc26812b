#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hardy_hinf/operators.hpp"
#include "hardy_hinf/riccati.hpp"

namespace hardy_hinf {

/// Closed loop y' = A_cl y + B_cl w, z = C_cl y. C_cl stacks C1 over the
/// feedback row, so |z|^2 = |C1 y|^2 + (f y)^2 (D1 is an isometry orthogonal
/// to the range of C1).
struct ClosedLoop {
  Eigen::MatrixXd A_cl;
  Eigen::MatrixXd B_cl;
  Eigen::MatrixXd C_cl;
};

struct HinfResult {
  enum class Method { kSweep, kBisection, kSweepFallback };

  double norm = 0.0;
  double peak_freq = 0.0;
  Method method = Method::kSweep;
  double gamma_target = 0.0;
  bool passed = false;
  /// Frequencies skipped because the resolvent solve failed.
  int skipped = 0;
  /// Sweep value used to seed and cross-check the bisection.
  double sweep_norm = 0.0;
};

const char* to_string(HinfResult::Method m);

ClosedLoop close_loop(const DiscreteSystem& sys, const RiccatiSolution& sol);
/// Same construction from an arbitrary feedback row.
ClosedLoop close_loop(const DiscreteSystem& sys, const Eigen::RowVectorXd& feedback);

/// 400 log-spaced points over [1e-3, 1e4] |abscissa(A_cl)| plus omega = 0.
std::vector<double> default_frequency_grid(const ClosedLoop& cl, int points = 400);

/// max_w sigma_max(C (i w - A)^{-1} B) on the grid, refined by golden-section
/// search around the discrete peak.
HinfResult hinf_norm_sweep(const ClosedLoop& cl, const std::vector<double>& freqs,
                           double gamma_target = 0.0);
HinfResult hinf_norm_sweep(const ClosedLoop& cl, double gamma_target = 0.0);

/// True when the level-rho Hamiltonian has an eigenvalue on the imaginary
/// axis, which happens iff |G|_inf >= rho.
bool level_has_imaginary_eigenvalue(const ClosedLoop& cl, double rho);

/// Bisection on rho with the Hamiltonian test until the bracket is within
/// tol * rho. Seeded and cross-checked by a coarse sweep.
HinfResult hinf_norm_bisect(const ClosedLoop& cl, double tol = 1e-8,
                            double gamma_target = 0.0);

/// "omega,sigma_max" rows for plotting.
std::string frequency_response_csv(const ClosedLoop& cl,
                                   const std::vector<double>& freqs);

}  // namespace hardy_hinf
