#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hardy_hinf/domain.hpp"

namespace hardy_hinf {

struct HardyTrendPoint {
  int n = 0;
  double h = 0.0;
  double mu_min = 0.0;
};

/// Smallest generalized Rayleigh quotient (K y, y) / (V y, y) on a grid and
/// its behaviour under refinement.
struct HardyReport {
  int dim = 0;
  int n = 0;
  double lambda_min = 0.0;
  double target = 0.0;
  double gap = 0.0;
  /// Coarse to fine; the last entry is the grid that was passed in.
  std::vector<HardyTrendPoint> refinement_trend;
  /// Limit of mu_min(h) fitted with mu + c / (log(R/h) + d)^2 on the three
  /// finest grids. The discrete minimum approaches H_N only logarithmically.
  double extrapolated = 0.0;
  bool extrapolation_converged = false;
};

/// Discrete Hardy potential form diag(w_i / r_i^2).
Eigen::VectorXd hardy_potential_weights(const RadialGrid& grid);

/// Minimal mu with K y = mu V y on one grid (tridiagonal eigensolve).
double hardy_mu_min(const RadialGrid& grid);

/// mu_min on `grid` and on the grids with n/2 and n/4 cells.
HardyReport rayleigh_hardy_min(const RadialGrid& grid);

/// Three-point fit of mu(h) = mu_inf + c / (log(R/h) + d)^2. Falls back to
/// Aitken's delta-squared when no admissible d exists.
double extrapolate_hardy_limit(const std::vector<HardyTrendPoint>& trend,
                               double radius, bool* converged = nullptr);

/// (K y, y) / (V y, y) for a nodal vector.
double hardy_quotient(const RadialGrid& grid, const Eigen::VectorXd& y);

/// sqrt((K y, y) - H_N (V y, y)); the critical-case energy norm.
double h_norm(const RadialGrid& grid, const Eigen::VectorXd& y);

/// Discrete (sum w |y|^p + sum a_f |D y|^p)^{1/p} with one-sided face
/// differences matching the stiffness stencil.
double w1p_norm(const RadialGrid& grid, const Eigen::VectorXd& y, double p);

/// Discrete (sum w |y|^q)^{1/q}; q = infinity gives max |y|.
double lq_norm(const RadialGrid& grid, const Eigen::VectorXd& y, double q);

/// Near-extremal Hardy profile r^{-(N-2)/2} (R - r) sampled on the nodes.
Eigen::VectorXd hardy_profile(const RadialGrid& grid);

struct ImprovedHardyEstimate {
  double p = 1.0;
  /// Estimated inf h_norm(y)^2 / |y|_{W^{1,p}}^2.
  double C_est = 0.0;
  Eigen::VectorXd minimizer;
  /// Estimated sup |y|_{p'} / |y|_{W^{1,p}} with 1/p + 1/p' = 1.
  double C_embed = 0.0;
  double C0_est = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Quotient h_norm(y)^2 / |y|_{W^{1,p}}^2 for one vector.
double improved_hardy_quotient(const RadialGrid& grid, const Eigen::VectorXd& y,
                               double p);

/// Minimizes the improved Hardy quotient by normalized inverse iteration
/// (y <- H^{-1} grad(|y|^2_{W^{1,p}}) / 2, H = K - H_N V), which never
/// increases the quotient. `start` defaults to the near-extremal profile.
ImprovedHardyEstimate improved_hardy_constant(
    const RadialGrid& grid, double p, const Eigen::VectorXd* start = nullptr,
    int max_iter = 200, double rel_tol = 1e-8);

/// Embedding constant of the discrete W^{1,p} -> L^{p'}; max over a family of
/// localized and smooth candidates refined by projected ascent.
double embedding_constant(const RadialGrid& grid, double p);

/// C_0 = C(p) / (2 C_{p}) from the estimate.
double critical_v_threshold(const ImprovedHardyEstimate& est);

/// Strict smallness condition ||v||_inf < C_0.
bool passes_critical_gate(double v_max, double threshold);

std::string hardy_report_csv(const HardyReport& report);
std::string improved_estimate_csv(const ImprovedHardyEstimate& est, int dim,
                                  int n);

}  // namespace hardy_hinf
