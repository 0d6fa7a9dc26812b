#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hardy_hinf/hinf.hpp"
#include "hardy_hinf/operators.hpp"

namespace hardy_hinf {

/// Disturbance w(t) in symmetrized L2 coordinates.
using Disturbance = std::function<Eigen::VectorXd(double)>;

enum class Scheme { kImplicitEuler, kCrankNicolson };

/// Time series of one simulation. Energies are quadrature sums over the
/// whole horizon; running values are kept for the CSV dump.
struct SimTrace {
  double dt = 0.0;
  double T = 0.0;
  std::vector<double> times;
  std::vector<double> y_norms;
  std::vector<double> z_running;
  std::vector<double> w_running;
  double z_energy = 0.0;
  double w_energy = 0.0;
  /// Integral of |y|^2 over [0, T].
  double y_energy = 0.0;
  /// |y(t)| ~ C exp(-alpha t), fitted on the second half of the horizon.
  double decay_C = 0.0;
  double decay_alpha = 0.0;
  bool decay_valid = false;
};

/// Least-squares fit of log|y| on the last half of the trace.
void fit_decay(SimTrace& trace);

/// Advances y' = (A + B2 f) y + B1 w. Implicit Euler pairs w_k with y_{k+1}
/// and sums |z_{k+1}|^2 dt and |w_k|^2 dt; Crank-Nicolson uses the
/// trapezoidal rule for both.
SimTrace step_closed_loop(const DiscreteSystem& sys,
                          const std::optional<Eigen::RowVectorXd>& feedback,
                          const Disturbance& w, const Eigen::VectorXd& y0,
                          double dt, double T,
                          Scheme scheme = Scheme::kImplicitEuler);

/// Horizon T = 50 / |abscissa| with at most `max_steps` steps of size dt.
struct Horizon {
  double dt;
  double T;
};
Horizon default_horizon(double abscissa, int max_steps = 10000);

Disturbance zero_disturbance(int n);
/// Re(v e^{i omega t}).
Disturbance sinusoid(const Eigen::VectorXcd& direction, double omega);
/// Piecewise-constant Gaussian samples, one per step of size dt.
Disturbance white_noise(int n, double dt, double T, std::uint64_t seed);
/// Constant direction on [0, width), zero afterwards.
Disturbance pulse(const Eigen::VectorXd& direction, double width);

/// Input direction achieving sigma_max of G(i omega).
Eigen::VectorXcd worst_case_direction(const ClosedLoop& cl, double omega);

struct NamedDisturbance {
  std::string name;
  Disturbance signal;
};

/// White noise, sinusoids at and off the peak frequency, and a pulse.
std::vector<NamedDisturbance> disturbance_library(const ClosedLoop& cl,
                                                  double peak_freq, double dt,
                                                  double T, std::uint64_t seed);

struct GainReport {
  double gain = 0.0;
  std::string worst_signal;
  std::vector<std::pair<std::string, double>> per_signal;
};

/// max over signals of sqrt(z_energy / w_energy) from y0 = 0.
GainReport empirical_gain(const DiscreteSystem& sys,
                          const Eigen::RowVectorXd& feedback,
                          const std::vector<NamedDisturbance>& disturbances,
                          double dt, double T);

struct DetectabilityResult {
  SimTrace trace;
  double integral = 0.0;
  double bound = 0.0;
  bool holds = false;
};

/// Simulates y' = (A - k C1) y and compares int |y|^2 with
/// 1.05 |y0|^2 / (2 (k - omega0)).
DetectabilityResult detectability_experiment(const DiscreteSystem& sys, double k,
                                             const Eigen::VectorXd& y0,
                                             double dt, double T);

/// max over random unit y of int_0^T |B2^T e^{(A^T - k C1) t} y| dt.
double i2_integral_check(const DiscreteSystem& sys, double k, int samples,
                         double T, double dt = 1e-3, std::uint64_t seed = 3);

struct ResolventCheck {
  double M_hat = 0.0;
  bool skipped = false;
  std::vector<std::complex<double>> probes;
  std::vector<double> products;
  /// Largest log-log slope of |s - s0| |(s - A)^{-1}| against |Im s| over the
  /// last decade of each probe line.
  double tail_slope = 0.0;
};

/// Probes on Re s = sigma0 + offset, |Im s| log-spaced up to max_imag
/// (both signs), plus the real point.
std::vector<std::complex<double>> vertical_probe_lines(
    double sigma0, const std::vector<double>& offsets, double max_imag,
    int points_per_line);

/// M_hat = max over probes of |s - sigma0| ||(s I - A)^{-1}||_2; the
/// operator norm dominates any choice of unit right-hand side f.
ResolventCheck resolvent_bound_check(const DiscreteSystem& sys, double sigma0,
                                     const std::vector<std::complex<double>>& probes);

/// Skips the check (flag set) when the critical smallness gate fails.
ResolventCheck resolvent_bound_check_gated(
    const DiscreteSystem& sys, double sigma0,
    const std::vector<std::complex<double>>& probes, bool gate_passed);

std::string sim_trace_csv(const SimTrace& trace);

}  // namespace hardy_hinf
