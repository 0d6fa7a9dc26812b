#include "hardy_hinf/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "hardy_hinf/errors.hpp"
#include "hardy_hinf/linalg.hpp"
#include "hardy_hinf/parallel_kernels.hpp"

namespace hardy_hinf {

namespace {

constexpr double kBlowUp = 1e12;

Eigen::MatrixXd output_rows(const DiscreteSystem& sys,
                            const std::optional<Eigen::RowVectorXd>& f) {
  Eigen::MatrixXd C(sys.C1.rows() + 1, sys.n);
  C.topRows(sys.C1.rows()) = sys.C1;
  C.bottomRows(1) = f ? Eigen::MatrixXd(*f) : Eigen::MatrixXd::Zero(1, sys.n);
  return C;
}

}  // namespace

void fit_decay(SimTrace& trace) {
  const std::size_t m = trace.y_norms.size();
  double st = 0, sy = 0, stt = 0, sty = 0;
  int count = 0;
  for (std::size_t k = m / 2; k < m; ++k) {
    const double v = trace.y_norms[k];
    if (!(v > 0.0) || !std::isfinite(v)) continue;
    const double t = trace.times[k];
    const double ly = std::log(v);
    st += t; sy += ly; stt += t * t; sty += t * ly;
    ++count;
  }
  if (count < 2) {
    trace.decay_valid = false;
    return;
  }
  const double den = count * stt - st * st;
  const double slope = (count * sty - st * sy) / den;
  const double intercept = (sy - slope * st) / count;
  trace.decay_alpha = -slope;
  trace.decay_C = std::exp(intercept);
  trace.decay_valid = true;
}

Horizon default_horizon(double abscissa, int max_steps) {
  const double T = 50.0 / std::abs(abscissa);
  return {T / max_steps, T};
}

SimTrace step_closed_loop(const DiscreteSystem& sys,
                          const std::optional<Eigen::RowVectorXd>& feedback,
                          const Disturbance& w, const Eigen::VectorXd& y0,
                          double dt, double T, Scheme scheme) {
  if (!(dt > 0.0) || !(T > 0.0)) throw_invalid("dt and T must be positive");
  const int n = sys.n;
  const Eigen::MatrixXd Acl =
      feedback ? Eigen::MatrixXd(sys.A + sys.B2 * (*feedback)) : sys.A;
  const Eigen::MatrixXd C = output_rows(sys, feedback);
  const double theta = scheme == Scheme::kImplicitEuler ? 1.0 : 0.5;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(I - theta * dt * Acl);
  if (!(std::abs(lu.determinant()) > 0.0))
    throw HinfError(ErrorKind::kSolverFailure, "time-step matrix is singular at step 0");
  const Eigen::MatrixXd explicit_part = I + (1.0 - theta) * dt * Acl;

  const int steps = static_cast<int>(std::llround(T / dt));
  SimTrace tr;
  tr.dt = dt;
  tr.T = steps * dt;
  tr.times.reserve(steps + 1);
  tr.y_norms.reserve(steps + 1);
  tr.z_running.reserve(steps + 1);
  tr.w_running.reserve(steps + 1);

  Eigen::VectorXd y = y0;
  const double limit = kBlowUp * std::max(y0.norm(), 1.0);
  Eigen::VectorXd wk = w(0.0);
  double zprev = (C * y).squaredNorm();
  double wprev = wk.squaredNorm();
  double yprev = y.squaredNorm();
  tr.times.push_back(0.0);
  tr.y_norms.push_back(y.norm());
  tr.z_running.push_back(0.0);
  tr.w_running.push_back(0.0);
  for (int k = 0; k < steps; ++k) {
    const double t1 = (k + 1) * dt;
    const Eigen::VectorXd wnext = w(t1);
    Eigen::VectorXd rhs = explicit_part * y;
    if (scheme == Scheme::kImplicitEuler) rhs += dt * (sys.B1 * wk);
    else rhs += 0.5 * dt * (sys.B1 * (wk + wnext));
    y = lu.solve(rhs);
    const double yn = y.norm();
    if (!std::isfinite(yn))
      throw HinfError(ErrorKind::kSolverFailure,
                      "linear solve failed at step " + std::to_string(k + 1));
    if (yn > limit)
      throw HinfError(ErrorKind::kUnstable,
                      "state norm blew up at step " + std::to_string(k + 1));
    const double z2 = (C * y).squaredNorm();
    const double w2 = wnext.squaredNorm();
    if (scheme == Scheme::kImplicitEuler) {
      tr.z_energy += dt * z2;
      tr.w_energy += dt * wk.squaredNorm();
      tr.y_energy += dt * yn * yn;
    } else {
      tr.z_energy += 0.5 * dt * (zprev + z2);
      tr.w_energy += 0.5 * dt * (wprev + w2);
      tr.y_energy += 0.5 * dt * (yprev + yn * yn);
    }
    zprev = z2;
    wprev = w2;
    yprev = yn * yn;
    wk = wnext;
    tr.times.push_back(t1);
    tr.y_norms.push_back(yn);
    tr.z_running.push_back(tr.z_energy);
    tr.w_running.push_back(tr.w_energy);
  }
  fit_decay(tr);
  return tr;
}

Disturbance zero_disturbance(int n) {
  return [n](double) { return Eigen::VectorXd::Zero(n).eval(); };
}

Disturbance sinusoid(const Eigen::VectorXcd& direction, double omega) {
  const Eigen::VectorXd re = direction.real();
  const Eigen::VectorXd im = direction.imag();
  return [re, im, omega](double t) {
    return (re * std::cos(omega * t) - im * std::sin(omega * t)).eval();
  };
}

Disturbance white_noise(int n, double dt, double T, std::uint64_t seed) {
  const int steps = static_cast<int>(std::llround(T / dt)) + 2;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd samples(n, steps);
  for (int k = 0; k < steps; ++k)
    for (int i = 0; i < n; ++i) samples(i, k) = normal(rng);
  return [samples, dt](double t) {
    const long k = std::clamp<long>(std::lround(t / dt), 0, samples.cols() - 1);
    return Eigen::VectorXd(samples.col(k));
  };
}

Disturbance pulse(const Eigen::VectorXd& direction, double width) {
  return [direction, width](double t) {
    return t < width ? direction : Eigen::VectorXd::Zero(direction.size()).eval();
  };
}

Eigen::VectorXcd worst_case_direction(const ClosedLoop& cl, double omega) {
  using cd = std::complex<double>;
  Eigen::MatrixXcd shifted = -cl.A_cl.cast<cd>();
  shifted.diagonal().array() += cd(0.0, omega);
  const Eigen::MatrixXcd G =
      cl.C_cl.cast<cd>() * shifted.partialPivLu().solve(cl.B_cl.cast<cd>());
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(G, Eigen::ComputeThinV);
  return svd.matrixV().col(0);
}

std::vector<NamedDisturbance> disturbance_library(const ClosedLoop& cl,
                                                  double peak_freq, double dt,
                                                  double T, std::uint64_t seed) {
  const int n = static_cast<int>(cl.A_cl.rows());
  std::vector<NamedDisturbance> lib;
  lib.push_back({"white_noise", white_noise(n, dt, T, seed)});
  lib.push_back({"sinusoid_peak",
                 sinusoid(worst_case_direction(cl, peak_freq), peak_freq)});
  // A peak at (numerically) zero frequency has no meaningful multiple, so
  // the off-peak probe falls back to the decay rate.
  const double off =
      std::max(3.0 * peak_freq, std::abs(spectral_abscissa(cl.A_cl)));
  lib.push_back({"sinusoid_off_peak", sinusoid(worst_case_direction(cl, off), off)});
  const Eigen::VectorXd dir = worst_case_direction(cl, 0.0).real().normalized();
  lib.push_back({"pulse", pulse(dir, 0.1 * T)});
  return lib;
}

GainReport empirical_gain(const DiscreteSystem& sys,
                          const Eigen::RowVectorXd& feedback,
                          const std::vector<NamedDisturbance>& disturbances,
                          double dt, double T) {
  GainReport rep;
  const Eigen::VectorXd y0 = Eigen::VectorXd::Zero(sys.n);
  for (const auto& d : disturbances) {
    const SimTrace tr = step_closed_loop(sys, feedback, d.signal, y0, dt, T);
    if (!(tr.w_energy > 0.0)) continue;
    const double g = std::sqrt(tr.z_energy / tr.w_energy);
    rep.per_signal.emplace_back(d.name, g);
    if (g > rep.gain) {
      rep.gain = g;
      rep.worst_signal = d.name;
    }
  }
  return rep;
}

DetectabilityResult detectability_experiment(const DiscreteSystem& sys, double k,
                                             const Eigen::VectorXd& y0,
                                             double dt, double T) {
  if (!(k > sys.omega0_const))
    throw_invalid("detectability gain k must exceed omega0");
  DiscreteSystem injected = sys;
  injected.A = sys.A - k * sys.C1;
  DetectabilityResult res;
  res.trace = step_closed_loop(injected, std::nullopt, zero_disturbance(sys.n), y0,
                               dt, T);
  res.integral = res.trace.y_energy;
  res.bound = 1.05 / (2.0 * (k - sys.omega0_const)) * y0.squaredNorm();
  res.holds = res.integral <= res.bound;
  return res;
}

double i2_integral_check(const DiscreteSystem& sys, double k, int samples,
                         double T, double dt, std::uint64_t seed) {
  if (!(k > sys.omega0_const)) throw_invalid("i2 check needs k > omega0");
  const int n = sys.n;
  const Eigen::MatrixXd adj = sys.A.transpose() - k * sys.C1.transpose();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(
      Eigen::MatrixXd::Identity(n, n) - dt * adj);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd Y(n, samples);
  for (int j = 0; j < samples; ++j)
    for (int i = 0; i < n; ++i) Y(i, j) = normal(rng);
  Y.colwise().normalize();

  const Eigen::RowVectorXd b = sys.B2.transpose();
  Eigen::RowVectorXd integral = Eigen::RowVectorXd::Zero(samples);
  const int steps = static_cast<int>(std::llround(T / dt));
  for (int s = 0; s < steps; ++s) {
    Y = lu.solve(Y);
    integral += dt * (b * Y).cwiseAbs();
  }
  // Every trajectory must have decayed well below its unit start.
  const double final_norm = Y.colwise().norm().maxCoeff();
  if (!(final_norm < 1e-3))
    throw HinfError(ErrorKind::kDetectabilityViolated,
                    "adjoint trajectories do not decay (|y(T)| = " +
                        std::to_string(final_norm) + ")");
  return integral.maxCoeff();
}

std::vector<std::complex<double>> vertical_probe_lines(
    double sigma0, const std::vector<double>& offsets, double max_imag,
    int points_per_line) {
  std::vector<std::complex<double>> probes;
  for (double off : offsets) {
    probes.emplace_back(sigma0 + off, 0.0);
    for (int k = 0; k < points_per_line; ++k) {
      const double im = std::pow(10.0, -2.0 + (std::log10(max_imag) + 2.0) * k /
                                                   (points_per_line - 1));
      probes.emplace_back(sigma0 + off, im);
      probes.emplace_back(sigma0 + off, -im);
    }
  }
  return probes;
}

ResolventCheck resolvent_bound_check(const DiscreteSystem& sys, double sigma0,
                                     const std::vector<std::complex<double>>& probes) {
  for (auto s : probes)
    if (!(s.real() > sigma0)) throw_invalid("resolvent probes need Re s > sigma0");
  ResolventCheck chk;
  chk.probes = probes;
  const std::vector<double> norms = resolvent_norms(sys.A, probes);
  chk.products.resize(probes.size());
  for (std::size_t k = 0; k < probes.size(); ++k) {
    if (!std::isfinite(norms[k]))
      throw HinfError(ErrorKind::kSolverFailure,
                      "singular resolvent at a probe (eigenvalue proximity)");
    chk.products[k] = std::abs(probes[k] - sigma0) * norms[k];
    chk.M_hat = std::max(chk.M_hat, chk.products[k]);
  }

  // Tail slope per (line, sign): fit over |Im s| in the last decade.
  double worst = -std::numeric_limits<double>::infinity();
  std::vector<double> lines;
  for (auto s : probes)
    if (std::find(lines.begin(), lines.end(), s.real()) == lines.end())
      lines.push_back(s.real());
  const double top = [&] {
    double m = 0.0;
    for (auto s : probes) m = std::max(m, std::abs(s.imag()));
    return m;
  }();
  for (double re : lines) {
    for (int sign : {1, -1}) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      int cnt = 0;
      for (std::size_t k = 0; k < probes.size(); ++k) {
        const auto s = probes[k];
        if (s.real() != re || s.imag() * sign <= 0.0) continue;
        if (std::abs(s.imag()) < 0.1 * top) continue;
        const double x = std::log(std::abs(s.imag()));
        const double yv = std::log(chk.products[k]);
        sx += x; sy += yv; sxx += x * x; sxy += x * yv;
        ++cnt;
      }
      if (cnt >= 2) worst = std::max(worst, (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx));
    }
  }
  chk.tail_slope = std::isfinite(worst) ? worst : 0.0;
  return chk;
}

ResolventCheck resolvent_bound_check_gated(
    const DiscreteSystem& sys, double sigma0,
    const std::vector<std::complex<double>>& probes, bool gate_passed) {
  if (!gate_passed) {
    ResolventCheck chk;
    chk.skipped = true;
    return chk;
  }
  return resolvent_bound_check(sys, sigma0, probes);
}

std::string sim_trace_csv(const SimTrace& trace) {
  std::ostringstream out;
  out.precision(12);
  out << "t,y_norm,z_energy,w_energy\n";
  for (std::size_t k = 0; k < trace.times.size(); ++k)
    out << trace.times[k] << ',' << trace.y_norms[k] << ',' << trace.z_running[k]
        << ',' << trace.w_running[k] << '\n';
  return out.str();
}

}  // namespace hardy_hinf
