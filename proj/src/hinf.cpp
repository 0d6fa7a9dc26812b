#include "hardy_hinf/hinf.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "hardy_hinf/errors.hpp"
#include "hardy_hinf/linalg.hpp"
#include "hardy_hinf/parallel_kernels.hpp"

namespace hardy_hinf {

const char* to_string(HinfResult::Method m) {
  switch (m) {
    case HinfResult::Method::kSweep: return "sweep";
    case HinfResult::Method::kBisection: return "bisection";
    case HinfResult::Method::kSweepFallback: return "sweep_fallback";
  }
  return "unknown";
}

ClosedLoop close_loop(const DiscreteSystem& sys, const Eigen::RowVectorXd& f) {
  ClosedLoop cl;
  cl.A_cl = sys.A + sys.B2 * f;
  cl.B_cl = sys.B1;
  cl.C_cl.resize(sys.C1.rows() + 1, sys.n);
  cl.C_cl.topRows(sys.C1.rows()) = sys.C1;
  cl.C_cl.bottomRows(1) = f;
  const double a = spectral_abscissa(cl.A_cl);
  if (!(a < 0.0))
    throw HinfError(ErrorKind::kClosedLoopUnstable,
                    "closed-loop abscissa " + std::to_string(a) + " >= 0");
  return cl;
}

ClosedLoop close_loop(const DiscreteSystem& sys, const RiccatiSolution& sol) {
  return close_loop(sys, sol.feedback);
}

std::vector<double> default_frequency_grid(const ClosedLoop& cl, int points) {
  const double a = std::abs(spectral_abscissa(cl.A_cl));
  const double lo = std::log10(1e-3 * a);
  const double hi = std::log10(1e4 * a);
  std::vector<double> freqs{0.0};
  for (int k = 0; k < points; ++k)
    freqs.push_back(std::pow(10.0, lo + (hi - lo) * k / (points - 1)));
  return freqs;
}

HinfResult hinf_norm_sweep(const ClosedLoop& cl, const std::vector<double>& freqs,
                           double gamma_target) {
  HinfResult res;
  res.method = HinfResult::Method::kSweep;
  res.gamma_target = gamma_target;
  const std::vector<double> sig =
      sigma_max_response(cl.A_cl, cl.B_cl, cl.C_cl, freqs);
  int best = -1;
  for (std::size_t k = 0; k < sig.size(); ++k) {
    if (std::isnan(sig[k])) {
      ++res.skipped;
      continue;
    }
    if (best < 0 || sig[k] > sig[best]) best = static_cast<int>(k);
  }
  if (res.skipped > 0)
    std::cerr << "warning: " << res.skipped
              << " frequencies skipped (near-imaginary eigenvalue)\n";
  if (best < 0) throw HinfError(ErrorKind::kSolverFailure, "no frequency evaluated");
  res.norm = sig[best];
  res.peak_freq = freqs[best];

  // Golden-section refinement between the neighbours of the discrete peak.
  double a = best > 0 ? freqs[best - 1] : freqs[best];
  double b = best + 1 < static_cast<int>(freqs.size()) ? freqs[best + 1] : freqs[best];
  if (b > a) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    auto f = [&](double w) {
      const double v = sigma_max_at(cl.A_cl, cl.B_cl, cl.C_cl, w);
      return std::isnan(v) ? 0.0 : v;
    };
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 80 && (b - a) > 1e-12 * (1.0 + b); ++it) {
      if (f1 > f2) {
        b = x2; x2 = x1; f2 = f1;
        x1 = b - g * (b - a); f1 = f(x1);
      } else {
        a = x1; x1 = x2; f1 = f2;
        x2 = a + g * (b - a); f2 = f(x2);
      }
    }
    const double xm = 0.5 * (a + b);
    const double fm = f(xm);
    if (fm > res.norm) {
      res.norm = fm;
      res.peak_freq = xm;
    }
  }
  res.sweep_norm = res.norm;
  res.passed = gamma_target > 0.0 && res.norm < gamma_target;
  return res;
}

HinfResult hinf_norm_sweep(const ClosedLoop& cl, double gamma_target) {
  return hinf_norm_sweep(cl, default_frequency_grid(cl), gamma_target);
}

bool level_has_imaginary_eigenvalue(const ClosedLoop& cl, double rho) {
  const Eigen::Index n = cl.A_cl.rows();
  Eigen::MatrixXd H(2 * n, 2 * n);
  H.topLeftCorner(n, n) = cl.A_cl;
  H.topRightCorner(n, n) = cl.B_cl * cl.B_cl.transpose() / (rho * rho);
  H.bottomLeftCorner(n, n) = -cl.C_cl.transpose() * cl.C_cl;
  H.bottomRightCorner(n, n) = -cl.A_cl.transpose();
  return min_relative_real_part(H) <= 1e-9;
}

HinfResult hinf_norm_bisect(const ClosedLoop& cl, double tol, double gamma_target) {
  HinfResult coarse = hinf_norm_sweep(cl, default_frequency_grid(cl, 100), gamma_target);
  if (coarse.norm == 0.0) {
    coarse.method = HinfResult::Method::kBisection;
    coarse.passed = gamma_target > 0.0;
    return coarse;
  }
  HinfResult res = coarse;
  try {
    double lo = 0.5 * coarse.norm;
    double hi = 2.0 * coarse.norm;
    for (int k = 0; k < 60 && level_has_imaginary_eigenvalue(cl, hi); ++k) hi *= 2.0;
    for (int k = 0; k < 60 && !level_has_imaginary_eigenvalue(cl, lo); ++k) lo *= 0.5;
    while (hi - lo > tol * hi) {
      const double mid = 0.5 * (lo + hi);
      if (level_has_imaginary_eigenvalue(cl, mid)) lo = mid;
      else hi = mid;
    }
    res.norm = 0.5 * (lo + hi);
    res.method = HinfResult::Method::kBisection;
  } catch (const HinfError&) {
    res.method = HinfResult::Method::kSweepFallback;
  }
  res.sweep_norm = coarse.norm;
  res.passed = gamma_target > 0.0 && res.norm < gamma_target;
  return res;
}

std::string frequency_response_csv(const ClosedLoop& cl,
                                   const std::vector<double>& freqs) {
  const std::vector<double> sig =
      sigma_max_response(cl.A_cl, cl.B_cl, cl.C_cl, freqs);
  std::ostringstream out;
  out.precision(12);
  out << "omega,sigma_max\n";
  for (std::size_t k = 0; k < freqs.size(); ++k) out << freqs[k] << ',' << sig[k] << '\n';
  return out.str();
}

}  // namespace hardy_hinf
