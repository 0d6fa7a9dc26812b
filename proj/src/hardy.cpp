#include "hardy_hinf/hardy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "hardy_hinf/errors.hpp"
#include "hardy_hinf/operators.hpp"

namespace hardy_hinf {

namespace {

double signed_pow(double t, double e) {
  if (t == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(t), e), t);
}

// Face differences (y_{i+1} - y_i)/h and -y_{n-1}/(h/2) at r = R, with the
// volume attached to each face.
struct FaceDiff {
  Eigen::VectorXd diff;
  Eigen::VectorXd volume;
};

FaceDiff face_differences(const RadialGrid& g, const Eigen::VectorXd& y) {
  FaceDiff f;
  f.diff.resize(g.n);
  f.volume.resize(g.n);
  for (int i = 0; i + 1 < g.n; ++i) {
    f.diff[i] = (y[i + 1] - y[i]) / g.h;
    f.volume[i] = g.face_areas[i] * g.h;
  }
  f.diff[g.n - 1] = -y[g.n - 1] / (0.5 * g.h);
  f.volume[g.n - 1] = g.face_areas[g.n - 1] * 0.5 * g.h;
  return f;
}

// D^T applied to a face vector.
Eigen::VectorXd face_transpose(const RadialGrid& g, const Eigen::VectorXd& t) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g.n);
  for (int i = 0; i + 1 < g.n; ++i) {
    out[i + 1] += t[i] / g.h;
    out[i] -= t[i] / g.h;
  }
  out[g.n - 1] -= t[g.n - 1] / (0.5 * g.h);
  return out;
}

double w1p_sum(const RadialGrid& g, const Eigen::VectorXd& y, double p) {
  const FaceDiff f = face_differences(g, y);
  double s = 0.0;
  for (int i = 0; i < g.n; ++i) {
    s += g.weights[i] * std::pow(std::abs(y[i]), p);
    s += f.volume[i] * std::pow(std::abs(f.diff[i]), p);
  }
  return s;
}

// Half gradient of |y|_{W^{1,p}}^2 (up to a positive factor).
Eigen::VectorXd w1p_half_gradient(const RadialGrid& g, const Eigen::VectorXd& y,
                                  double p) {
  const FaceDiff f = face_differences(g, y);
  Eigen::VectorXd node(g.n), face(g.n);
  for (int i = 0; i < g.n; ++i) {
    node[i] = g.weights[i] * signed_pow(y[i], p - 1.0);
    face[i] = f.volume[i] * signed_pow(f.diff[i], p - 1.0);
  }
  return node + face_transpose(g, face);
}

Eigen::VectorXd w1p_norm_gradient(const RadialGrid& g, const Eigen::VectorXd& y,
                                  double p) {
  const double s = w1p_sum(g, y, p);
  return std::pow(s, 1.0 / p - 1.0) * w1p_half_gradient(g, y, p);
}

Eigen::VectorXd lq_norm_gradient(const RadialGrid& g, const Eigen::VectorXd& y,
                                 double q) {
  const double nq = lq_norm(g, y, q);
  Eigen::VectorXd out(g.n);
  for (int i = 0; i < g.n; ++i)
    out[i] = g.weights[i] * signed_pow(y[i], q - 1.0);
  return std::pow(nq, 1.0 - q) * out;
}

double conjugate_exponent(double p) {
  return p <= 1.0 ? std::numeric_limits<double>::infinity() : p / (p - 1.0);
}

}  // namespace

Eigen::VectorXd hardy_potential_weights(const RadialGrid& grid) {
  return grid.weights.cwiseQuotient(grid.nodes.cwiseAbs2());
}

double hardy_mu_min(const RadialGrid& grid) {
  const Eigen::MatrixXd K = stiffness_matrix(grid);
  const Eigen::VectorXd s = hardy_potential_weights(grid).cwiseSqrt().cwiseInverse();
  Eigen::VectorXd diag(grid.n);
  Eigen::VectorXd sub(grid.n - 1);
  for (int i = 0; i < grid.n; ++i) diag[i] = K(i, i) * s[i] * s[i];
  for (int i = 0; i + 1 < grid.n; ++i) sub[i] = K(i + 1, i) * s[i] * s[i + 1];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw HinfError(ErrorKind::kSolverFailure,
                    "tridiagonal eigensolver did not converge (n = " +
                        std::to_string(grid.n) + ")");
  return es.eigenvalues()[0];
}

HardyReport rayleigh_hardy_min(const RadialGrid& grid) {
  HardyReport rep;
  rep.dim = grid.dim;
  rep.n = grid.n;
  rep.target = hardy_constant(grid.dim);
  for (int div : {4, 2, 1}) {
    const int m = std::max(4, grid.n / div);
    const RadialGrid g = div == 1 ? grid : build_radial_grid(grid.dim, grid.radius, m);
    rep.refinement_trend.push_back({m, g.h, hardy_mu_min(g)});
  }
  rep.lambda_min = rep.refinement_trend.back().mu_min;
  rep.gap = rep.lambda_min - rep.target;
  rep.extrapolated = extrapolate_hardy_limit(rep.refinement_trend, grid.radius,
                                             &rep.extrapolation_converged);
  return rep;
}

double extrapolate_hardy_limit(const std::vector<HardyTrendPoint>& trend,
                               double radius, bool* converged) {
  if (trend.size() < 3) throw_invalid("extrapolation needs three grids");
  const auto& p0 = trend[trend.size() - 3];
  const auto& p1 = trend[trend.size() - 2];
  const auto& p2 = trend[trend.size() - 1];
  const double L[3] = {std::log(radius / p0.h), std::log(radius / p1.h),
                       std::log(radius / p2.h)};
  const double mu[3] = {p0.mu_min, p1.mu_min, p2.mu_min};

  // For fixed d the model is linear in (mu_inf, c); fit the first two points
  // and take the mismatch at the third.
  auto fit = [&](double d, double* limit) {
    const double x0 = 1.0 / ((L[0] + d) * (L[0] + d));
    const double x1 = 1.0 / ((L[1] + d) * (L[1] + d));
    const double x2 = 1.0 / ((L[2] + d) * (L[2] + d));
    const double c = (mu[0] - mu[1]) / (x0 - x1);
    *limit = mu[0] - c * x0;
    return mu[2] - (*limit + c * x2);
  };

  const double d_lo = -std::min({L[0], L[1], L[2]}) + 0.05;
  constexpr int kScan = 400;
  constexpr double kDMax = 60.0;
  double lim = 0.0;
  double prev_d = d_lo;
  double prev_f = fit(prev_d, &lim);
  for (int k = 1; k <= kScan; ++k) {
    const double d = d_lo + (kDMax - d_lo) * k / kScan;
    const double f = fit(d, &lim);
    if (std::isfinite(f) && std::isfinite(prev_f) && (f == 0.0 || (f > 0) != (prev_f > 0))) {
      double a = prev_d, b = d, fa = prev_f;
      for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = fit(m, &lim);
        if ((fm > 0) == (fa > 0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      fit(0.5 * (a + b), &lim);
      if (converged) *converged = true;
      return lim;
    }
    prev_d = d;
    prev_f = f;
  }
  if (converged) *converged = false;
  const double d1 = mu[1] - mu[0];
  const double d2 = mu[2] - mu[1];
  return d2 == d1 ? mu[2] : mu[2] - d2 * d2 / (d2 - d1);
}

double hardy_quotient(const RadialGrid& grid, const Eigen::VectorXd& y) {
  const Eigen::MatrixXd K = stiffness_matrix(grid);
  return y.dot(K * y) / y.cwiseAbs2().dot(hardy_potential_weights(grid));
}

double h_norm(const RadialGrid& grid, const Eigen::VectorXd& y) {
  const Eigen::MatrixXd K = stiffness_matrix(grid);
  const double form = y.dot(K * y) -
                      hardy_constant(grid.dim) *
                          y.cwiseAbs2().dot(hardy_potential_weights(grid));
  const double mass = y.cwiseAbs2().dot(grid.weights);
  if (form < -1e-6 * mass)
    throw HinfError(ErrorKind::kSolverFailure,
                    "Hardy deficit form is negative beyond rounding; "
                    "discretization failure");
  return std::sqrt(std::max(0.0, form));
}

double w1p_norm(const RadialGrid& grid, const Eigen::VectorXd& y, double p) {
  if (!(p >= 1.0)) throw_invalid("W^{1,p} norm needs p >= 1");
  return std::pow(w1p_sum(grid, y, p), 1.0 / p);
}

double lq_norm(const RadialGrid& grid, const Eigen::VectorXd& y, double q) {
  if (std::isinf(q)) return y.cwiseAbs().maxCoeff();
  double s = 0.0;
  for (int i = 0; i < grid.n; ++i) s += grid.weights[i] * std::pow(std::abs(y[i]), q);
  return std::pow(s, 1.0 / q);
}

Eigen::VectorXd hardy_profile(const RadialGrid& grid) {
  Eigen::VectorXd y(grid.n);
  const double e = -(grid.dim - 2) / 2.0;
  for (int i = 0; i < grid.n; ++i)
    y[i] = std::pow(grid.nodes[i], e) * (grid.radius - grid.nodes[i]);
  return y;
}

double improved_hardy_quotient(const RadialGrid& grid, const Eigen::VectorXd& y,
                               double p) {
  const double hn = h_norm(grid, y);
  const double wn = w1p_norm(grid, y, p);
  return hn * hn / (wn * wn);
}

ImprovedHardyEstimate improved_hardy_constant(const RadialGrid& grid, double p,
                                              const Eigen::VectorXd* start,
                                              int max_iter, double rel_tol) {
  if (!(p >= 1.0 && p < 2.0)) throw_invalid("improved Hardy needs 1 <= p < 2");
  const Eigen::MatrixXd K = stiffness_matrix(grid);
  Eigen::MatrixXd H = K;
  H.diagonal() -= hardy_constant(grid.dim) * hardy_potential_weights(grid);
  const Eigen::LLT<Eigen::MatrixXd> llt(H);
  if (llt.info() != Eigen::Success)
    throw HinfError(ErrorKind::kSolverFailure,
                    "Hardy deficit form is not positive definite on this grid");

  ImprovedHardyEstimate est;
  est.p = p;
  Eigen::VectorXd y = start ? *start : hardy_profile(grid);
  y /= y.norm();
  double best = improved_hardy_quotient(grid, y, p);
  est.minimizer = y;
  for (int it = 1; it <= max_iter; ++it) {
    Eigen::VectorXd next = llt.solve(w1p_half_gradient(grid, y, p));
    next /= next.norm();
    const double q = improved_hardy_quotient(grid, next, p);
    est.iterations = it;
    if (!(q < best)) {
      // Stationary up to rounding; the earlier iterate is kept.
      est.converged = true;
      break;
    }
    const double change = (best - q) / best;
    best = q;
    est.minimizer = next;
    y = next;
    if (change < rel_tol) {
      est.converged = true;
      break;
    }
  }
  est.C_est = best;
  est.C_embed = embedding_constant(grid, p);
  est.C0_est = critical_v_threshold(est);
  return est;
}

double embedding_constant(const RadialGrid& grid, double p) {
  const double q = conjugate_exponent(p);
  auto ratio = [&](const Eigen::VectorXd& y) {
    return lq_norm(grid, y, q) / w1p_norm(grid, y, p);
  };

  std::vector<Eigen::VectorXd> candidates;
  const int n = grid.n;
  for (double center_frac : {0.0, 0.125, 0.25, 0.5, 0.75}) {
    for (int width : {2, 4, 8, 16, 32, n}) {
      const double rc = center_frac * grid.radius;
      const double delta = std::min(width * grid.h, grid.radius);
      Eigen::VectorXd y(n);
      for (int i = 0; i < n; ++i)
        y[i] = std::max(0.0, 1.0 - std::abs(grid.nodes[i] - rc) / delta);
      if (y.norm() > 0.0) candidates.push_back(y);
    }
  }
  candidates.push_back(hardy_profile(grid));
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
      stiffness_matrix(grid), Eigen::MatrixXd(grid.weights.asDiagonal()));
  for (int k = 0; k < std::min(n, 5); ++k) candidates.push_back(es.eigenvectors().col(k));

  double best = 0.0;
  for (Eigen::VectorXd y : candidates) {
    double value = ratio(y);
    if (std::isfinite(q)) {
      double step = 0.1;
      for (int it = 0; it < 60 && step > 1e-8; ++it) {
        const Eigen::VectorXd g =
            lq_norm_gradient(grid, y, q) / lq_norm(grid, y, q) -
            w1p_norm_gradient(grid, y, p) / w1p_norm(grid, y, p);
        if (!(g.norm() > 0.0)) break;
        const Eigen::VectorXd trial = y + step * y.norm() * g / g.norm();
        const double tv = ratio(trial);
        if (tv > value) {
          y = trial;
          value = tv;
          step *= 1.5;
        } else {
          step *= 0.5;
        }
      }
    }
    best = std::max(best, value);
  }
  return best;
}

double critical_v_threshold(const ImprovedHardyEstimate& est) {
  if (!(est.C_embed > 0.0)) throw_invalid("embedding constant must be positive");
  return est.C_est / (2.0 * est.C_embed);
}

bool passes_critical_gate(double v_max, double threshold) {
  return v_max < threshold;
}

std::string hardy_report_csv(const HardyReport& report) {
  std::ostringstream out;
  out.precision(12);
  out << "n,N,p,value,flag\n";
  for (const auto& pt : report.refinement_trend)
    out << pt.n << ',' << report.dim << ",2," << pt.mu_min << ",trend\n";
  out << report.n << ',' << report.dim << ",2," << report.extrapolated << ','
      << (report.extrapolation_converged ? "extrapolated" : "aitken") << '\n';
  return out.str();
}

std::string improved_estimate_csv(const ImprovedHardyEstimate& est, int dim,
                                  int n) {
  std::ostringstream out;
  out.precision(12);
  out << "n,N,p,value,flag\n";
  const char* flag = est.converged ? "converged" : "not_converged";
  out << n << ',' << dim << ',' << est.p << ',' << est.C_est << ",C_est:" << flag << '\n';
  out << n << ',' << dim << ',' << est.p << ',' << est.C_embed << ",C_embed\n";
  out << n << ',' << dim << ',' << est.p << ',' << est.C0_est << ",C0_est\n";
  return out.str();
}

}  // namespace hardy_hinf
