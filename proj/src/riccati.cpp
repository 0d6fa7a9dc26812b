#include "hardy_hinf/riccati.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "hardy_hinf/errors.hpp"
#include "hardy_hinf/linalg.hpp"

namespace hardy_hinf {

namespace {

constexpr double kImagAxisTol = 1e-9;
constexpr double kMaxSubspaceCond = 1e12;

double inv_gamma_sq(double gamma) {
  return (gamma > 0.0 && std::isfinite(gamma)) ? 1.0 / (gamma * gamma) : 0.0;
}

Eigen::MatrixXd output_weight(const DiscreteSystem& sys) {
  return sys.C1.transpose() * sys.C1;
}

}  // namespace

Eigen::MatrixXd riccati_quadratic_weight(const DiscreteSystem& sys, double gamma) {
  return sys.B2 * sys.B2.transpose() -
         inv_gamma_sq(gamma) * sys.B1 * sys.B1.transpose();
}

double gare_residual(const DiscreteSystem& sys, const Eigen::MatrixXd& P,
                     double gamma) {
  const Eigen::MatrixXd R = riccati_quadratic_weight(sys, gamma);
  const Eigen::MatrixXd res = sys.A.transpose() * P + P * sys.A - P * R * P +
                              output_weight(sys);
  return res.norm();
}

RiccatiSolution certify_solution(const DiscreteSystem& sys, Eigen::MatrixXd P,
                                 double gamma, const std::string& method,
                                 const CertificateTolerances& tol) {
  RiccatiSolution sol;
  sol.gamma = gamma;
  sol.method = method;
  const double pnorm_f = P.norm();
  if (!P.allFinite())
    throw HinfError(ErrorKind::kGammaInfeasible, method + ": non-finite Riccati solution");
  if ((P - P.transpose()).norm() > tol.symmetry * std::max(pnorm_f, 1e-300) &&
      pnorm_f > 0.0)
    throw HinfError(ErrorKind::kSolverFailure, method + ": P is not symmetric");
  P = symmetric_part(P);
  sol.P = P;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P, Eigen::EigenvaluesOnly);
  sol.psd_min = es.eigenvalues().minCoeff();
  const double p2 = es.eigenvalues().cwiseAbs().maxCoeff();

  sol.feedback = -(sys.B2.transpose() * P);
  const Eigen::MatrixXd LP1 = sys.A - sys.B2 * sys.B2.transpose() * P;
  const Eigen::MatrixXd LP =
      LP1 + inv_gamma_sq(gamma) * sys.B1 * sys.B1.transpose() * P;
  sol.abscissa_LP = spectral_abscissa(LP);
  sol.abscissa_LP1 = spectral_abscissa(LP1);
  sol.residual = gare_residual(sys, P, gamma);

  if (sol.psd_min < -tol.psd * std::max(p2, 1e-300) && p2 > 0.0)
    throw HinfError(ErrorKind::kGammaInfeasible,
                    method + ": Riccati solution is not positive semidefinite "
                             "(min eigenvalue " + std::to_string(sol.psd_min) + ")");
  if (!(sol.abscissa_LP < 0.0) || !(sol.abscissa_LP1 < 0.0))
    throw HinfError(ErrorKind::kGammaInfeasible,
                    method + ": closed-loop generators are not exponentially stable");
  const double scale = spectral_norm(sys.A) * p2 + spectral_norm(output_weight(sys));
  if (sol.residual > tol.residual * std::max(scale, 1e-300))
    throw HinfError(ErrorKind::kSolverFailure,
                    method + ": Riccati residual " + std::to_string(sol.residual) +
                        " exceeds tolerance");
  return sol;
}

Eigen::MatrixXd gare_hamiltonian(const DiscreteSystem& sys, double gamma) {
  const int n = sys.n;
  Eigen::MatrixXd H(2 * n, 2 * n);
  H.topLeftCorner(n, n) = sys.A;
  H.topRightCorner(n, n) = -riccati_quadratic_weight(sys, gamma);
  H.bottomLeftCorner(n, n) = -output_weight(sys);
  H.bottomRightCorner(n, n) = -sys.A.transpose();
  return H;
}

RiccatiSolution solve_gare_hamiltonian(const DiscreteSystem& sys, double gamma) {
  const int n = sys.n;
  const Eigen::MatrixXd H = gare_hamiltonian(sys, gamma);
  if (min_relative_real_part(H) <= kImagAxisTol)
    throw HinfError(ErrorKind::kGammaInfeasible,
                    "Hamiltonian has eigenvalues on the imaginary axis at gamma = " +
                        std::to_string(gamma));
  int stable = 0;
  const Eigen::MatrixXd U = stable_invariant_subspace(H, &stable);
  if (stable != n)
    throw HinfError(ErrorKind::kGammaInfeasible,
                    "stable subspace has dimension " + std::to_string(stable) +
                        ", expected " + std::to_string(n));
  const Eigen::MatrixXd X = U.topRows(n);
  const Eigen::MatrixXd Y = U.bottomRows(n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
  const double smin = svd.singularValues()[n - 1];
  const double cond = smin > 0.0 ? svd.singularValues()[0] / smin
                                 : std::numeric_limits<double>::infinity();
  if (!(cond < kMaxSubspaceCond))
    throw SubspaceDegenerateError(
        "stable subspace basis X is singular (cond = " + std::to_string(cond) + ")",
        cond);
  // P X = Y  <=>  X^T P^T = Y^T.
  const Eigen::MatrixXd P =
      X.transpose().partialPivLu().solve(Y.transpose()).transpose();
  RiccatiSolution sol = certify_solution(sys, symmetric_part(P), gamma, "hamiltonian");
  return sol;
}

namespace {

struct NewtonRun {
  Eigen::MatrixXd P;
  int iterations = 0;
};

NewtonRun newton_at_level(const DiscreteSystem& sys, double gamma,
                          Eigen::MatrixXd P, const NewtonOptions& opts) {
  const Eigen::MatrixXd R = riccati_quadratic_weight(sys, gamma);
  const Eigen::MatrixXd Q = output_weight(sys);
  double res = gare_residual(sys, P, gamma);
  const double floor_scale =
      1e-8 * (spectral_norm(sys.A) * std::max(P.norm(), 1.0) + Q.norm());
  int growth = 0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    const Eigen::MatrixXd Ak = sys.A - R * P;
    if (!(spectral_abscissa(Ak) < 0.0))
      throw HinfError(ErrorKind::kGammaInfeasible,
                      "Newton iterate lost closed-loop stability at gamma = " +
                          std::to_string(gamma));
    Eigen::MatrixXd next;
    try {
      next = symmetric_part(solve_lyapunov(Ak, P * R * P + Q));
    } catch (const HinfError& e) {
      throw NewtonDivergedError(std::string("Lyapunov solve failed: ") + e.what(), P, it);
    }
    const double next_res = gare_residual(sys, next, gamma);
    if (!std::isfinite(next_res))
      throw NewtonDivergedError("non-finite residual", P, it);
    growth = next_res > res ? growth + 1 : 0;
    if (growth >= 5)
      throw NewtonDivergedError("residual grew for 5 consecutive steps", next, it);
    const bool stalled = next_res >= res;
    P = next;
    res = next_res;
    if (res <= opts.abs_tol || (stalled && res <= floor_scale)) return {P, it};
  }
  if (res <= floor_scale) return {P, opts.max_iter};
  throw NewtonDivergedError("iteration cap reached with residual " +
                                std::to_string(res),
                            P, opts.max_iter);
}

}  // namespace

RiccatiSolution solve_gare_newton(const DiscreteSystem& sys, double gamma,
                                  const std::optional<Eigen::MatrixXd>& P_init,
                                  const NewtonOptions& opts) {
  int total = 0;
  Eigen::MatrixXd P;
  if (P_init) {
    if (P_init->rows() != sys.n || P_init->cols() != sys.n)
      throw_invalid("P_init has the wrong dimension");
    auto run = newton_at_level(sys, gamma, *P_init, opts);
    P = run.P;
    total = run.iterations;
  } else {
    if (!(spectral_abscissa(sys.A) < 0.0))
      throw NewtonDivergedError(
          "A is not Hurwitz; P = 0 is not a stabilizing start, supply P_init",
          Eigen::MatrixXd::Zero(sys.n, sys.n), 0);
    auto run = newton_at_level(sys, std::numeric_limits<double>::infinity(),
                               Eigen::MatrixXd::Zero(sys.n, sys.n), opts);
    P = run.P;
    total = run.iterations;
    if (std::isfinite(gamma)) {
      const int steps = std::max(1, opts.continuation_steps);
      for (int j = 0; j <= steps; ++j) {
        const double level = gamma * std::pow(4.0, 1.0 - static_cast<double>(j) / steps);
        auto step = newton_at_level(sys, j == steps ? gamma : level, P, opts);
        P = step.P;
        total += step.iterations;
      }
    }
  }
  RiccatiSolution sol = certify_solution(sys, P, gamma, "newton");
  sol.iterations = total;
  return sol;
}

bool gamma_feasible(const DiscreteSystem& sys, double gamma) {
  try {
    solve_gare_hamiltonian(sys, gamma);
    return true;
  } catch (const HinfError& e) {
    if (e.kind() == ErrorKind::kGammaInfeasible ||
        e.kind() == ErrorKind::kSubspaceDegenerate ||
        e.kind() == ErrorKind::kSolverFailure)
      return false;
    throw;
  }
}

double gamma_opt(const DiscreteSystem& sys, double lo, double hi, double tol) {
  if (!(lo > 0.0 && lo < hi && tol > 0.0))
    throw_invalid("gamma_opt needs 0 < lo < hi and tol > 0");
  if (!gamma_feasible(sys, hi))
    throw HinfError(ErrorKind::kNoFeasibleGamma,
                    "upper end of the bracket gamma = " + std::to_string(hi) +
                        " is infeasible");
  if (gamma_feasible(sys, lo))
    throw_invalid("lower end of the bracket is already feasible");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (gamma_feasible(sys, mid)) hi = mid;
    else lo = mid;
  }
  return hi;
}

std::string riccati_summary_json(const RiccatiSolution& sol) {
  nlohmann::ordered_json j;
  j["method"] = sol.method;
  j["gamma"] = sol.gamma;
  j["residual"] = sol.residual;
  j["abscissa_LP"] = sol.abscissa_LP;
  j["abscissa_LP1"] = sol.abscissa_LP1;
  j["psd_min"] = sol.psd_min;
  j["iterations"] = sol.iterations;
  return j.dump();
}

}  // namespace hardy_hinf
