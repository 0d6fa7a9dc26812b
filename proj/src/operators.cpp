#include "hardy_hinf/operators.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "hardy_hinf/errors.hpp"
#include "hardy_hinf/parallel_kernels.hpp"

namespace hardy_hinf {

namespace {

constexpr int kMinAssemblyCells = 8;

Eigen::MatrixXd gaussian_columns(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd Y(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) Y(i, j) = normal(rng);
  return Y;
}

// Central-difference convection form z^T C y ~ int (v . grad y) z with the
// even reflection y_{-1} = y_0 at the origin and y_n = -y_{n-1} at r = R.
Eigen::MatrixXd central_convection(const RadialGrid& g, const RadialProfile& v) {
  const int n = g.n;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  if (v.is_zero()) return C;
  for (int i = 0; i < n; ++i) {
    const double coef = g.weights[i] * v(g.nodes[i]) / (2.0 * g.h);
    if (i + 1 < n) C(i, i + 1) += coef;
    else C(i, i) -= coef;
    if (i > 0) C(i, i - 1) -= coef;
    else C(i, i) -= coef;
  }
  return C;
}

DiscreteSystem assemble_with_potential(const RadialGrid& grid,
                                       const ProblemConfig& raw,
                                       const Eigen::VectorXd& potential,
                                       double lambda) {
  if (grid.n < kMinAssemblyCells)
    throw_invalid("operator assembly needs at least 8 cells");
  const ProblemConfig cfg = validate_config(grid, raw);
  const int n = grid.n;

  DiscreteSystem sys;
  sys.grid = grid;
  sys.n = n;
  sys.M = grid.weights;
  sys.lambda = lambda;
  sys.a0 = cfg.a0;
  sys.v_max = cfg.v_max;
  sys.divv_max = cfg.divv_max;
  sys.omega0_const = omega0(cfg);
  sys.potential = potential;

  const Eigen::MatrixXd K = stiffness_matrix(grid);
  const Eigen::VectorXd reaction = cfg.a0 * indicator(grid, cfg.omega0_set).values;

  Eigen::VectorXd divv(n);
  for (int i = 0; i < n; ++i)
    divv[i] = radial_divergence(cfg.v_profile, grid.dim, grid.nodes[i]);
  const Eigen::MatrixXd C = central_convection(grid, cfg.v_profile);
  Eigen::MatrixXd conv = 0.5 * (C - C.transpose());
  conv.diagonal() -= 0.5 * grid.weights.cwiseProduct(divv);

  Eigen::MatrixXd A0_weak = -K;
  A0_weak.diagonal() +=
      grid.weights.cwiseProduct(lambda * potential + reaction);
  sys.A_weak = A0_weak + conv;

  const Eigen::VectorXd s = grid.weights.cwiseSqrt().cwiseInverse();
  auto symmetrize = [&](const Eigen::MatrixXd& W) -> Eigen::MatrixXd {
    return s.asDiagonal() * W * s.asDiagonal();
  };
  sys.L = symmetrize(K);
  sys.A0 = symmetrize(A0_weak);
  sys.Bconv = symmetrize(conv);
  sys.A = sys.A0 + sys.Bconv;
  return sys;
}

}  // namespace

ProblemConfig validate_config(const RadialGrid& grid, ProblemConfig cfg) {
  const double HN = hardy_constant(grid.dim);
  if (!(cfg.lambda >= 0.0)) throw_invalid("lambda must be nonnegative");
  if (cfg.lambda > HN * (1.0 + 1e-14))
    throw_invalid("lambda exceeds the Hardy constant H_N");
  if (cfg.critical && std::abs(cfg.lambda - HN) > 1e-12 * HN)
    throw_invalid("critical configuration requires lambda = H_N");
  if (cfg.a0 < 0.0) throw_invalid("a0 must be nonnegative");
  if (!(cfg.gamma > 0.0)) throw_invalid("gamma must be positive");

  const Annulus ball{0.0, grid.radius};
  for (const Annulus* a : {&cfg.omega0_set, &cfg.omegaC_set, &cfg.omega1_set})
    if (a->r_lo < 0.0 || a->r_hi > grid.radius || a->r_lo >= a->r_hi)
      throw_invalid("subdomain shells must satisfy 0 <= r_lo < r_hi <= R");
  if (!cfg.omega0_set.compactly_inside(cfg.omegaC_set))
    throw_invalid("Omega_0 must be compactly contained in Omega_C");
  if (!cfg.omega1_set.compactly_inside(ball))
    throw_invalid("omega_1 must be compactly contained in Omega");

  const double vsup = profile_sup(cfg.v_profile, grid.radius);
  const double dsup = divergence_sup(cfg.v_profile, grid.dim, grid.radius);
  if (!std::isfinite(dsup))
    throw_invalid("convection field must have bounded divergence");
  if (cfg.v_max < 0.0) cfg.v_max = vsup;
  if (cfg.divv_max < 0.0) cfg.divv_max = dsup;
  constexpr double kSlack = 1e-12;
  if (cfg.v_max + kSlack < vsup)
    throw_invalid("v_max does not bound the sampled convection field");
  if (cfg.divv_max + kSlack < dsup)
    throw_invalid("divv_max does not bound the sampled divergence");
  return cfg;
}

Eigen::MatrixXd stiffness_matrix(const RadialGrid& g) {
  const int n = g.n;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    const double c = g.face_areas[i] / g.h;
    K(i, i) += c;
    K(i + 1, i + 1) += c;
    K(i, i + 1) -= c;
    K(i + 1, i) -= c;
  }
  // Flux through r = R against the Dirichlet value over half a cell.
  K(n - 1, n - 1) += 2.0 * g.face_areas[n - 1] / g.h;
  return K;
}

double omega0(const ProblemConfig& cfg) {
  return cfg.a0 + std::max(0.0, cfg.divv_max) / 2.0;
}

DiscreteSystem assemble_A(const RadialGrid& grid, const ProblemConfig& cfg) {
  const double HN = hardy_constant(grid.dim);
  if (cfg.lambda > HN * (1.0 + 1e-14))
    throw_invalid("lambda exceeds the Hardy constant H_N");
  if (cfg.critical || cfg.lambda >= HN)
    throw_invalid("critical case lambda = H_N requires the regularized path");
  const Eigen::VectorXd pot = grid.nodes.array().square().inverse();
  DiscreteSystem sys = assemble_with_potential(grid, cfg, pot, cfg.lambda);
  sys.C_N = 1.0 - cfg.lambda / HN;
  return sys;
}

DiscreteSystem assemble_A_critical(const RadialGrid& grid,
                                   const ProblemConfig& cfg, double eps) {
  if (!(eps > 0.0)) throw_invalid("regularization eps must be positive");
  const double HN = hardy_constant(grid.dim);
  ProblemConfig c = cfg;
  c.critical = true;
  c.lambda = HN;
  const Eigen::VectorXd pot = (grid.nodes.array().square() + eps).inverse();
  DiscreteSystem sys = assemble_with_potential(grid, c, pot, HN);
  const double R2 = grid.radius * grid.radius;
  sys.critical = true;
  sys.epsilon = eps;
  sys.lambda_eps_bound = HN * R2 / (R2 + eps);
  sys.C_N = 1.0 - sys.lambda_eps_bound / HN;
  return sys;
}

DiscreteSystem assemble_io(const RadialGrid& grid, const ProblemConfig& raw,
                           DiscreteSystem sys) {
  const ProblemConfig cfg = validate_config(grid, raw);
  const int n = grid.n;
  const Eigen::VectorXd sqrtw = grid.weights.cwiseSqrt();

  const Mask w1 = indicator(grid, cfg.omega1_set);
  const Mask wc = indicator(grid, cfg.omegaC_set);
  sys.omega1_mask = w1.values;
  sys.omegaC_mask = wc.values;
  sys.B1 = w1.values.asDiagonal();
  sys.C1 = wc.values.asDiagonal();

  sys.b_nodal.resize(n);
  for (int i = 0; i < n; ++i) sys.b_nodal[i] = cfg.b_profile(grid.nodes[i]);
  sys.B2 = sqrtw.cwiseProduct(sys.b_nodal);

  const Eigen::VectorXd outside = Eigen::VectorXd::Ones(n) - wc.values;
  const double measure = grid.weights.dot(outside);
  if (!(measure > 0.0))
    throw_invalid("Omega \\ Omega_C has zero measure on this grid; D1 undefined");
  sys.D1 = sqrtw.cwiseProduct(outside) / std::sqrt(measure);
  return sys;
}

DiscreteSystem assemble_system(const RadialGrid& grid, const ProblemConfig& cfg) {
  DiscreteSystem sys = cfg.critical ? assemble_A_critical(grid, cfg, cfg.epsilon)
                                    : assemble_A(grid, cfg);
  return assemble_io(grid, cfg, std::move(sys));
}

double accretivity_form(const DiscreteSystem& sys, double omega,
                        const Eigen::VectorXd& y) {
  return omega - y.dot(sys.A * y) / y.squaredNorm();
}

double accretivity_margin(const DiscreteSystem& sys, double omega, int trials,
                          std::uint64_t seed) {
  if (trials <= 0) throw_invalid("accretivity_margin needs trials > 0");
  // ((omega I - A)y,y) - C_N (Ly,y) - (omega - omega0)|y|^2 as one form;
  // omega cancels.
  (void)omega;
  Eigen::MatrixXd Q = -0.5 * (sys.A + sys.A.transpose()) - sys.C_N * sys.L;
  Q.diagonal().array() += sys.omega0_const;
  const Eigen::MatrixXd Y = gaussian_columns(sys.n, trials, seed);
  return rayleigh_quotients(Q, Y).minCoeff();
}

double relative_bound_excess(const DiscreteSystem& sys, double eps, int samples,
                             std::uint64_t seed) {
  if (!(eps > 0.0)) throw_invalid("relative bound needs eps > 0");
  const double v2 = sys.v_max * sys.v_max;
  const double K = (v2 / sys.C_N) * (v2 / (4.0 * eps * sys.C_N) + sys.a0);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.L);
  const int smooth = std::min(sys.n, 10);
  Eigen::MatrixXd Y(sys.n, samples + smooth);
  Y.leftCols(samples) = gaussian_columns(sys.n, samples, seed);
  Y.rightCols(smooth) = es.eigenvectors().leftCols(smooth);

  double worst = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < Y.cols(); ++j) {
    const Eigen::VectorXd y = Y.col(j).normalized();
    const double excess = (sys.Bconv * y).squaredNorm() -
                          eps * (sys.A0 * y).squaredNorm() - K;
    worst = std::max(worst, excess);
  }
  return worst;
}

void export_matrix_csv(const std::string& path, const Eigen::MatrixXd& mat,
                       const DiscreteSystem& sys) {
  std::ofstream out(path);
  if (!out) throw_invalid("cannot open " + path);
  out.precision(17);
  out << "# n=" << mat.rows() << ",N=" << sys.grid.dim << ",R=" << sys.grid.radius
      << ",lambda=" << sys.lambda << '\n';
  for (Eigen::Index i = 0; i < mat.rows(); ++i) {
    for (Eigen::Index j = 0; j < mat.cols(); ++j)
      out << (j ? "," : "") << mat(i, j);
    out << '\n';
  }
}

void export_matrix_binary(const std::string& path, const Eigen::MatrixXd& mat,
                          const DiscreteSystem& sys) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_invalid("cannot open " + path);
  const std::int32_t header[3] = {static_cast<std::int32_t>(mat.rows()),
                                  static_cast<std::int32_t>(mat.cols()),
                                  sys.grid.dim};
  const double params[2] = {sys.grid.radius, sys.lambda};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  out.write(reinterpret_cast<const char*>(params), sizeof(params));
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = mat;
  out.write(reinterpret_cast<const char*>(rm.data()),
            static_cast<std::streamsize>(sizeof(double) * rm.size()));
}

Eigen::MatrixXd import_matrix_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_invalid("cannot open " + path);
  std::int32_t header[3];
  double params[2];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  in.read(reinterpret_cast<char*>(params), sizeof(params));
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(
      header[0], header[1]);
  in.read(reinterpret_cast<char*>(rm.data()),
          static_cast<std::streamsize>(sizeof(double) * rm.size()));
  if (!in) throw_invalid("truncated matrix file " + path);
  return rm;
}

}  // namespace hardy_hinf
