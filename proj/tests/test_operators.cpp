#include <cmath>
#include <cstdio>
#include <filesystem>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "hardy_hinf/errors.hpp"
#include "hardy_hinf/linalg.hpp"
#include "hardy_hinf/operators.hpp"
#include "test_support.hpp"

namespace hardy_hinf {
namespace {

using testing::gaussian_vector;

double min_eigenvalue(const Eigen::MatrixXd& S) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S, Eigen::EigenvaluesOnly)
      .eigenvalues()[0];
}

TEST(AssembleA, PureDiffusionIsSymmetricNegativeDefinite) {
  const DiscreteSystem sys = assemble_system(build_radial_grid(3, 1.0, 40), ProblemConfig{});
  EXPECT_LE((sys.A - sys.A.transpose()).norm(), 1e-14 * sys.A.norm());
  EXPECT_GT(min_eigenvalue(-sys.A), 0.0);
}

TEST(AssembleA, SubcriticalHardyBound) {
  const RadialGrid g = build_radial_grid(3, 1.0, 200);
  ProblemConfig cfg;
  cfg.lambda = 0.9 * hardy_constant(3);
  const DiscreteSystem sys = assemble_system(g, cfg);
  EXPECT_NEAR(sys.C_N, 0.1, 1e-14);
  // (-A y, y) >= C_N (L y, y) as a pencil statement.
  EXPECT_GE(min_eigenvalue(-symmetric_part(sys.A) - sys.C_N * sys.L), -1e-10);
}

TEST(AssembleA, SkewPartIsConvectionOnly) {
  const RadialGrid g = build_radial_grid(3, 1.0, 60);
  ProblemConfig cfg;
  cfg.v_profile = RadialProfile::linear(0.1);
  const DiscreteSystem sys = assemble_system(g, cfg);
  const Eigen::MatrixXd skew = 0.5 * (sys.A - sys.A.transpose());
  EXPECT_LE((skew - 0.5 * (sys.Bconv - sys.Bconv.transpose())).norm(), 1e-14 * sys.A.norm());
  EXPECT_GT(skew.norm(), 0.0);
  const double omega = sys.omega0_const + 0.1;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd y = gaussian_vector(g.n, trial);
    EXPECT_GE(accretivity_form(sys, omega, y), (omega - sys.omega0_const) - 1e-12);
  }
}

TEST(AssembleA, AdjointConsistency) {
  const DiscreteSystem sys = testing::subcritical_system();
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd u = gaussian_vector(sys.n, 2 * trial);
    const Eigen::VectorXd y = gaussian_vector(sys.n, 2 * trial + 1);
    EXPECT_NEAR((sys.A * y).dot(u), y.dot(sys.A.transpose() * u),
                1e-12 * sys.A.norm() * y.norm() * u.norm());
  }
}

TEST(AssembleA, SymmetrizedProductIsDiscreteL2) {
  const DiscreteSystem sys = testing::subcritical_system();
  const Eigen::VectorXd u = gaussian_vector(sys.n, 1);
  const Eigen::VectorXd v = gaussian_vector(sys.n, 2);
  EXPECT_NEAR(sys.to_symmetrized(u).dot(sys.to_symmetrized(v)),
              u.dot(sys.M.cwiseProduct(v)), 1e-13);
  EXPECT_LT((sys.to_nodal(sys.to_symmetrized(u)) - u).norm(), 1e-14 * u.norm());
}

TEST(AssembleA, RejectsLambdaAboveHardy) {
  ProblemConfig cfg;
  cfg.lambda = 1.1 * hardy_constant(3);
  EXPECT_THROW(assemble_A(build_radial_grid(3, 1.0, 30), cfg), HinfError);
}

TEST(AssembleA, CriticalNeedsRegularization) {
  ProblemConfig cfg;
  cfg.lambda = hardy_constant(3);
  EXPECT_THROW(assemble_A(build_radial_grid(3, 1.0, 30), cfg), HinfError);
}

TEST(AssembleA, RejectsTooFewCells) {
  EXPECT_THROW(assemble_A(build_radial_grid(3, 1.0, 4), ProblemConfig{}), HinfError);
}

TEST(AssembleACritical, LambdaEpsilonBound) {
  ProblemConfig cfg;
  cfg.lambda = 0.25;
  cfg.critical = true;
  const DiscreteSystem sys = assemble_A_critical(build_radial_grid(3, 1.0, 30), cfg, 0.01);
  EXPECT_NEAR(sys.lambda_eps_bound, 0.25 / 1.01, 1e-14);
  EXPECT_THROW(assemble_A_critical(build_radial_grid(3, 1.0, 30), cfg, 0.0), HinfError);
}

TEST(AssembleACritical, LargeEpsilonRemovesPotential) {
  const RadialGrid g = build_radial_grid(3, 1.0, 30);
  ProblemConfig cfg;
  cfg.lambda = 0.25;
  cfg.critical = true;
  const DiscreteSystem far = assemble_A_critical(g, cfg, 1e12);
  const DiscreteSystem plain = assemble_A(g, ProblemConfig{});
  EXPECT_LT((far.A - plain.A).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(AssembleACritical, EpsilonHalvingIsCauchy) {
  const RadialGrid g = build_radial_grid(3, 1.0, 40);
  ProblemConfig cfg;
  cfg.lambda = 0.25;
  cfg.critical = true;
  // Entries with r^2 below eps move by O(1/eps); compare beyond the
  // regularization core.
  const int first = g.n / 2;
  std::vector<Eigen::MatrixXd> mats;
  for (double eps : {0.1, 0.05, 0.025})
    mats.push_back(
        assemble_A_critical(g, cfg, eps).A.bottomRightCorner(g.n - first, g.n - first));
  const double d1 = (mats[1] - mats[0]).cwiseAbs().maxCoeff();
  const double d2 = (mats[2] - mats[1]).cwiseAbs().maxCoeff();
  EXPECT_LT(d2, d1);
}

TEST(AssembleIO, ComplementIsNormalizedAndOrthogonal) {
  const DiscreteSystem sys = testing::subcritical_system();
  EXPECT_NEAR((sys.D1.transpose() * sys.D1)(0, 0), 1.0, 1e-14);
  EXPECT_LT((sys.D1.transpose() * sys.C1).norm(), 1e-15);
  EXPECT_EQ(sys.B1 * sys.B1, sys.B1);
  EXPECT_EQ(sys.C1 * sys.C1, sys.C1);
}

TEST(AssembleIO, ActuatorIntegratesShellVolume) {
  const RadialGrid g = build_radial_grid(3, 1.0, 200);
  ProblemConfig cfg;
  cfg.b_profile = RadialProfile::shell(0.2, 0.4);
  const DiscreteSystem sys = assemble_system(g, cfg);
  const Eigen::VectorXd ones = sys.to_symmetrized(Eigen::VectorXd::Ones(g.n));
  const double integral = (sys.B2.transpose() * ones)(0, 0);
  EXPECT_NEAR(integral, shell_volume(3, {0.2, 0.4}), 0.01 * shell_volume(3, {0.2, 0.4}));
}

TEST(AssembleIO, RejectsFullObservationSet) {
  ProblemConfig cfg;
  cfg.omegaC_set = {0.0, 1.0};
  EXPECT_THROW(assemble_system(build_radial_grid(3, 1.0, 30), cfg), HinfError);
}

TEST(ValidateConfig, NestingRules) {
  const RadialGrid g = build_radial_grid(3, 1.0, 30);
  ProblemConfig cfg;
  cfg.omega0_set = {0.0, 0.95};
  EXPECT_THROW(validate_config(g, cfg), HinfError);
  cfg = ProblemConfig{};
  cfg.omega1_set = {0.0, 1.0};
  EXPECT_THROW(validate_config(g, cfg), HinfError);
  cfg = ProblemConfig{};
  cfg.v_profile = RadialProfile::linear(0.1);
  cfg.v_max = 0.05;
  EXPECT_THROW(validate_config(g, cfg), HinfError);
  cfg.v_max = -1.0;
  const ProblemConfig filled = validate_config(g, cfg);
  EXPECT_NEAR(filled.v_max, 0.1, 1e-12);
  EXPECT_NEAR(filled.divv_max, 0.3, 1e-12);
}

TEST(Omega0, Formula) {
  ProblemConfig cfg;
  EXPECT_DOUBLE_EQ(omega0(validate_config(build_radial_grid(3, 1.0, 20), cfg)), 0.0);
  cfg.a0 = 2.0;
  cfg.divv_max = 1.0;
  EXPECT_DOUBLE_EQ(omega0(cfg), 2.5);
  cfg = ProblemConfig{};
  cfg.a0 = 0.5;
  cfg.v_profile = RadialProfile::linear(0.2);
  EXPECT_NEAR(omega0(validate_config(build_radial_grid(3, 1.0, 20), cfg)), 0.8, 1e-12);
}

TEST(Accretivity, PureDiffusionMargin) {
  const DiscreteSystem sys = assemble_system(build_radial_grid(3, 1.0, 40), ProblemConfig{});
  EXPECT_GE(accretivity_margin(sys, 1.0, 200), -1e-12);
}

TEST(Accretivity, SampledEstimateAtFineGrid) {
  ProblemConfig cfg;
  cfg.lambda = 0.125;
  cfg.a0 = 1.0;
  cfg.v_profile = RadialProfile::linear(0.1);
  const DiscreteSystem sys = assemble_system(build_radial_grid(3, 1.0, 200), cfg);
  EXPECT_GE(accretivity_margin(sys, sys.omega0_const + 0.5, 1000), -1e-10);
}

TEST(Accretivity, HardyBoundAsPencil) {
  const DiscreteSystem sys = testing::subcritical_system(80);
  const Eigen::MatrixXd S = -sys.A0 - sys.C_N * sys.L +
                            sys.a0 * Eigen::MatrixXd::Identity(sys.n, sys.n);
  EXPECT_GE(min_eigenvalue(0.5 * (S + S.transpose())), -1e-9);
}

TEST(Accretivity, SharpnessWitness) {
  // Large reaction on a large ball: the slowest mode sits near a0, so
  // omega = omega0 - 1 loses the accretivity estimate.
  const RadialGrid g = build_radial_grid(3, 5.0, 60);
  ProblemConfig cfg;
  cfg.a0 = 10.0;
  cfg.omega0_set = {0.0, 4.0};
  cfg.omegaC_set = {0.0, 4.5};
  cfg.omega1_set = {0.0, 4.0};
  const DiscreteSystem sys = assemble_system(g, cfg);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.A);
  const Eigen::VectorXd top = es.eigenvectors().col(sys.n - 1);
  const double omega = sys.omega0_const - 1.0;
  EXPECT_LT(accretivity_form(sys, omega, top), 0.0);
}

TEST(RelativeBound, HoldsAcrossSweep) {
  const DiscreteSystem sys = testing::subcritical_system();
  for (double eps : {0.01, 0.1, 1.0, 10.0})
    EXPECT_LE(relative_bound_excess(sys, eps, 200), 1e-8) << "eps = " << eps;
}

TEST(Export, BinaryRoundTrip) {
  const DiscreteSystem sys = testing::subcritical_system(20);
  const auto path = std::filesystem::temp_directory_path() / "hardy_hinf_A.bin";
  export_matrix_binary(path.string(), sys.A, sys);
  const Eigen::MatrixXd back = import_matrix_binary(path.string());
  EXPECT_EQ(back, sys.A);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace hardy_hinf
