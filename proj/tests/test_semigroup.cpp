#include <cmath>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "hardy_hinf/errors.hpp"
#include "hardy_hinf/hinf.hpp"
#include "hardy_hinf/linalg.hpp"
#include "hardy_hinf/riccati.hpp"
#include "hardy_hinf/semigroup.hpp"
#include "test_support.hpp"

namespace hardy_hinf {
namespace {

DiscreteSystem heat_system(int cells) {
  ProblemConfig cfg;
  return assemble_system(build_radial_grid(3, 1.0, cells), cfg);
}

double exact_norm(const Eigen::MatrixXd& A, const Eigen::VectorXd& y0, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  const Eigen::VectorXd c = es.eigenvectors().transpose() * y0;
  return (es.eigenvalues().array() * t).exp().cwiseProduct(c.array()).matrix().norm();
}

TEST(Stepping, HeatNormDecreases) {
  const DiscreteSystem sys = heat_system(30);
  const SimTrace tr = step_closed_loop(sys, std::nullopt, zero_disturbance(sys.n),
                                       testing::gaussian_vector(sys.n, 1), 1e-3, 0.5);
  for (std::size_t k = 1; k < tr.y_norms.size(); ++k)
    EXPECT_LE(tr.y_norms[k], tr.y_norms[k - 1] * (1 + 1e-12));
}

TEST(Stepping, ImplicitEulerFirstOrder) {
  const DiscreteSystem sys = heat_system(20);
  const Eigen::VectorXd y0 = testing::gaussian_vector(sys.n, 2);
  const double T = 0.05;
  const double exact = exact_norm(sys.A, y0, T);
  auto error = [&](double dt) {
    const SimTrace tr =
        step_closed_loop(sys, std::nullopt, zero_disturbance(sys.n), y0, dt, T);
    return std::abs(tr.y_norms.back() - exact);
  };
  const double ratio = error(1e-3) / error(5e-4);
  EXPECT_GT(ratio, 1.7);
  EXPECT_LT(ratio, 2.3);
}

TEST(Stepping, CrankNicolsonSecondOrder) {
  const DiscreteSystem sys = heat_system(20);
  const Eigen::VectorXd y0 = testing::gaussian_vector(sys.n, 2);
  const double T = 0.05;
  const double exact = exact_norm(sys.A, y0, T);
  auto error = [&](double dt) {
    const SimTrace tr = step_closed_loop(sys, std::nullopt, zero_disturbance(sys.n),
                                         y0, dt, T, Scheme::kCrankNicolson);
    return std::abs(tr.y_norms.back() - exact);
  };
  EXPECT_GT(error(1e-3) / error(5e-4), 3.0);
}

TEST(Stepping, FeedbackLoopDecays) {
  const DiscreteSystem sys = testing::subcritical_system(30);
  const RiccatiSolution sol = solve_gare_hamiltonian(sys, 2.0);
  const double abscissa = spectral_abscissa(close_loop(sys, sol).A_cl);
  const Horizon hz = default_horizon(abscissa, 4000);
  SimTrace tr = step_closed_loop(sys, sol.feedback, zero_disturbance(sys.n),
                                 testing::gaussian_vector(sys.n, 3), hz.dt, hz.T);
  ASSERT_TRUE(tr.decay_valid);
  EXPECT_GT(tr.decay_alpha, 0.0);
  EXPECT_LT(std::abs(tr.decay_alpha + abscissa) / std::abs(abscissa), 0.2);
}

TEST(Stepping, RejectsBadStep) {
  const DiscreteSystem sys = heat_system(10);
  EXPECT_THROW(step_closed_loop(sys, std::nullopt, zero_disturbance(sys.n),
                                Eigen::VectorXd::Ones(sys.n), 0.0, 1.0),
               HinfError);
}

TEST(Stepping, BlowUpReported) {
  const DiscreteSystem sys = testing::scalar_system(5.0, 1, 1, 1);
  try {
    step_closed_loop(sys, std::nullopt, zero_disturbance(1),
                     Eigen::VectorXd::Ones(1), 1e-3, 100.0, Scheme::kCrankNicolson);
    FAIL() << "expected blow-up";
  } catch (const HinfError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnstable);
  }
}

TEST(Disturbances, Shapes) {
  Eigen::VectorXcd dir(1);
  dir(0) = {1.0, 0.0};
  EXPECT_NEAR(sinusoid(dir, 2.0)(0.5)(0), std::cos(1.0), 1e-15);
  const Disturbance p = pulse(Eigen::VectorXd::Ones(2), 0.1);
  EXPECT_EQ(p(0.05)(1), 1.0);
  EXPECT_EQ(p(0.2)(1), 0.0);
  const Disturbance a = white_noise(3, 0.1, 1.0, 7);
  const Disturbance b = white_noise(3, 0.1, 1.0, 7);
  EXPECT_EQ(a(0.55), b(0.55));
  EXPECT_EQ(a(0.47), a(0.53));
  EXPECT_NE(a(0.47), a(0.57));
}

TEST(Gain, ScalarStaticGainApproachesOne) {
  const DiscreteSystem sys = testing::scalar_system(-1, 1, 1, 1);
  Eigen::VectorXcd dir(1);
  dir(0) = {1.0, 0.0};
  const GainReport g = empirical_gain(sys, Eigen::RowVectorXd::Zero(1),
                                      {{"constant", sinusoid(dir, 0.0)}}, 1e-2, 400.0);
  EXPECT_LE(g.gain, 1.0 + 1e-9);
  EXPECT_GT(g.gain, 0.99);
}

TEST(Gain, BelowClosedLoopNorm) {
  const DiscreteSystem sys = testing::subcritical_system(30);
  const RiccatiSolution sol = solve_gare_hamiltonian(sys, 2.0);
  const ClosedLoop cl = close_loop(sys, sol);
  const HinfResult norm = hinf_norm_bisect(cl);
  const Horizon hz = default_horizon(spectral_abscissa(cl.A_cl), 4000);
  const GainReport g = empirical_gain(
      sys, sol.feedback, disturbance_library(cl, norm.peak_freq, hz.dt, hz.T, 5),
      hz.dt, hz.T);
  EXPECT_EQ(g.per_signal.size(), 4u);
  EXPECT_LE(g.gain, 1.05 * norm.norm);
  EXPECT_GE(g.gain, 0.9 * norm.norm);
}

TEST(Detectability, BoundHolds) {
  const DiscreteSystem sys = testing::subcritical_system(30);
  const double k = sys.omega0_const + 1.0;
  const double T = 20.0 / (k - sys.omega0_const);
  const Eigen::VectorXd y0 = testing::gaussian_vector(sys.n, 4);
  const DetectabilityResult d = detectability_experiment(sys, k, y0, T / 4000, T);
  EXPECT_TRUE(d.holds);
  EXPECT_LE(d.integral, d.bound);
  EXPECT_NEAR(d.bound, 1.05 * y0.squaredNorm() / 2.0, 1e-12 * d.bound);
}

TEST(Detectability, LargerGainSmallerIntegral) {
  const DiscreteSystem sys = testing::subcritical_system(30);
  const Eigen::VectorXd y0 = testing::gaussian_vector(sys.n, 4);
  const double k1 = sys.omega0_const + 1.0;
  const double k4 = sys.omega0_const + 4.0;
  const double i1 = detectability_experiment(sys, k1, y0, 5e-3, 20.0).integral;
  const double i4 = detectability_experiment(sys, k4, y0, 5e-3, 20.0).integral;
  EXPECT_LE(i4, i1);
}

TEST(Detectability, ZeroInitialState) {
  const DiscreteSystem sys = testing::subcritical_system(20);
  const DetectabilityResult d = detectability_experiment(
      sys, sys.omega0_const + 1.0, Eigen::VectorXd::Zero(sys.n), 1e-2, 5.0);
  EXPECT_EQ(d.integral, 0.0);
  EXPECT_TRUE(d.holds);
}

TEST(Detectability, RejectsSmallGain) {
  const DiscreteSystem sys = testing::subcritical_system(20);
  EXPECT_THROW(detectability_experiment(sys, sys.omega0_const,
                                        Eigen::VectorXd::Ones(sys.n), 1e-2, 1.0),
               HinfError);
}

TEST(AdjointIntegral, VanishesWithoutActuator) {
  DiscreteSystem sys = testing::subcritical_system(20);
  sys.B2.setZero();
  EXPECT_EQ(i2_integral_check(sys, sys.omega0_const + 1.0, 10, 20.0, 1e-2), 0.0);
}

TEST(AdjointIntegral, LinearInActuator) {
  DiscreteSystem sys = testing::subcritical_system(20);
  const double k = sys.omega0_const + 1.0;
  const double base = i2_integral_check(sys, k, 10, 20.0, 1e-2);
  sys.B2 *= 3.0;
  EXPECT_NEAR(i2_integral_check(sys, k, 10, 20.0, 1e-2), 3.0 * base, 1e-10 * base);
}

TEST(AdjointIntegral, ConvergedInHorizon) {
  const DiscreteSystem sys = testing::subcritical_system(20);
  const double k = sys.omega0_const + 1.0;
  const double a = i2_integral_check(sys, k, 10, 20.0, 1e-2);
  const double b = i2_integral_check(sys, k, 10, 40.0, 1e-2);
  EXPECT_GT(a, 0.0);
  EXPECT_NEAR(a, b, 1e-6 * a);
}

TEST(Resolvent, SymmetricFormula) {
  DiscreteSystem sys;
  sys.n = 3;
  sys.A = Eigen::Vector3d(-1.0, -2.0, -5.0).asDiagonal();
  const std::vector<std::complex<double>> probes{{1.0, 0.0}, {2.0, 3.0}, {0.5, -10.0}};
  const ResolventCheck chk = resolvent_bound_check(sys, 0.0, probes);
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const double dist = std::abs(probes[k] + 1.0);
    EXPECT_NEAR(chk.products[k], std::abs(probes[k]) / dist, 1e-12);
  }
}

TEST(Resolvent, BoundedOnSubcriticalGenerator) {
  const DiscreteSystem sys = testing::subcritical_system(30);
  const double sigma0 = sys.omega0_const + sys.divv_max;
  const ResolventCheck chk = resolvent_bound_check(
      sys, sigma0, vertical_probe_lines(sigma0, {0.5, 1.0, 2.0}, 1e3, 40));
  EXPECT_LE(chk.M_hat, 10.0);
  EXPECT_LE(chk.tail_slope, 0.05);
  EXPECT_FALSE(chk.skipped);
}

TEST(Resolvent, ProbesRightOfShift) {
  const DiscreteSystem sys = testing::subcritical_system(10);
  EXPECT_THROW(resolvent_bound_check(sys, 1.0, {{0.5, 1.0}}), HinfError);
}

TEST(Resolvent, GateSkips) {
  const DiscreteSystem sys = testing::subcritical_system(10);
  const ResolventCheck chk = resolvent_bound_check_gated(sys, 0.0, {{1.0, 0.0}}, false);
  EXPECT_TRUE(chk.skipped);
  EXPECT_TRUE(chk.products.empty());
}

TEST(Trace, CsvHeader) {
  const DiscreteSystem sys = heat_system(10);
  const SimTrace tr = step_closed_loop(sys, std::nullopt, zero_disturbance(sys.n),
                                       Eigen::VectorXd::Ones(sys.n), 0.1, 0.5);
  const std::string csv = sim_trace_csv(tr);
  EXPECT_EQ(csv.rfind("t,y_norm,z_energy,w_energy\n", 0), 0u);
}

}  // namespace
}  // namespace hardy_hinf
