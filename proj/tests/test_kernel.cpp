#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "hardy_hinf/errors.hpp"
#include "hardy_hinf/kernel.hpp"
#include "hardy_hinf/riccati.hpp"
#include "test_support.hpp"

namespace hardy_hinf {
namespace {

TEST(Kernel, IdentityOperatorIsDiagonalDelta) {
  const RadialGrid g = build_radial_grid(3, 1.0, 12);
  const KernelMatrix k = kernel_from_P(g, Eigen::MatrixXd::Identity(g.n, g.n));
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      EXPECT_NEAR(k.P0(i, j), i == j ? 1.0 / g.weights[i] : 0.0, 1e-12 / g.weights[i]);
  const Eigen::VectorXd phi = testing::gaussian_vector(g.n, 1);
  EXPECT_LE((apply_kernel(k, phi) - phi).norm(), 1e-12 * phi.norm());
}

TEST(Kernel, RoundTrip) {
  const RadialGrid g = build_radial_grid(3, 1.0, 20);
  Eigen::MatrixXd P = testing::gaussian(g.n, g.n, 2);
  P = P * P.transpose();
  EXPECT_LE((P_from_kernel(kernel_from_P(g, P)) - P).norm(), 1e-12 * P.norm());
}

TEST(Kernel, QuadratureMatchesSymmetrizedProduct) {
  const RadialGrid g = build_radial_grid(3, 1.0, 20);
  Eigen::MatrixXd P = testing::gaussian(g.n, g.n, 3);
  P = P + P.transpose().eval();
  const KernelMatrix k = kernel_from_P(g, P);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::VectorXd phi = testing::gaussian_vector(g.n, 10 + trial);
    const Eigen::VectorXd hat = g.weights.cwiseSqrt().cwiseProduct(phi);
    const Eigen::VectorXd expected = g.weights.cwiseSqrt().cwiseInverse().cwiseProduct(P * hat);
    EXPECT_LE((apply_kernel(k, phi) - expected).norm(), 1e-10 * expected.norm());
  }
}

TEST(Kernel, RejectsSizeMismatch) {
  const RadialGrid g = build_radial_grid(3, 1.0, 10);
  EXPECT_THROW(kernel_from_P(g, Eigen::MatrixXd::Identity(9, 9)), HinfError);
}

class RiccatiKernel : public ::testing::Test {
 protected:
  void SetUp() override {
    sys = testing::subcritical_system(40);
    sol = solve_gare_hamiltonian(sys, 2.0);
  }
  DiscreteSystem sys;
  RiccatiSolution sol;
};

TEST_F(RiccatiKernel, WeakEquationHolds) {
  const KernelMatrix k = kernel_from_P(sys.grid, sol.P);
  EXPECT_LE(kernel_weak_residual(sys, k, 2.0), 1e-6);
}

TEST_F(RiccatiKernel, PerturbedKernelFailsWeakEquation) {
  const KernelMatrix k = kernel_from_P(sys.grid, sol.P);
  const double clean = kernel_weak_residual(sys, k, 2.0);
  Eigen::MatrixXd noise = testing::gaussian(sys.n, sys.n, 4);
  noise = 0.5 * (noise + noise.transpose().eval());
  const Eigen::MatrixXd P = sol.P + 0.01 * sol.P.norm() / noise.norm() * noise;
  const double noisy = kernel_weak_residual(sys, kernel_from_P(sys.grid, P), 2.0);
  EXPECT_GE(noisy, 10.0 * std::max(clean, 1e-6));
}

TEST_F(RiccatiKernel, FeedbackMatchesMatrixForm) {
  const KernelMatrix k = kernel_from_P(sys.grid, sol.P);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd y = testing::gaussian_vector(sys.n, 100 + trial);
    const double by_matrix = sol.feedback.dot(sys.to_symmetrized(y));
    EXPECT_NEAR(feedback_from_kernel(k, sys.b_nodal, y), by_matrix,
                1e-10 * std::abs(by_matrix));
  }
  EXPECT_EQ(feedback_from_kernel(k, Eigen::VectorXd::Zero(sys.n),
                                 testing::gaussian_vector(sys.n, 1)),
            0.0);
}

TEST_F(RiccatiKernel, SymmetricPositiveAndVanishingAtBoundary) {
  const KernelChecks c = check_kernel(kernel_from_P(sys.grid, sol.P));
  EXPECT_TRUE(c.symmetric);
  EXPECT_LE(c.boundary, sys.grid.h);
}

TEST(Kernel, ZeroObservationGivesZeroKernel) {
  DiscreteSystem sys = testing::subcritical_system(20);
  sys.omegaC_mask.setZero();
  const KernelMatrix k = kernel_from_P(sys.grid, Eigen::MatrixXd::Zero(sys.n, sys.n));
  EXPECT_EQ(kernel_weak_residual(sys, k, 2.0), 0.0);
  EXPECT_TRUE(check_kernel(k).symmetric);
}

TEST(Kernel, BoundaryRowShrinksUnderRefinement) {
  double previous = 1.0;
  for (int cells : {20, 40, 80}) {
    const DiscreteSystem sys = testing::subcritical_system(cells);
    const KernelChecks c =
        check_kernel(kernel_from_P(sys.grid, solve_gare_hamiltonian(sys, 2.0).P));
    EXPECT_LT(c.boundary, previous);
    previous = c.boundary;
  }
}

TEST(Kernel, CsvLayout) {
  const RadialGrid g = build_radial_grid(3, 1.0, 4);
  const std::string csv =
      kernel_csv(kernel_from_P(g, Eigen::MatrixXd::Identity(4, 4)));
  EXPECT_EQ(csv.rfind("r,0.125,0.375,0.625,0.875\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

}  // namespace
}  // namespace hardy_hinf
