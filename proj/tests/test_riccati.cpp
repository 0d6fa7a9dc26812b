#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "hardy_hinf/errors.hpp"
#include "hardy_hinf/hinf.hpp"
#include "hardy_hinf/riccati.hpp"
#include "test_support.hpp"

namespace hardy_hinf {
namespace {

using testing::scalar_system;

const double kScalarGamma2 = (-2.0 + std::sqrt(7.0)) / 1.5;
const double kScalarLqr = -1.0 + std::sqrt(2.0);
const double kInf = std::numeric_limits<double>::infinity();

// Entrywise evaluation of A^T P + P A - P R P + C^T C.
double residual_oracle(const DiscreteSystem& sys, const Eigen::MatrixXd& P, double gamma) {
  const int n = sys.n;
  const double g2 = std::isfinite(gamma) ? 1.0 / (gamma * gamma) : 0.0;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double v = 0.0;
      for (int k = 0; k < n; ++k) {
        v += sys.A(k, i) * P(k, j) + P(i, k) * sys.A(k, j);
        v += sys.C1(k, i) * sys.C1(k, j);
        for (int l = 0; l < n; ++l) {
          double r = 0.0;
          for (int c = 0; c < sys.B2.cols(); ++c) r += sys.B2(k, c) * sys.B2(l, c);
          for (int c = 0; c < sys.B1.cols(); ++c) r -= g2 * sys.B1(k, c) * sys.B1(l, c);
          v -= P(i, k) * r * P(l, j);
        }
      }
      sum += v * v;
    }
  }
  return std::sqrt(sum);
}

TEST(GareResidual, ZeroData) {
  DiscreteSystem sys = scalar_system(-1, 1, 1, 0);
  EXPECT_EQ(gare_residual(sys, Eigen::MatrixXd::Zero(1, 1), 2.0), 0.0);
}

TEST(GareResidual, ScalarClosedForm) {
  const DiscreteSystem sys = scalar_system(-1, 1, 1, 1);
  EXPECT_LE(gare_residual(sys, Eigen::MatrixXd::Constant(1, 1, kScalarGamma2), 2.0), 1e-12);
}

TEST(GareResidual, MatchesEntrywiseOracle) {
  const DiscreteSystem sys = testing::subcritical_system(12);
  for (int trial = 0; trial < 3; ++trial) {
    const Eigen::MatrixXd X = testing::gaussian(sys.n, sys.n, trial);
    const Eigen::MatrixXd P = X + X.transpose();
    const double oracle = residual_oracle(sys, P, 2.0);
    EXPECT_NEAR(gare_residual(sys, P, 2.0), oracle, 1e-12 * oracle);
  }
}

TEST(Hamiltonian, ScalarGamma2) {
  const RiccatiSolution sol = solve_gare_hamiltonian(scalar_system(-1, 1, 1, 1), 2.0);
  EXPECT_NEAR(sol.P(0, 0), kScalarGamma2, 1e-10);
  EXPECT_NEAR(sol.abscissa_LP, -1.0 - 0.75 * kScalarGamma2, 1e-10);
  EXPECT_NEAR(sol.abscissa_LP1, -1.0 - kScalarGamma2, 1e-10);
  EXPECT_NEAR(sol.feedback[0], -kScalarGamma2, 1e-10);
}

TEST(Hamiltonian, ScalarLqrLimit) {
  const RiccatiSolution sol = solve_gare_hamiltonian(scalar_system(-1, 1, 1, 1), kInf);
  EXPECT_NEAR(sol.P(0, 0), kScalarLqr, 1e-10);
}

TEST(Hamiltonian, NoObservationGivesZero) {
  const RiccatiSolution sol = solve_gare_hamiltonian(scalar_system(-1, 1, 1, 0), 2.0);
  EXPECT_NEAR(sol.P(0, 0), 0.0, 1e-14);
}

TEST(Hamiltonian, InfeasibleLevel) {
  EXPECT_THROW(
      {
        try {
          solve_gare_hamiltonian(scalar_system(-1, 1, 1, 1), 0.5);
        } catch (const HinfError& e) {
          EXPECT_EQ(e.kind(), ErrorKind::kGammaInfeasible);
          throw;
        }
      },
      HinfError);
}

TEST(Hamiltonian, CertificatesOnDiscreteSystem) {
  const DiscreteSystem sys = testing::subcritical_system();
  const RiccatiSolution sol = solve_gare_hamiltonian(sys, 2.0);
  EXPECT_LE((sol.P - sol.P.transpose()).norm(), 1e-8 * sol.P.norm());
  EXPECT_GE(sol.psd_min, -1e-8 * sol.P.norm());
  EXPECT_LT(sol.abscissa_LP, 0.0);
  EXPECT_LT(sol.abscissa_LP1, 0.0);
  EXPECT_EQ(sol.feedback, -(sys.B2.transpose() * sol.P));
}

TEST(Newton, ScalarFromZero) {
  const RiccatiSolution sol = solve_gare_newton(scalar_system(-1, 1, 1, 1), 2.0,
                                                Eigen::MatrixXd::Zero(1, 1));
  EXPECT_NEAR(sol.P(0, 0), kScalarGamma2, 1e-10);
  EXPECT_LE(sol.iterations, 10);
}

TEST(Newton, AgreesWithHamiltonianLargeGamma) {
  const DiscreteSystem sys = testing::subcritical_system();
  const RiccatiSolution h = solve_gare_hamiltonian(sys, 1e3);
  const RiccatiSolution n = solve_gare_newton(sys, 1e3);
  EXPECT_LE((h.P - n.P).norm(), 1e-6 * h.P.norm());
}

TEST(Newton, BracketsGammaOpt) {
  const DiscreteSystem sys = scalar_system(-1, 1, 1, 1);
  const double g_opt = 1.0 / std::sqrt(2.0);
  EXPECT_NO_THROW(solve_gare_newton(sys, g_opt * 1.01));
  EXPECT_THROW(
      {
        try {
          solve_gare_newton(sys, g_opt * 0.99);
        } catch (const HinfError& e) {
          EXPECT_EQ(e.kind(), ErrorKind::kGammaInfeasible);
          throw;
        }
      },
      HinfError);
}

TEST(GammaOpt, ScalarBoundaryMatchesClosedLoopNorm) {
  const DiscreteSystem sys = scalar_system(-1, 1, 1, 1);
  const double g = gamma_opt(sys, 0.1, 10.0, 1e-6);
  EXPECT_NEAR(g, 1.0 / std::sqrt(2.0), 1e-4);
  const ClosedLoop cl = close_loop(sys, solve_gare_hamiltonian(sys, g));
  EXPECT_NEAR(hinf_norm_sweep(cl).norm, g, 1e-4);
}

TEST(GammaOpt, LargeLevelFeasible) {
  EXPECT_TRUE(gamma_feasible(scalar_system(-1, 1, 1, 1), 1e6));
}

TEST(GammaOpt, HeavierObservationRaisesLevel) {
  const double base = gamma_opt(scalar_system(-1, 1, 1, 1), 0.1, 10.0, 1e-6);
  const double heavy = gamma_opt(scalar_system(-1, 1, 1, 2), 0.1, 10.0, 1e-6);
  EXPECT_GT(heavy, base);
}

TEST(GammaOpt, InfeasibleBracket) {
  EXPECT_THROW(
      {
        try {
          gamma_opt(scalar_system(-1, 1, 1, 1), 0.1, 0.5, 1e-6);
        } catch (const HinfError& e) {
          EXPECT_EQ(e.kind(), ErrorKind::kNoFeasibleGamma);
          throw;
        }
      },
      HinfError);
}

TEST(Riccati, MonotoneInGamma) {
  const DiscreteSystem sys = testing::subcritical_system(30);
  const Eigen::MatrixXd P1 = solve_gare_hamiltonian(sys, 0.5).P;
  const Eigen::MatrixXd P2 = solve_gare_hamiltonian(sys, 2.0).P;
  const Eigen::MatrixXd diff = P1 - P2;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (diff + diff.transpose()));
  EXPECT_GE(es.eigenvalues()[0], -1e-8 * P1.norm());
}

TEST(Riccati, SummaryRecord) {
  const std::string json = riccati_summary_json(
      solve_gare_hamiltonian(scalar_system(-1, 1, 1, 1), 2.0));
  EXPECT_NE(json.find("\"gamma\""), std::string::npos);
  EXPECT_NE(json.find("\"residual\""), std::string::npos);
}

}  // namespace
}  // namespace hardy_hinf
