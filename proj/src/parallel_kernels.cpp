#include "hardy_hinf/parallel_kernels.hpp"

#include <cmath>
#include <limits>

namespace hardy_hinf {

using Eigen::MatrixXcd;

double sigma_max_at(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                    const Eigen::MatrixXd& C, double omega) {
  const Eigen::Index n = A.rows();
  MatrixXcd shifted = -A.cast<std::complex<double>>();
  shifted.diagonal().array() += std::complex<double>(0.0, omega);
  Eigen::PartialPivLU<MatrixXcd> lu(shifted);
  if (n > 0 && !(lu.matrixLU().diagonal().cwiseAbs().minCoeff() > 0.0))
    return std::numeric_limits<double>::quiet_NaN();
  const MatrixXcd X = lu.solve(B.cast<std::complex<double>>());
  const MatrixXcd G = C.cast<std::complex<double>>() * X;
  if (!G.allFinite()) return std::numeric_limits<double>::quiet_NaN();
  // sigma_max via the smaller Gram matrix.
  const MatrixXcd gram = G.rows() <= G.cols() ? MatrixXcd(G * G.adjoint())
                                              : MatrixXcd(G.adjoint() * G);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double resolvent_norm_at(const Eigen::MatrixXd& A, std::complex<double> s) {
  MatrixXcd shifted = -A.cast<std::complex<double>>();
  shifted.diagonal().array() += s;
  Eigen::JacobiSVD<MatrixXcd> svd(shifted);
  const double smin = svd.singularValues().minCoeff();
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return 1.0 / smin;
}

namespace {

// Plain loops in a fixed order so both versions round identically.
double column_quotient(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& Y,
                       Eigen::Index j) {
  double num = 0.0, den = 0.0;
  for (Eigen::Index r = 0; r < Q.rows(); ++r) {
    double qy = 0.0;
    for (Eigen::Index c = 0; c < Q.cols(); ++c) qy += Q(r, c) * Y(c, j);
    num += Y(r, j) * qy;
    den += Y(r, j) * Y(r, j);
  }
  return num / den;
}

}  // namespace

Eigen::VectorXd rayleigh_quotients(const Eigen::MatrixXd& Q,
                                   const Eigen::MatrixXd& Y) {
  Eigen::VectorXd out(Y.cols());
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < Y.cols(); ++j) out[j] = column_quotient(Q, Y, j);
  return out;
}

std::vector<double> sigma_max_response(const Eigen::MatrixXd& A,
                                       const Eigen::MatrixXd& B,
                                       const Eigen::MatrixXd& C,
                                       const std::vector<double>& freqs) {
  std::vector<double> out(freqs.size());
  const long count = static_cast<long>(freqs.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < count; ++k) out[k] = sigma_max_at(A, B, C, freqs[k]);
  return out;
}

std::vector<double> resolvent_norms(
    const Eigen::MatrixXd& A, const std::vector<std::complex<double>>& probes) {
  std::vector<double> out(probes.size());
  const long count = static_cast<long>(probes.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < count; ++k) out[k] = resolvent_norm_at(A, probes[k]);
  return out;
}

namespace serial {

Eigen::VectorXd rayleigh_quotients(const Eigen::MatrixXd& Q,
                                   const Eigen::MatrixXd& Y) {
  Eigen::VectorXd out(Y.cols());
  for (Eigen::Index j = 0; j < Y.cols(); ++j) out[j] = column_quotient(Q, Y, j);
  return out;
}

std::vector<double> sigma_max_response(const Eigen::MatrixXd& A,
                                       const Eigen::MatrixXd& B,
                                       const Eigen::MatrixXd& C,
                                       const std::vector<double>& freqs) {
  std::vector<double> out;
  out.reserve(freqs.size());
  for (double w : freqs) out.push_back(sigma_max_at(A, B, C, w));
  return out;
}

std::vector<double> resolvent_norms(
    const Eigen::MatrixXd& A, const std::vector<std::complex<double>>& probes) {
  std::vector<double> out;
  out.reserve(probes.size());
  for (auto s : probes) out.push_back(resolvent_norm_at(A, s));
  return out;
}

}  // namespace serial
}  // namespace hardy_hinf
