#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

// Data-parallel inner loops. Each kernel has an OpenMP version in
// hardy_hinf:: and a plain loop in hardy_hinf::serial:: that the tests use as
// the reference. Results are reduced in index order, so both versions are
// bitwise reproducible for a fixed input.

namespace hardy_hinf {

/// Rayleigh quotients y^T Q y / y^T y for every column of Y.
Eigen::VectorXd rayleigh_quotients(const Eigen::MatrixXd& Q,
                                   const Eigen::MatrixXd& Y);

/// sigma_max(C (i w I - A)^{-1} B) for every frequency. A NaN entry marks a
/// frequency where the resolvent solve failed.
std::vector<double> sigma_max_response(const Eigen::MatrixXd& A,
                                       const Eigen::MatrixXd& B,
                                       const Eigen::MatrixXd& C,
                                       const std::vector<double>& freqs);

/// ||(s I - A)^{-1}||_2 for every probe s (infinity if singular).
std::vector<double> resolvent_norms(const Eigen::MatrixXd& A,
                                    const std::vector<std::complex<double>>& probes);

namespace serial {

Eigen::VectorXd rayleigh_quotients(const Eigen::MatrixXd& Q,
                                   const Eigen::MatrixXd& Y);
std::vector<double> sigma_max_response(const Eigen::MatrixXd& A,
                                       const Eigen::MatrixXd& B,
                                       const Eigen::MatrixXd& C,
                                       const std::vector<double>& freqs);
std::vector<double> resolvent_norms(const Eigen::MatrixXd& A,
                                    const std::vector<std::complex<double>>& probes);

}  // namespace serial

/// Single-frequency evaluation shared by both versions.
double sigma_max_at(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                    const Eigen::MatrixXd& C, double omega);
double resolvent_norm_at(const Eigen::MatrixXd& A, std::complex<double> s);

}  // namespace hardy_hinf
