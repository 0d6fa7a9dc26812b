#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hardy_hinf {

/// Failure categories surfaced by the solvers and checks. The CLI maps these
/// onto exit codes.
enum class ErrorKind {
  kInvalidArgument,
  kGammaInfeasible,
  kSubspaceDegenerate,
  kNewtonDiverged,
  kNoFeasibleGamma,
  kClosedLoopUnstable,
  kUnstable,
  kDetectabilityViolated,
  kSolverFailure,
};

const char* to_string(ErrorKind kind);

class HinfError : public std::runtime_error {
 public:
  HinfError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Newton iteration gave up. Carries the last iterate for inspection.
class NewtonDivergedError : public HinfError {
 public:
  NewtonDivergedError(const std::string& what, Eigen::MatrixXd last_iterate,
                      int iterations)
      : HinfError(ErrorKind::kNewtonDiverged, what),
        last_iterate_(std::move(last_iterate)),
        iterations_(iterations) {}

  const Eigen::MatrixXd& last_iterate() const { return last_iterate_; }
  int iterations() const { return iterations_; }

 private:
  Eigen::MatrixXd last_iterate_;
  int iterations_;
};

/// Hamiltonian subspace basis X was numerically singular.
class SubspaceDegenerateError : public HinfError {
 public:
  SubspaceDegenerateError(const std::string& what, double condition_number)
      : HinfError(ErrorKind::kSubspaceDegenerate, what),
        condition_number_(condition_number) {}

  double condition_number() const { return condition_number_; }

 private:
  double condition_number_;
};

[[noreturn]] inline void throw_invalid(const std::string& what) {
  throw HinfError(ErrorKind::kInvalidArgument, what);
}

}  // namespace hardy_hinf
