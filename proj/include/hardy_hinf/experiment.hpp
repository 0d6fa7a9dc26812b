#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "hardy_hinf/operators.hpp"

namespace hardy_hinf {

struct GridSpec {
  int dim = 3;
  double radius = 1.0;
  int cells = 50;
};

/// One batch run: the physical problem, its grid, and the checks to execute.
struct Experiment {
  std::string name = "experiment";
  GridSpec grid;
  ProblemConfig config;
  std::vector<std::string> tasks;
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  /// Cells of the finest grid used by the Hardy-constant task.
  int hardy_cells = 1000;
  /// Exponent p < 2 of the improved Hardy inequality.
  double improved_p = 1.5;
  /// Regularization levels of the critical sweep.
  std::vector<double> eps_list{0.1, 0.05, 0.025, 0.0125};
  /// Output injection gain of the detectability task; negative means omega0 + 1.
  double detect_gain = -1.0;
};

/// Task names in execution order.
const std::vector<std::string>& known_tasks();

/// Parses an INI document. Throws HinfError(kInvalidArgument) on unknown
/// tasks, malformed values or missing sections.
Experiment parse_experiment(std::istream& in);
Experiment load_experiment(const std::string& path);

struct Check {
  std::string name;
  bool passed = false;
};

struct TaskSummary {
  std::string task;
  std::vector<std::pair<std::string, std::string>> values;
  std::vector<Check> checks;
  double seconds = 0.0;
};

struct RunResult {
  /// 0 all checks passed, 2 invalid config, 3 infeasible gamma, 4 a check or
  /// solver failed.
  int exit_code = 0;
  std::string error;
  std::vector<TaskSummary> tasks;

  bool all_passed() const;
  /// Flat `key = value` report, one check per `check.<task>.<name>` line.
  std::string summary_text() const;
};

/// Runs the tasks in dependency order. With `write_files` set, CSV artifacts
/// and summary.txt go to exp.output_dir.
RunResult run_experiment(const Experiment& exp, bool write_files = true);

/// Smallest feasible attenuation level for the experiment's system, searched
/// below cfg.gamma (raised geometrically when infeasible) to relative `tol`.
double experiment_gamma_opt(const Experiment& exp, double tol = 1e-4);

}  // namespace hardy_hinf
