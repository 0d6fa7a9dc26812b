#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hardy_hinf/errors.hpp"
#include "hardy_hinf/experiment.hpp"

namespace {

using hardy_hinf::Experiment;

int report(const hardy_hinf::RunResult& result, const Experiment& exp) {
  for (const auto& task : result.tasks)
    for (const auto& c : task.checks)
      std::cout << task.task << ' ' << c.name << ": " << (c.passed ? "PASS" : "FAIL")
                << '\n';
  if (!result.error.empty()) std::cerr << "error: " << result.error << '\n';
  std::cout << "summary written to " << exp.output_dir << "/summary.txt (exit "
            << result.exit_code << ")\n";
  return result.exit_code;
}

int exit_code_for(const hardy_hinf::HinfError& e) {
  switch (e.kind()) {
    case hardy_hinf::ErrorKind::kInvalidArgument:
      return 2;
    case hardy_hinf::ErrorKind::kGammaInfeasible:
    case hardy_hinf::ErrorKind::kNoFeasibleGamma:
      return 3;
    default:
      return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"H-infinity synthesis and verification for parabolic systems "
               "with an inverse-square potential"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::vector<double> eps_list;

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "INI experiment file")->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& s) { seed = s; seed_given = true; },
        "random seed");
  };
  CLI::App* run = app.add_subcommand("run", "run every task of an experiment");
  common(run);
  CLI::App* gopt = app.add_subcommand("gamma-opt", "smallest feasible attenuation level");
  common(gopt);
  double tol = 1e-4;
  gopt->add_option("--tol", tol, "relative bisection tolerance");
  CLI::App* sweep = app.add_subcommand("sweep-critical", "regularization sweep at lambda = H_N");
  common(sweep);
  sweep->add_option("--eps-list", eps_list, "regularization levels")->expected(1, -1);

  CLI11_PARSE(app, argc, argv);

  Experiment exp;
  try {
    exp = hardy_hinf::load_experiment(config_path);
  } catch (const hardy_hinf::HinfError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  if (!out_dir.empty()) exp.output_dir = out_dir;
  if (seed_given) exp.seed = seed;

  try {
    if (*run) return report(hardy_hinf::run_experiment(exp), exp);
    if (*gopt) {
      const double g = hardy_hinf::experiment_gamma_opt(exp, tol);
      std::cout << "gamma_opt = " << g << '\n';
      return 0;
    }
    if (!eps_list.empty()) exp.eps_list = eps_list;
    exp.tasks = {"critical-sweep"};
    return report(hardy_hinf::run_experiment(exp), exp);
  } catch (const hardy_hinf::HinfError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}
