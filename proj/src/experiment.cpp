#include "hardy_hinf/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "hardy_hinf/errors.hpp"
#include "hardy_hinf/hardy.hpp"
#include "hardy_hinf/hinf.hpp"
#include "hardy_hinf/kernel.hpp"
#include "hardy_hinf/linalg.hpp"
#include "hardy_hinf/riccati.hpp"
#include "hardy_hinf/semigroup.hpp"

namespace hardy_hinf {

namespace pt = boost::property_tree;

namespace {

std::string num(double x) {
  std::ostringstream out;
  out << std::setprecision(10) << x;
  return out.str();
}

std::vector<double> parse_numbers(const std::string& text, const std::string& key) {
  std::vector<double> values;
  std::istringstream in(text);
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw_invalid("key '" + key + "': not a number: " + token);
    }
  }
  return values;
}

Annulus parse_annulus(const std::string& text, const std::string& key) {
  const auto v = parse_numbers(text, key);
  if (v.size() != 2) throw_invalid("key '" + key + "' expects two radii");
  return {v[0], v[1]};
}

template <typename T>
T get_value(const pt::ptree& tree, const std::string& key, T fallback) {
  const auto node = tree.get_optional<std::string>(key);
  if (!node) return fallback;
  try {
    return boost::lexical_cast<T>(boost::trim_copy(*node));
  } catch (const boost::bad_lexical_cast&) {
    throw_invalid("key '" + key + "': cannot parse '" + *node + "'");
  }
}

bool get_flag(const pt::ptree& tree, const std::string& key, bool fallback) {
  const auto node = tree.get_optional<std::string>(key);
  if (!node) return fallback;
  const std::string v = boost::to_lower_copy(boost::trim_copy(*node));
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw_invalid("key '" + key + "': expected true or false");
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

// State handed from one task to the next.
struct Pipeline {
  const Experiment& exp;
  RadialGrid grid;
  DiscreteSystem sys;
  std::optional<RiccatiSolution> solution;
  std::optional<ClosedLoop> loop;
  std::optional<HinfResult> norm;
  std::vector<std::pair<std::string, std::string>> files;
};

void add(TaskSummary& t, const std::string& key, double value) {
  t.values.emplace_back(key, num(value));
}
void add(TaskSummary& t, const std::string& key, const std::string& value) {
  t.values.emplace_back(key, value);
}
void check(TaskSummary& t, const std::string& name, bool passed) {
  t.checks.push_back({name, passed});
}

TaskSummary task_hardy(Pipeline& p) {
  TaskSummary t{"hardy", {}, {}, 0.0};
  const GridSpec& g = p.exp.grid;
  const HardyReport rep =
      rayleigh_hardy_min(build_radial_grid(g.dim, g.radius, p.exp.hardy_cells));
  add(t, "mu_min_finest", rep.lambda_min);
  add(t, "extrapolated", rep.extrapolated);
  add(t, "hardy_constant", rep.target);
  const double rel = std::abs(rep.extrapolated - rep.target) / rep.target;
  add(t, "relative_error", rel);
  check(t, "hardy_constant_recovery", rel <= 0.05);
  check(t, "discrete_hardy_inequality", rep.lambda_min > rep.target);
  std::string csv = hardy_report_csv(rep);

  if (p.exp.config.critical) {
    ImprovedHardyEstimate est = improved_hardy_constant(p.grid, p.exp.improved_p);
    est.C_embed = embedding_constant(p.grid, p.exp.improved_p);
    est.C0_est = critical_v_threshold(est);
    add(t, "improved_constant", est.C_est);
    add(t, "embedding_constant", est.C_embed);
    add(t, "smallness_threshold", est.C0_est);
    check(t, "improved_hardy_positive", est.C_est > 0.0);
    csv += improved_estimate_csv(est, g.dim, p.grid.n);
  }
  p.files.emplace_back("hardy.csv", csv);
  return t;
}

TaskSummary task_accretivity(Pipeline& p) {
  TaskSummary t{"accretivity", {}, {}, 0.0};
  const double omega = p.sys.omega0_const + 0.1;
  const double margin = accretivity_margin(p.sys, omega, 1000, p.exp.seed);
  add(t, "omega0", p.sys.omega0_const);
  add(t, "C_N", p.sys.C_N);
  add(t, "margin", margin);
  check(t, "accretivity_estimate", margin >= -1e-10);

  std::ostringstream csv;
  csv << "eps,excess\n";
  bool relative_ok = true;
  if (p.sys.C_N > 0.0) {
    for (double eps : {0.01, 0.1, 1.0}) {
      const double excess = relative_bound_excess(p.sys, eps, 200, p.exp.seed);
      csv << num(eps) << ',' << num(excess) << '\n';
      relative_ok = relative_ok && excess <= 1e-8;
    }
  }
  check(t, "convection_relative_bound", relative_ok);
  p.files.emplace_back("accretivity.csv", csv.str());
  return t;
}

TaskSummary task_synthesize(Pipeline& p) {
  TaskSummary t{"synthesize", {}, {}, 0.0};
  const double gamma = p.exp.config.gamma;
  RiccatiSolution ham = solve_gare_hamiltonian(p.sys, gamma);
  RiccatiSolution newton = solve_gare_newton(p.sys, gamma);
  const double agreement = (ham.P - newton.P).norm() / ham.P.norm();
  const double scale = spectral_norm(p.sys.A) * spectral_norm(ham.P) +
                       spectral_norm(p.sys.C1.transpose() * p.sys.C1);
  add(t, "gamma", gamma);
  add(t, "residual_hamiltonian", ham.residual / scale);
  add(t, "residual_newton", newton.residual / scale);
  add(t, "newton_iterations", newton.iterations);
  add(t, "method_agreement", agreement);
  add(t, "abscissa_LP", ham.abscissa_LP);
  add(t, "abscissa_LP1", ham.abscissa_LP1);
  add(t, "psd_min", ham.psd_min);
  check(t, "riccati_residual", ham.residual <= 1e-8 * scale &&
                                    newton.residual <= 1e-8 * scale);
  check(t, "riccati_methods_agree", agreement <= 1e-6);
  check(t, "closed_loop_generators_stable",
        ham.abscissa_LP < 0.0 && ham.abscissa_LP1 < 0.0);
  check(t, "riccati_solution_psd", ham.psd_min >= -1e-8 * spectral_norm(ham.P));

  std::ostringstream csv;
  csv << std::setprecision(12);
  for (int i = 0; i < ham.P.rows(); ++i) {
    for (int j = 0; j < ham.P.cols(); ++j) csv << (j ? "," : "") << ham.P(i, j);
    csv << '\n';
  }
  p.files.emplace_back("riccati_P.csv", csv.str());
  p.files.emplace_back("riccati.json", riccati_summary_json(ham) + "\n");
  p.solution = std::move(ham);
  return t;
}

TaskSummary task_hinf(Pipeline& p) {
  TaskSummary t{"hinf", {}, {}, 0.0};
  const double gamma = p.exp.config.gamma;
  const ClosedLoop cl = close_loop(p.sys, *p.solution);
  const HinfResult sweep = hinf_norm_sweep(cl, gamma);
  const HinfResult bis = hinf_norm_bisect(cl, 1e-8, gamma);
  const double agreement = std::abs(bis.norm - sweep.norm) / bis.norm;
  add(t, "norm", bis.norm);
  add(t, "sweep_norm", sweep.norm);
  add(t, "peak_frequency", bis.peak_freq);
  add(t, "method", to_string(bis.method));
  add(t, "margin", gamma - bis.norm);
  check(t, "closed_loop_attenuation_bound", bis.norm < gamma);
  check(t, "bisection_matches_sweep", agreement <= 1e-3);
  p.files.emplace_back("frequency_response.csv",
                       frequency_response_csv(cl, default_frequency_grid(cl)));
  p.loop = cl;
  p.norm = bis;
  return t;
}

Eigen::VectorXd random_unit(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = normal(rng);
  return y.normalized();
}

TaskSummary task_simulate(Pipeline& p) {
  TaskSummary t{"simulate", {}, {}, 0.0};
  const ClosedLoop& cl = *p.loop;
  const double abscissa = spectral_abscissa(cl.A_cl);
  const Horizon hz = default_horizon(abscissa);
  const Eigen::VectorXd y0 = random_unit(p.sys.n, p.exp.seed);
  const SimTrace free = step_closed_loop(p.sys, p.solution->feedback,
                                         zero_disturbance(p.sys.n), y0, hz.dt, hz.T);
  const double rate_error = std::abs(free.decay_alpha + abscissa) / std::abs(abscissa);
  add(t, "dt", hz.dt);
  add(t, "horizon", hz.T);
  add(t, "decay_alpha", free.decay_alpha);
  add(t, "abscissa", abscissa);
  check(t, "closed_loop_decay", free.decay_valid && free.decay_alpha > 0.0);
  check(t, "decay_matches_abscissa", rate_error <= 0.2);

  const auto library =
      disturbance_library(cl, p.norm->peak_freq, hz.dt, hz.T, p.exp.seed);
  const GainReport gain =
      empirical_gain(p.sys, p.solution->feedback, library, hz.dt, hz.T);
  double peak_gain = 0.0;
  std::ostringstream csv;
  csv << "signal,gain,ratio_to_norm\n";
  for (const auto& [name, value] : gain.per_signal) {
    csv << name << ',' << num(value) << ',' << num(value / p.norm->norm) << '\n';
    if (name == "sinusoid_peak") peak_gain = value;
  }
  add(t, "empirical_gain", gain.gain);
  add(t, "worst_signal", gain.worst_signal);
  add(t, "peak_sinusoid_ratio", peak_gain / p.norm->norm);
  check(t, "empirical_gain_below_norm", gain.gain <= 1.05 * p.norm->norm);
  check(t, "worst_case_sinusoid_realized", peak_gain >= 0.9 * p.norm->norm);
  p.files.emplace_back("simulate_trace.csv", sim_trace_csv(free));
  p.files.emplace_back("gain.csv", csv.str());
  return t;
}

TaskSummary task_detectability(Pipeline& p) {
  TaskSummary t{"detectability", {}, {}, 0.0};
  const double k = p.exp.detect_gain > 0.0 ? p.exp.detect_gain
                                           : p.sys.omega0_const + 1.0;
  const Eigen::VectorXd y0 = random_unit(p.sys.n, p.exp.seed + 1);
  const double T = 20.0 / (k - p.sys.omega0_const);
  const double dt = T / 10000.0;
  const DetectabilityResult det = detectability_experiment(p.sys, k, y0, dt, T);
  const double i2 = i2_integral_check(p.sys, k, 100, T, dt, p.exp.seed);
  add(t, "gain_k", k);
  add(t, "state_energy", det.integral);
  add(t, "bound", det.bound);
  add(t, "decay_alpha", det.trace.decay_alpha);
  add(t, "adjoint_input_integral", i2);
  check(t, "detectability_energy_bound", det.holds);
  check(t, "detectability_decay", det.trace.decay_valid && det.trace.decay_alpha > 0.0);
  check(t, "adjoint_input_integral_finite", std::isfinite(i2));
  p.files.emplace_back("detectability.csv", sim_trace_csv(det.trace));
  return t;
}

TaskSummary task_kernel(Pipeline& p) {
  TaskSummary t{"kernel", {}, {}, 0.0};
  const RiccatiSolution& sol = *p.solution;
  const KernelMatrix k = kernel_from_P(p.grid, sol.P);
  const double roundtrip = (P_from_kernel(k) - sol.P).norm() / sol.P.norm();

  double feedback_err = 0.0;
  std::mt19937_64 rng(p.exp.seed);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd y(p.sys.n);
    for (auto& v : y) v = normal(rng);
    const double by_kernel = feedback_from_kernel(k, p.sys.b_nodal, y);
    const double by_matrix = sol.feedback.dot(p.sys.to_symmetrized(y));
    feedback_err = std::max(feedback_err, std::abs(by_kernel - by_matrix) /
                                              std::max(std::abs(by_matrix), 1e-300));
  }
  const double weak = kernel_weak_residual(p.sys, k, p.exp.config.gamma);
  const KernelChecks kc = check_kernel(k);
  add(t, "roundtrip_error", roundtrip);
  add(t, "feedback_error", feedback_err);
  add(t, "weak_residual", weak);
  add(t, "symmetry", kc.symmetry);
  add(t, "boundary_ratio", kc.boundary);
  add(t, "min_entry_ratio", kc.min_entry);
  add(t, "nonnegative", kc.nonnegative ? "yes" : "no");
  check(t, "kernel_roundtrip", roundtrip <= 1e-12);
  check(t, "kernel_feedback_formula", feedback_err <= 1e-10);
  check(t, "kernel_weak_equation", weak <= 1e-6);
  check(t, "kernel_symmetry", kc.symmetric);
  check(t, "kernel_boundary_condition", kc.boundary <= p.grid.h);
  p.files.emplace_back("kernel.csv", kernel_csv(k));
  return t;
}

TaskSummary task_critical_sweep(Pipeline& p) {
  TaskSummary t{"critical-sweep", {}, {}, 0.0};
  if (!p.exp.config.critical)
    throw_invalid("critical-sweep needs critical = true");
  const double gamma = p.exp.config.gamma;
  std::ostringstream csv;
  csv << "eps,lambda_eps_bound,residual,norm,sweep_norm,cauchy_diff,resolvent_M,"
         "resolvent_tail_slope\n";
  Eigen::MatrixXd previous;
  std::vector<double> diffs;
  bool loops_ok = true;
  bool resolvent_ok = true;
  double worst_M = 0.0;
  double worst_slope = -std::numeric_limits<double>::infinity();
  for (double eps : p.exp.eps_list) {
    const DiscreteSystem sys =
        assemble_io(p.grid, p.exp.config, assemble_A_critical(p.grid, p.exp.config, eps));
    const RiccatiSolution sol = solve_gare_hamiltonian(sys, gamma);
    const ClosedLoop cl = close_loop(sys, sol);
    const HinfResult bis = hinf_norm_bisect(cl, 1e-8, gamma);
    const HinfResult sweep = hinf_norm_sweep(cl, gamma);
    loops_ok = loops_ok && bis.norm < gamma &&
               std::abs(bis.norm - sweep.norm) <= 1e-3 * bis.norm;
    double diff = std::numeric_limits<double>::quiet_NaN();
    if (previous.size()) {
      diff = (sol.P - previous).norm() / sol.P.norm();
      diffs.push_back(diff);
    }
    previous = sol.P;

    const double sigma0 = sys.omega0_const + sys.divv_max;
    const ResolventCheck rc = resolvent_bound_check(
        sys, sigma0, vertical_probe_lines(sigma0, {0.5, 1.0, 2.0}, 1e3, 40));
    worst_M = std::max(worst_M, rc.M_hat);
    worst_slope = std::max(worst_slope, rc.tail_slope);
    resolvent_ok = resolvent_ok && rc.M_hat <= 10.0 && rc.tail_slope <= 0.05;
    csv << num(eps) << ',' << num(sys.lambda_eps_bound) << ',' << num(sol.residual)
        << ',' << num(bis.norm) << ',' << num(sweep.norm) << ',' << num(diff) << ','
        << num(rc.M_hat) << ',' << num(rc.tail_slope) << '\n';
  }
  bool decreasing = diffs.size() >= 2;
  for (std::size_t i = 1; i < diffs.size(); ++i)
    decreasing = decreasing && diffs[i] < diffs[i - 1];
  add(t, "levels", static_cast<double>(p.exp.eps_list.size()));
  add(t, "last_cauchy_diff", diffs.empty() ? 0.0 : diffs.back());
  add(t, "resolvent_M_max", worst_M);
  add(t, "resolvent_tail_slope_max", worst_slope);
  check(t, "regularized_solutions_cauchy", decreasing);
  check(t, "regularized_loops_attenuate", loops_ok);
  check(t, "resolvent_sectorial_bound", resolvent_ok);
  p.files.emplace_back("critical_sweep.csv", csv.str());
  return t;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
      return 2;
    case ErrorKind::kGammaInfeasible:
    case ErrorKind::kNoFeasibleGamma:
      return 3;
    default:
      return 4;
  }
}

// Validation and the smallness gate of the critical case. Throws on a bad
// configuration.
void validate_experiment(const Experiment& exp, const RadialGrid& grid) {
  if (exp.tasks.empty()) throw_invalid("no tasks requested");
  const ProblemConfig cfg = validate_config(grid, exp.config);
  if (cfg.critical) {
    if (!(cfg.epsilon > 0.0)) throw_invalid("critical configuration needs epsilon > 0");
    ImprovedHardyEstimate est = improved_hardy_constant(grid, exp.improved_p);
    est.C_embed = embedding_constant(grid, exp.improved_p);
    const double threshold = critical_v_threshold(est);
    if (!passes_critical_gate(cfg.v_max, threshold))
      throw_invalid("critical case needs |v|_inf = " + num(cfg.v_max) +
                    " below the smallness threshold " + num(threshold));
  }
}

}  // namespace

const std::vector<std::string>& known_tasks() {
  static const std::vector<std::string> tasks{
      "hardy", "accretivity", "synthesize", "hinf",
      "simulate", "detectability", "kernel", "critical-sweep"};
  return tasks;
}

Experiment parse_experiment(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw_invalid(std::string("config: ") + e.what());
  }
  Experiment exp;
  exp.name = get_value<std::string>(tree, "experiment.name", exp.name);
  exp.seed = get_value<std::uint64_t>(tree, "experiment.seed", exp.seed);
  exp.output_dir = get_value<std::string>(tree, "experiment.output_dir", exp.output_dir);
  const std::string tasks = tree.get<std::string>("experiment.tasks", "");
  std::vector<std::string> requested;
  boost::split(requested, tasks, boost::is_any_of(", "), boost::token_compress_on);
  for (auto& task : requested) {
    boost::trim(task);
    if (task.empty()) continue;
    const auto& known = known_tasks();
    if (std::find(known.begin(), known.end(), task) == known.end())
      throw_invalid("unknown task '" + task + "'");
    if (std::find(exp.tasks.begin(), exp.tasks.end(), task) == exp.tasks.end())
      exp.tasks.push_back(task);
  }

  exp.grid.dim = get_value<int>(tree, "grid.dim", exp.grid.dim);
  exp.grid.radius = get_value<double>(tree, "grid.radius", exp.grid.radius);
  exp.grid.cells = get_value<int>(tree, "grid.cells", exp.grid.cells);
  exp.hardy_cells = get_value<int>(tree, "grid.hardy_cells", exp.hardy_cells);
  if (exp.grid.dim < 3) throw_invalid("grid.dim must be at least 3");

  ProblemConfig& cfg = exp.config;
  const double HN = hardy_constant(exp.grid.dim);
  if (tree.get_optional<std::string>("problem.lambda") &&
      tree.get_optional<std::string>("problem.lambda_ratio"))
    throw_invalid("give either problem.lambda or problem.lambda_ratio");
  cfg.lambda = get_value<double>(tree, "problem.lambda", cfg.lambda);
  if (auto ratio = tree.get_optional<std::string>("problem.lambda_ratio"))
    cfg.lambda = get_value<double>(tree, "problem.lambda_ratio", 0.0) * HN;
  cfg.a0 = get_value<double>(tree, "problem.a0", cfg.a0);
  cfg.gamma = get_value<double>(tree, "problem.gamma", cfg.gamma);
  if (auto s = tree.get_optional<std::string>("problem.omega0"))
    cfg.omega0_set = parse_annulus(*s, "problem.omega0");
  if (auto s = tree.get_optional<std::string>("problem.omegaC"))
    cfg.omegaC_set = parse_annulus(*s, "problem.omegaC");
  if (auto s = tree.get_optional<std::string>("problem.omega1"))
    cfg.omega1_set = parse_annulus(*s, "problem.omega1");
  if (auto s = tree.get_optional<std::string>("problem.b"))
    cfg.b_profile = RadialProfile::parse(boost::trim_copy(*s));
  if (auto s = tree.get_optional<std::string>("problem.v"))
    cfg.v_profile = RadialProfile::parse(boost::trim_copy(*s));
  cfg.v_max = get_value<double>(tree, "problem.v_max", cfg.v_max);
  cfg.divv_max = get_value<double>(tree, "problem.divv_max", cfg.divv_max);

  cfg.critical = get_flag(tree, "critical.enabled", cfg.critical);
  cfg.epsilon = get_value<double>(tree, "critical.epsilon", cfg.epsilon);
  exp.improved_p = get_value<double>(tree, "critical.p", exp.improved_p);
  if (auto s = tree.get_optional<std::string>("critical.eps_list")) {
    exp.eps_list = parse_numbers(*s, "critical.eps_list");
    for (double e : exp.eps_list)
      if (!(e > 0.0)) throw_invalid("critical.eps_list entries must be positive");
  }
  if (!(exp.improved_p > 1.0 && exp.improved_p < 2.0))
    throw_invalid("critical.p must lie in (1, 2)");
  if (cfg.critical) cfg.lambda = HN;
  exp.detect_gain = get_value<double>(tree, "detectability.k", exp.detect_gain);
  return exp;
}

Experiment load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_invalid("cannot open config file " + path);
  return parse_experiment(in);
}

bool RunResult::all_passed() const {
  for (const auto& t : tasks)
    for (const auto& c : t.checks)
      if (!c.passed) return false;
  return exit_code == 0;
}

std::string RunResult::summary_text() const {
  std::ostringstream out;
  for (const auto& t : tasks) {
    for (const auto& [key, value] : t.values)
      out << t.task << '.' << key << " = " << value << '\n';
    for (const auto& c : t.checks)
      out << "check." << t.task << '.' << c.name << " = "
          << (c.passed ? "PASS" : "FAIL") << '\n';
  }
  if (!error.empty()) out << "error = " << error << '\n';
  out << "exit_code = " << exit_code << '\n';
  return out.str();
}

RunResult run_experiment(const Experiment& exp, bool write_files) {
  RunResult result;
  std::optional<Pipeline> pipe;
  try {
    const RadialGrid grid =
        build_radial_grid(exp.grid.dim, exp.grid.radius, exp.grid.cells);
    validate_experiment(exp, grid);
    pipe.emplace(Pipeline{exp, grid, assemble_system(grid, exp.config), {}, {}, {}, {}});
  } catch (const HinfError& e) {
    // Anything that stops assembly is a configuration problem.
    result.exit_code = 2;
    result.error = e.what();
  }

  if (pipe) {
    const auto wants = [&](const std::string& task) {
      return std::find(exp.tasks.begin(), exp.tasks.end(), task) != exp.tasks.end();
    };
    const bool needs_solution =
        wants("hinf") || wants("simulate") || wants("kernel");
    using TaskFn = TaskSummary (*)(Pipeline&);
    const std::vector<std::pair<std::string, TaskFn>> order{
        {"hardy", task_hardy},           {"accretivity", task_accretivity},
        {"synthesize", task_synthesize}, {"hinf", task_hinf},
        {"simulate", task_simulate},     {"detectability", task_detectability},
        {"kernel", task_kernel},         {"critical-sweep", task_critical_sweep}};
    try {
      for (const auto& [name, fn] : order) {
        const bool implied = (name == "synthesize" && needs_solution) ||
                             (name == "hinf" && wants("simulate"));
        if (!wants(name) && !implied) continue;
        Timer timer;
        TaskSummary summary = fn(*pipe);
        summary.seconds = timer.seconds();
        result.tasks.push_back(std::move(summary));
      }
    } catch (const HinfError& e) {
      result.exit_code = exit_code_for(e.kind());
      result.error = e.what();
    } catch (const std::exception& e) {
      result.exit_code = 4;
      result.error = e.what();
    }
    if (result.exit_code == 0 && !result.all_passed()) result.exit_code = 4;
  }

  if (write_files) {
    namespace fs = std::filesystem;
    fs::create_directories(exp.output_dir);
    if (pipe)
      for (const auto& [file, content] : pipe->files)
        std::ofstream(fs::path(exp.output_dir) / file) << content;
    std::ofstream(fs::path(exp.output_dir) / "summary.txt")
        << "experiment = " << exp.name << '\n'
        << "seed = " << exp.seed << '\n'
        << result.summary_text();
  }
  return result;
}

double experiment_gamma_opt(const Experiment& exp, double tol) {
  const RadialGrid grid =
      build_radial_grid(exp.grid.dim, exp.grid.radius, exp.grid.cells);
  validate_experiment(exp, grid);
  const DiscreteSystem sys = assemble_system(grid, exp.config);
  double hi = exp.config.gamma;
  for (int i = 0; i < 40 && !gamma_feasible(sys, hi); ++i) hi *= 2.0;
  if (!gamma_feasible(sys, hi))
    throw HinfError(ErrorKind::kNoFeasibleGamma, "no feasible gamma up to " + num(hi));
  double lo = hi;
  for (int i = 0; i < 60 && gamma_feasible(sys, lo); ++i) lo *= 0.5;
  if (gamma_feasible(sys, lo))
    throw HinfError(ErrorKind::kSolverFailure, "no infeasible level found below " + num(hi));
  return gamma_opt(sys, lo, hi, tol * hi);
}

}  // namespace hardy_hinf
