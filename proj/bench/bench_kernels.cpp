// Serial against OpenMP versions of the batched kernels.
#include <cmath>
#include <map>
#include <random>

#include <benchmark/benchmark.h>

#include "hardy_hinf/hinf.hpp"
#include "hardy_hinf/operators.hpp"
#include "hardy_hinf/parallel_kernels.hpp"
#include "hardy_hinf/riccati.hpp"

namespace {

using namespace hardy_hinf;

DiscreteSystem reference_system(int cells) {
  ProblemConfig cfg;
  cfg.lambda = 0.125;
  cfg.a0 = 4.0;
  cfg.v_profile = RadialProfile::linear(0.1);
  return assemble_system(build_radial_grid(3, 1.0, cells), cfg);
}

const ClosedLoop& reference_loop(int cells) {
  static std::map<int, ClosedLoop> cache;
  auto it = cache.find(cells);
  if (it == cache.end()) {
    const DiscreteSystem sys = reference_system(cells);
    it = cache.emplace(cells, close_loop(sys, solve_gare_hamiltonian(sys, 2.0))).first;
  }
  return it->second;
}

std::vector<double> frequencies(int count) {
  std::vector<double> f(count);
  for (int k = 0; k < count; ++k) f[k] = std::pow(10.0, -2.0 + 6.0 * k / (count - 1));
  return f;
}

void BM_SigmaMaxSerial(benchmark::State& state) {
  const ClosedLoop& cl = reference_loop(static_cast<int>(state.range(0)));
  const auto f = frequencies(64);
  for (auto _ : state)
    benchmark::DoNotOptimize(serial::sigma_max_response(cl.A_cl, cl.B_cl, cl.C_cl, f));
}

void BM_SigmaMaxParallel(benchmark::State& state) {
  const ClosedLoop& cl = reference_loop(static_cast<int>(state.range(0)));
  const auto f = frequencies(64);
  for (auto _ : state)
    benchmark::DoNotOptimize(sigma_max_response(cl.A_cl, cl.B_cl, cl.C_cl, f));
}

Eigen::MatrixXd gaussian(int rows, int cols) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd Y(rows, cols);
  for (auto& v : Y.reshaped()) v = normal(rng);
  return Y;
}

void BM_RayleighSerial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd Q = reference_system(n).L;
  const Eigen::MatrixXd Y = gaussian(n, 1000);
  for (auto _ : state) benchmark::DoNotOptimize(serial::rayleigh_quotients(Q, Y));
}

void BM_RayleighParallel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd Q = reference_system(n).L;
  const Eigen::MatrixXd Y = gaussian(n, 1000);
  for (auto _ : state) benchmark::DoNotOptimize(rayleigh_quotients(Q, Y));
}

std::vector<std::complex<double>> probes(int count) {
  std::vector<std::complex<double>> s(count);
  for (int k = 0; k < count; ++k) s[k] = {5.0, std::pow(10.0, -2.0 + 5.0 * k / (count - 1))};
  return s;
}

void BM_ResolventSerial(benchmark::State& state) {
  const Eigen::MatrixXd A = reference_system(static_cast<int>(state.range(0))).A;
  const auto s = probes(32);
  for (auto _ : state) benchmark::DoNotOptimize(serial::resolvent_norms(A, s));
}

void BM_ResolventParallel(benchmark::State& state) {
  const Eigen::MatrixXd A = reference_system(static_cast<int>(state.range(0))).A;
  const auto s = probes(32);
  for (auto _ : state) benchmark::DoNotOptimize(resolvent_norms(A, s));
}

}  // namespace

BENCHMARK(BM_SigmaMaxSerial)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SigmaMaxParallel)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RayleighSerial)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RayleighParallel)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResolventSerial)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResolventParallel)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
