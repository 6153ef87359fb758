#include <benchmark/benchmark.h>

#include "ckin/carleman.hpp"
#include "ckin/experiments.hpp"
#include "ckin/integrators.hpp"
#include "ckin/kinetics.hpp"
#include "ckin/mech_parser.hpp"

namespace {

const ckin::Problem& h2_problem() {
  static const ckin::Problem problem = [] {
    ckin::MechanismProblem mp;
    mp.file = std::filesystem::path(CKIN_BENCH_DATA_DIR) / "mechanisms/h2_air_9sp.inp";
    mp.equivalence_ratio = 0.8;
    ckin::RunConfig cfg;
    cfg.problem = mp;
    return ckin::build_problem(cfg);
  }();
  return problem;
}

void BM_Kron(benchmark::State& state) {
  const auto& a1 = h2_problem().system.coeff(2);
  const auto eye = ckin::identity(9);
  for (auto _ : state) benchmark::DoNotOptimize(ckin::kron(a1, eye));
}
BENCHMARK(BM_Kron);

void BM_Assemble(benchmark::State& state) {
  const auto n_t = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ckin::assemble(h2_problem().system, n_t));
  state.counters["dim"] = static_cast<double>(ckin::carleman_dimension(9, n_t));
}
BENCHMARK(BM_Assemble)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_ImplicitStep(benchmark::State& state) {
  const auto n_t = static_cast<std::size_t>(state.range(0));
  const auto cs = ckin::assemble(h2_problem().system, n_t);
  const auto lifted = ckin::lift(h2_problem().initial_state, n_t);
  ckin::ImplicitFactorCache cache;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ckin::implicit_carleman_step(cs, lifted, 1e-8, &cache));
  }
}
BENCHMARK(BM_ImplicitStep)->DenseRange(1, 3)->Unit(benchmark::kMicrosecond);

void BM_ExplicitStep(benchmark::State& state) {
  const auto n_t = static_cast<std::size_t>(state.range(0));
  const auto cs = ckin::assemble(h2_problem().system, n_t);
  const auto lifted = ckin::lift(h2_problem().initial_state, n_t);
  for (auto _ : state) benchmark::DoNotOptimize(ckin::explicit_carleman_step(cs, lifted, 1e-8));
}
BENCHMARK(BM_ExplicitStep)->DenseRange(1, 3)->Unit(benchmark::kMicrosecond);

void BM_JacobianLinearizedStep(benchmark::State& state) {
  const auto& p = h2_problem();
  for (auto _ : state) {
    benchmark::DoNotOptimize(ckin::jacobian_linearized_step(p.system, p.initial_state, 1e-8));
  }
}
BENCHMARK(BM_JacobianLinearizedStep)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
