#include <benchmark/benchmark.h>

#include <omp.h>

#include "modclass/alrt.hpp"
#include "modclass/experiments.hpp"
#include "modclass/hlrt.hpp"
#include "modclass/likelihood.hpp"

using namespace modclass;

namespace {

std::vector<Complex> probe_points(std::size_t n) {
  Rng rng(1);
  auto r = draw_unit_noise(n, rng);
  for (auto& x : r) x *= 1.3;
  return r;
}

// Separable QAM kernel against the direct reference sum.
void BM_SampleLL_Fast(benchmark::State& state) {
  const auto s = qam_set(static_cast<int>(state.range(0)));
  const auto r = probe_points(256);
  const ChannelParams p{1.0, 0.3, 0.1};
  for (auto _ : state)
    for (auto x : r) benchmark::DoNotOptimize(sample_log_likelihood(x, s, p));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(r.size()));
}
BENCHMARK(BM_SampleLL_Fast)->Arg(16)->Arg(64)->Arg(256);

void BM_SampleLL_Reference(benchmark::State& state) {
  const auto s = qam_set(static_cast<int>(state.range(0)));
  const auto r = probe_points(256);
  const ChannelParams p{1.0, 0.3, 0.1};
  for (auto _ : state)
    for (auto x : r) benchmark::DoNotOptimize(reference::sample_log_likelihood(x, s, p));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(r.size()));
}
BENCHMARK(BM_SampleLL_Reference)->Arg(16)->Arg(64)->Arg(256);

ExperimentConfig sweep_config(Scenario sc) {
  ExperimentConfig c;
  c.scenario = sc;
  c.schemes = {"16PSK", "16QAM"};
  c.snr_db = {0.0};
  c.sweep.values = {sc == Scenario::NoncoherentHlrt ? 10 : 50};
  c.trials = sc == Scenario::NoncoherentHlrt ? 100 : 200;
  return c;
}

// Monte Carlo trial loop: serial reference path vs the OpenMP path.
void BM_PeSweep(benchmark::State& state) {
  const auto c = sweep_config(static_cast<Scenario>(state.range(0)));
  const Execution exec{state.range(1) != 0, 0};
  for (auto _ : state) benchmark::DoNotOptimize(run_pe_sweep(c, exec));
  state.SetLabel(std::string(scenario_name(c.scenario)) + (exec.parallel ? " openmp" : " serial") +
                 " threads=" + std::to_string(exec.parallel ? omp_get_max_threads() : 1));
}
BENCHMARK(BM_PeSweep)
    ->Args({static_cast<int>(Scenario::CoherentKnownSnr), 0})
    ->Args({static_cast<int>(Scenario::CoherentKnownSnr), 1})
    ->Args({static_cast<int>(Scenario::NoncoherentHlrt), 0})
    ->Args({static_cast<int>(Scenario::NoncoherentHlrt), 1})
    ->Unit(benchmark::kMillisecond);

void BM_MleEstimate(benchmark::State& state) {
  const auto s = qam_set(16);
  Rng rng(2);
  const auto ids = generate_symbols(s, static_cast<std::size_t>(state.range(0)), rng);
  const auto obs = observe(ids, s, {0.9, 0.4, 0.2}, rng);
  const auto cube = ParamCube::from_observation(obs);
  for (auto _ : state) benchmark::DoNotOptimize(mle_estimate(obs, s, cube));
}
BENCHMARK(BM_MleEstimate)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_AlrtExhaustive(benchmark::State& state) {
  const auto r = probe_points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(alrt_log_likelihood(r, psk_set(4), {1.0, 0.5}));
}
BENCHMARK(BM_AlrtExhaustive)->Arg(4)->Arg(8);

}  // namespace
BENCHMARK_MAIN();
