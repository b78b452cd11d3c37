#include <benchmark/benchmark.h>

#include <random>

#include "edabm/corpusgen.hpp"
#include "edabm/ed_sim.hpp"
#include "edabm/eventlog.hpp"
#include "edabm/metrics.hpp"
#include "edabm/patient_pool.hpp"

namespace {

edabm::Corpus make_corpus(int n) {
  auto spec = edabm::default_corpus_spec();
  spec.n_stays = n;
  return edabm::generate_corpus(spec);
}

void BM_CleanCorpus(benchmark::State& state) {
  const auto corpus = make_corpus(static_cast<int>(state.range(0)));
  const auto raw = edabm::extract_trajectories(corpus.events);
  for (auto _ : state) {
    const auto stats = edabm::compute_transition_stats(raw);
    benchmark::DoNotOptimize(edabm::remove_waiting_times(raw, stats));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CleanCorpus)->Arg(2000)->Arg(20000);

void BM_SimulateWeek(benchmark::State& state) {
  auto corpus = make_corpus(2000);
  const auto raw = edabm::extract_trajectories(corpus.events);
  edabm::attach_trajectories(corpus.records,
                             edabm::remove_waiting_times(raw, edabm::compute_transition_stats(raw)));
  const auto pool = edabm::build_pool(std::move(corpus.records));

  edabm::EDEnvironmentParams params;
  params.hourly_arrival_rate.fill(8.0);
  params.bed_capacity = 64;
  params.clinician_capacity = static_cast<int>(state.range(0));
  params.imaging_capacity = 6;
  edabm::SimulationOptions opts;
  opts.horizon_minutes = 7 * edabm::kMinutesPerDay;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    opts.seed = ++seed;
    benchmark::DoNotOptimize(edabm::run_simulation(params, pool, opts));
  }
}
BENCHMARK(BM_SimulateWeek)->Arg(12)->Arg(9)->Unit(benchmark::kMillisecond);

void BM_Wasserstein(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::lognormal_distribution<double> d(1.6, 0.5);
  std::vector<double> a(static_cast<std::size_t>(state.range(0)));
  std::vector<double> b(a.size() / 2 + 1);
  for (auto& x : a) x = d(rng);
  for (auto& x : b) x = d(rng);
  for (auto _ : state) benchmark::DoNotOptimize(edabm::wasserstein_1d(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Wasserstein)->Range(64, 1 << 16)->Complexity(benchmark::oNLogN);

}  // namespace

BENCHMARK_MAIN();
