#include <benchmark/benchmark.h>

#include "brwre/analytics.hpp"
#include "brwre/brw.hpp"
#include "brwre/quenched_law.hpp"
#include "brwre/rng.hpp"
#include "brwre/rwre.hpp"

namespace {

using namespace brwre;

void BM_PhiloxUniform(benchmark::State& state) {
  RandomStream rng(1, 2);
  double sink = 0.0;
  for (auto _ : state) sink += rng.uniform();
  benchmark::DoNotOptimize(sink);
}
BENCHMARK(BM_PhiloxUniform);

void BM_PhiloxNormal(benchmark::State& state) {
  RandomStream rng(1, 2);
  double sink = 0.0;
  for (auto _ : state) sink += rng.normal();
  benchmark::DoNotOptimize(sink);
}
BENCHMARK(BM_PhiloxNormal);

void BM_ParticleBrw(benchmark::State& state) {
  const auto model = models::canonical_random_variance();
  const auto n = static_cast<std::size_t>(state.range(0));
  auto env = sample_environment(model, n, 1);
  env.attach_tilt(solve_theta_star(model));
  auto prune = PruneConfig::defaults(env.theta(), n);
  prune.hard_cap = std::size_t{1} << 16;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_brw(env, n, prune, ++seed).sample.M);
}
BENCHMARK(BM_ParticleBrw)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_TailRecursionStep(benchmark::State& state) {
  const auto model = models::canonical_random_variance();
  std::vector<PointProcessLaw> palette;
  for (const auto& a : model.atoms()) palette.push_back(a.law);
  TailRecursion rec(palette, solve_theta_star(model), LawGrid{});
  rec.reset();
  std::size_t k = 0;
  for (auto _ : state) {
    rec.push_front(k++ % palette.size());
    benchmark::DoNotOptimize(rec.tail().values.data());
  }
}
BENCHMARK(BM_TailRecursionStep)->Unit(benchmark::kMicrosecond);

void BM_ExcursionProbability(benchmark::State& state) {
  const auto model = models::canonical_random_variance();
  const auto n = static_cast<std::size_t>(state.range(0));
  auto env = sample_environment(model, n, 3);
  env.attach_tilt(solve_theta_star(model));
  const auto barrier = BarrierSpec::excursion_ceiling(2.0, 0.0);
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(excursion_probability(env, n, 2.0, 2.0, barrier, 10000, ++seed).estimate);
}
BENCHMARK(BM_ExcursionProbability)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
