#include <algorithm>
#include <cmath>
#include <random>

#include "brwre/analytics.hpp"
#include "brwre/brw.hpp"
#include "brwre/errors.hpp"
#include "brwre/stats.hpp"
#include "doctest.h"

using namespace brwre;
using doctest::Approx;

namespace {

const double kDyadicTheta = std::sqrt(2.0 * std::log(2.0));

EnvironmentSequence tilted(const EnvironmentModel& m, std::size_t n, std::uint64_t seed) {
  auto env = sample_environment(m, n, seed);
  env.attach_tilt(solve_theta_star(m));
  return env;
}

}  // namespace

TEST_CASE("a single child at the origin never moves") {
  auto env = EnvironmentSequence::from_laws(std::vector<PointProcessLaw>(8, PointProcessLaw::discrete({{1.0, {0.0}}})));
  env.attach_tilt(1.0);
  BrwOptions o;
  o.record_generations = true;
  const auto run = simulate_brw(env, 8, PruneConfig::none(), 3, o);
  CHECK(run.sample.M == 0.0);
  REQUIRE(run.generations.size() == 8);
  for (const auto& g : run.generations) CHECK(g.alive == 1);
}

TEST_CASE("unpruned dyadic maximum against an independent full tree") {
  const auto env = tilted(models::dyadic_gaussian(), 10, 1);
  RunningStats sim;
  for (std::uint64_t s = 0; s < 3000; ++s) sim.add(simulate_brw(env, 10, PruneConfig::none(), s).sample.M);

  std::mt19937_64 gen(5);
  std::normal_distribution<double> nd;
  RunningStats ref;
  std::vector<double> level, next;
  for (int r = 0; r < 3000; ++r) {
    level.assign(1, 0.0);
    for (int g = 0; g < 10; ++g) {
      next.clear();
      for (double v : level) {
        next.push_back(v + nd(gen));
        next.push_back(v + nd(gen));
      }
      level.swap(next);
    }
    ref.add(*std::max_element(level.begin(), level.end()));
  }
  CHECK(std::abs(sim.mean() - ref.mean()) < 4.0 * std::hypot(sim.stderr_of_mean(), ref.stderr_of_mean()));
  CHECK(std::sqrt(sim.variance()) == Approx(std::sqrt(ref.variance())).epsilon(0.1));
}

TEST_CASE("centering and bookkeeping") {
  const auto env = tilted(models::dyadic_gaussian(), 12, 2);
  const auto s = simulate_brw(env, 12, PruneConfig::none(), 4).sample;
  CHECK(s.n == 12);
  CHECK(s.K == Approx(12.0 * 2.0 * std::log(2.0)));
  CHECK(s.centered == Approx(s.M - s.K / kDyadicTheta));
}

TEST_CASE("pruning respects the cap and counts losses") {
  const auto env = tilted(models::dyadic_gaussian(), 16, 3);
  PruneConfig p;
  p.hard_cap = 1000;
  BrwOptions o;
  o.record_generations = true;
  const auto run = simulate_brw(env, 16, p, 1, o);
  for (const auto& g : run.generations) CHECK(g.alive <= 1000);
  CHECK(run.sample.losses.cap > 0);
  CHECK(run.sample.losses.upper == 0);
}

TEST_CASE("particle runs do not depend on the worker count") {
  const auto env = tilted(models::canonical_random_variance(), 16, 4);
  BrwOptions one, four;
  four.workers = 4;
  one.record_generations = four.record_generations = true;
  const auto a = simulate_brw(env, 16, PruneConfig::none(), 7, one);
  const auto b = simulate_brw(env, 16, PruneConfig::none(), 7, four);
  CHECK(a.sample.M == b.sample.M);
  REQUIRE(a.generations.size() == b.generations.size());
  for (std::size_t i = 0; i < a.generations.size(); ++i) CHECK(a.generations[i].max == b.generations[i].max);
}

TEST_CASE("resource guard and prune validation") {
  const auto env = tilted(models::dyadic_gaussian(), 20, 5);
  BrwOptions o;
  o.max_particles = 4096;
  CHECK_THROWS_AS(simulate_brw(env, 20, PruneConfig::none(), 1, o), ResourceError);
  PruneConfig p;
  p.lower_width = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = PruneConfig{};
  p.hard_cap = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  const auto d = PruneConfig::defaults(kDyadicTheta, 100);
  CHECK(d.upper_offset == Approx(12.0 / kDyadicTheta));
  CHECK(d.lower_width == Approx(8.0 * std::log(100.0) / kDyadicTheta));
  CHECK(d.hard_cap == (std::size_t{1} << 22));
}

TEST_CASE("doubling the lower trim width leaves the maximum alone") {
  const auto env = tilted(models::dyadic_gaussian(), 14, 6);
  PruneConfig narrow, wide;
  narrow.lower_width = 4.0;
  wide.lower_width = 8.0;
  RunningStats diff;
  for (std::uint64_t s = 0; s < 300; ++s)
    diff.add(simulate_brw(env, 14, narrow, s).sample.M - simulate_brw(env, 14, wide, s).sample.M);
  CHECK(std::abs(diff.mean()) < 0.05 + 4.0 * diff.stderr_of_mean());
}

TEST_CASE("trimmed growth") {
  const EnvironmentModel pair({{1.0, PointProcessLaw::discrete({{1.0, {1.0, -1.0}}})}});
  const auto two = trimmed_growth_rate(pair, 2, {4, 8, 12}, 20, 1);
  CHECK(two.rho_hat == Approx(2.0));
  CHECK(two.rho_theory == Approx(2.0));
  CHECK(two.extinct == 0);

  const auto dy = trimmed_growth_rate(models::dyadic_gaussian(), 3, {4, 8, 16, 24}, 50, 2);
  CHECK(dy.rho_hat > 1.0);
  CHECK(dy.rho_hat <= 2.0 + 1e-12);
  CHECK(dy.rho_theory == Approx(2.0 * normal_cdf(3.0)));
  CHECK(std::abs(dy.rho_hat - dy.rho_theory) < 4.0 * dy.stderr + 1e-3);

  CHECK_THROWS_AS(trimmed_growth_rate(models::dyadic_gaussian(), 1, {4, 8}, 10, 1), ConfigError);

  double prev = 0.0;
  for (int A : {2, 4, 8}) {
    const auto g = trimmed_growth_rate(models::canonical_random_variance(), A, {4, 8, 16}, 50, 3);
    CHECK(g.rho_theory >= prev);
    prev = g.rho_theory;
  }
}

TEST_CASE("barrier counts") {
  const auto env = tilted(models::dyadic_gaussian(), 10, 7);
  const auto all = count_barrier_particles(env, 10, 1e3, 1, {1000, 0, 1u << 20});
  CHECK(all.count == Approx(static_cast<double>(all.population)));
  CHECK_FALSE(all.roulette);
  CHECK_THROWS_AS(count_barrier_particles(env, 10, 0.0, 1), ConfigError);

  const auto e12 = tilted(models::dyadic_gaussian(), 12, 8);
  RunningStats c;
  double predicted = 0.0, predicted_se = 0.0;
  for (std::uint64_t s = 0; s < 400; ++s) {
    const auto r = count_barrier_particles(e12, 12, 1.0, s, {50000, 0, 1u << 20});
    c.add(r.count);
    predicted = r.predicted_mean;
    predicted_se = r.predicted_stderr;
  }
  CHECK(std::abs(c.mean() - predicted) < 4.0 * std::hypot(c.stderr_of_mean(), predicted_se));

  // Roulette keeps the count unbiased.
  RunningStats rr;
  for (std::uint64_t s = 0; s < 400; ++s) rr.add(count_barrier_particles(e12, 12, 1.0, s, {1000, 200, 1u << 20}).count);
  CHECK(std::abs(rr.mean() - c.mean()) < 4.0 * std::hypot(rr.stderr_of_mean(), c.stderr_of_mean()));
}

TEST_CASE("log-correction fit on the dyadic model") {
  LogCorrectionOptions o;
  const auto f = fit_log_correction(models::dyadic_gaussian(), {64, 128, 256, 512, 1024}, 1, PruneConfig::none(), 1, o);
  CHECK(f.slope < -1.0);
  CHECK(f.slope > -1.7);
  CHECK(f.median.size() == 5);
  for (std::size_t i = 1; i < f.median.size(); ++i) CHECK(f.median[i] < f.median[i - 1]);
}

TEST_CASE("quenched median trace and frontier rates") {
  const auto t = quenched_median_trace(models::canonical_random_variance(), 64, 6, 0, PruneConfig::none(), 1);
  CHECK(t.centered_median.size() == 6);
  CHECK(t.spread > 0.0);
  const auto rates = frontier_violation_rate(models::canonical_random_variance(), 64, {1.0, 2.0}, 8, 1);
  REQUIRE(rates.size() == 2);
  CHECK(rates[0].rate >= rates[1].rate);
  CHECK(rates[1].bound == Approx(std::exp(-2.0 * solve_theta_star(models::canonical_random_variance()))));
  CHECK(rates[0].pass);
}
