#include <algorithm>
#include <cmath>
#include <random>

#include "brwre/analytics.hpp"
#include "brwre/errors.hpp"
#include "brwre/quenched_law.hpp"
#include "brwre/stats.hpp"
#include "doctest.h"

using namespace brwre;
using doctest::Approx;

namespace {

EnvironmentSequence dyadic_env(std::size_t n) {
  auto env = sample_environment(models::dyadic_gaussian(), n, 1);
  env.attach_tilt(std::sqrt(2.0 * std::log(2.0)));
  return env;
}

TailFunction gaussian_tail(double mu, double sd, double h) {
  TailFunction t;
  t.lo = mu - 12.0 * sd;
  t.h = h;
  for (double x = t.lo; x <= mu + 12.0 * sd; x += h) t.values.push_back(normal_ccdf((x - mu) / sd));
  return t;
}

}  // namespace

TEST_CASE("tail function summaries of a Gaussian") {
  const auto t = gaussian_tail(1.5, 2.0, 0.01);
  CHECK(t.median() == Approx(1.5).epsilon(1e-3));
  CHECK(t.quantile(normal_cdf(1.0)) == Approx(3.5).epsilon(1e-3));
  CHECK(t.mean() == Approx(1.5).epsilon(1e-3));
  CHECK(t.mean_abs_deviation() == Approx(2.0 * std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-3));
}

TEST_CASE("grid and palette validation") {
  LawGrid g;
  g.h = 0.0;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g = LawGrid{};
  g.hi = g.lo;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  const std::vector<PointProcessLaw> discrete{PointProcessLaw::discrete({{1.0, {0.0, 1.0}}})};
  CHECK_THROWS_AS(TailRecursion(discrete, 1.0, LawGrid{}), ConfigError);
}

TEST_CASE("single generation is the max of two Gaussians") {
  const double theta = std::sqrt(2.0 * std::log(2.0));
  const auto law = quenched_max_law(dyadic_env(1), 1, LawGrid{});
  // M_1 - kappa/theta with M_1 the max of two standard normals.
  for (double x : {-1.0, 0.0, 0.6, 1.5}) {
    const double z = x + theta;
    const double exact = 1.0 - normal_cdf(z) * normal_cdf(z);
    const auto i = static_cast<std::size_t>(std::lround((x - law.lo) / law.h));
    CHECK(law.values[i] == Approx(exact).epsilon(2e-3));
  }
}

TEST_CASE("exact mean of M_10 against a full-tree simulation") {
  const double theta = std::sqrt(2.0 * std::log(2.0));
  const auto law = quenched_max_law(dyadic_env(10), 10, LawGrid{});
  const double exact_mean = law.mean() + 10.0 * theta;

  std::mt19937_64 gen(77);
  std::normal_distribution<double> nd;
  RunningStats m;
  std::vector<double> level, next;
  for (int r = 0; r < 10000; ++r) {
    level.assign(1, 0.0);
    for (int g = 0; g < 10; ++g) {
      next.clear();
      for (double v : level) {
        next.push_back(v + nd(gen));
        next.push_back(v + nd(gen));
      }
      level.swap(next);
    }
    m.add(*std::max_element(level.begin(), level.end()));
  }
  CHECK(std::abs(exact_mean - m.mean()) < 4.0 * m.stderr_of_mean() + 0.01);
}

TEST_CASE("medians are stable under grid refinement") {
  const auto env = dyadic_env(64);
  LawGrid coarse, fine;
  fine.h = 0.1;
  const double a = quenched_max_law(env, 64, coarse).median();
  const double b = quenched_max_law(env, 64, fine).median();
  CHECK(std::abs(a - b) < 0.05);
}

TEST_CASE("backward coupling reproduces the law of the reversed environment") {
  auto draws = sample_environment(models::canonical_random_variance(), 20, 5);
  draws.attach_tilt(solve_theta_star(models::canonical_random_variance()));
  const auto laws = coupled_max_laws(draws, {5, 20}, LawGrid{});
  REQUIRE(laws.size() == 2);
  const auto direct = quenched_max_law(draws.segment(0, 20).reversed(), 20, LawGrid{});
  CHECK(laws[1].median() == Approx(direct.median()).epsilon(1e-9));
  const auto direct5 = quenched_max_law(draws.segment(0, 5).reversed(), 5, LawGrid{});
  CHECK(laws[0].median() == Approx(direct5.median()).epsilon(1e-9));
}

TEST_CASE("frontier probability") {
  const double theta = std::sqrt(2.0 * std::log(2.0));
  const auto env1 = dyadic_env(1);
  for (double y : {0.25, 1.0, 2.0}) {
    const double z = theta + y;
    const double exact = 1.0 - normal_cdf(z) * normal_cdf(z);
    CHECK(frontier_violation_probability(env1, 1, y, LawGrid{}) == Approx(exact).epsilon(2e-3));
  }

  auto env = sample_environment(models::canonical_random_variance(), 128, 3);
  const double ts = solve_theta_star(models::canonical_random_variance());
  env.attach_tilt(ts);
  double prev = 1.0;
  for (double y : {0.5, 1.0, 2.0, 3.0}) {
    const double p = frontier_violation_probability(env, 128, y, LawGrid{});
    CHECK(p <= std::exp(-ts * y) + 1e-9);
    CHECK(p <= prev);
    CHECK(p >= 0.0);
    prev = p;
  }
}
