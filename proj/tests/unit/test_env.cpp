#include <cmath>
#include <numbers>

#include "brwre/env.hpp"
#include "brwre/errors.hpp"
#include "brwre/stats.hpp"
#include "doctest.h"

using namespace brwre;
using doctest::Approx;

namespace {

std::vector<PointProcessLaw> law_corpus() {
  return {
      PointProcessLaw::gaussian(2, 0.0, 1.0),
      PointProcessLaw::gaussian(3, -0.4, 0.7),
      PointProcessLaw::discrete({{0.5, {1.0, -1.0}}, {0.5, {0.0}}}),
      PointProcessLaw::discrete({{0.3, {0.5}}, {0.7, {1.0, -0.5, -1.5}}}),
      PointProcessLaw::discrete({{1.0, {2.0, 0.25}}}),
  };
}

}  // namespace

TEST_CASE("log-Laplace closed forms") {
  CHECK(log_laplace(PointProcessLaw::gaussian(2, 0, 1), 1.0) == Approx(std::log(2.0) + 0.5).epsilon(1e-14));
  CHECK(log_laplace(PointProcessLaw::gaussian(2, 0, 1), 1.0) == Approx(1.193147).epsilon(1e-6));
  CHECK(log_laplace(PointProcessLaw::discrete({{1.0, {0.0}}}), 0.7) == 0.0);
  const auto mix = PointProcessLaw::discrete({{0.5, {1.0, -1.0}}, {0.5, {0.0}}});
  CHECK(log_laplace(mix, 1.0) == Approx(std::log(std::cosh(1.0) + 0.5)).epsilon(1e-14));
  CHECK(log_laplace(mix, 1.0) == Approx(0.7144588).epsilon(1e-7));
}

TEST_CASE("log-Laplace derivatives") {
  const auto d = log_laplace_derivatives(PointProcessLaw::gaussian(2, 0, 1), 2.0);
  CHECK(d.d1 == Approx(2.0));
  CHECK(d.d2 == Approx(1.0));
  for (double theta : {0.3, 1.0, 4.0}) {
    const auto s = log_laplace_derivatives(PointProcessLaw::discrete({{1.0, {1.7}}}), theta);
    CHECK(s.d1 == Approx(1.7).epsilon(1e-14));
    CHECK(std::abs(s.d2) < 1e-14);
  }
}

TEST_CASE("derivatives agree with central differences; convexity") {
  const double h = 1e-5;
  for (const auto& law : law_corpus()) {
    for (double theta : {0.2, 0.5, 1.0, 1.5, 2.5}) {
      const auto d = log_laplace_derivatives(law, theta);
      const double fd1 = (log_laplace(law, theta + h) - log_laplace(law, theta - h)) / (2 * h);
      CHECK(d.d1 == Approx(fd1).epsilon(1e-6));
      CHECK(d.d2 >= 0.0);
      CHECK(d.value == Approx(log_laplace(law, theta)).epsilon(1e-14));
      CHECK(tilt_gap(law, theta) == Approx(theta * d.d1 - d.value).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("shifting every displacement by c shifts kappa by theta c and the tilted law by c") {
  const double c = 0.75;
  const auto base = PointProcessLaw::discrete({{0.3, {0.5}}, {0.7, {1.0, -0.5, -1.5}}});
  const auto moved = PointProcessLaw::discrete({{0.3, {0.5 + c}}, {0.7, {1.0 + c, -0.5 + c, -1.5 + c}}});
  for (double theta : {0.4, 1.3}) {
    CHECK(log_laplace(moved, theta) == Approx(log_laplace(base, theta) + theta * c).epsilon(1e-14));
    const auto a = tilted_step_law(base, theta).as_discrete();
    const auto b = tilted_step_law(moved, theta).as_discrete();
    REQUIRE(a.values.size() == b.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      CHECK(b.values[i] == Approx(a.values[i] + c).epsilon(1e-14));
      CHECK(b.probabilities[i] == Approx(a.probabilities[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("tilted step laws") {
  const double ts = std::sqrt(2.0 * std::log(2.0));
  const auto g = tilted_step_law(PointProcessLaw::gaussian(2, 0, 1), ts).as_gaussian();
  CHECK(g.mean == Approx(ts));
  CHECK(g.sd == Approx(1.0));

  const auto d = tilted_step_law(PointProcessLaw::discrete({{1.0, {1.0, -1.0}}}), 1.0).as_discrete();
  for (std::size_t i = 0; i < d.values.size(); ++i)
    if (d.values[i] == 1.0) CHECK(d.probabilities[i] == Approx(std::exp(1.0) / (std::exp(1.0) + std::exp(-1.0))));

  for (const auto& law : law_corpus()) {
    const double theta = 0.9;
    const auto step = tilted_step_law(law, theta);
    const auto k = log_laplace_derivatives(law, theta);
    auto rng = SeedTree(11).stream(StreamDomain::Walk);
    RunningStats s, sq;
    for (int i = 0; i < 1'000'000; ++i) {
      const double x = step.sample(rng);
      s.add(x);
      sq.add((x - k.d1) * (x - k.d1));
    }
    CHECK(std::abs(s.mean() - k.d1) < 4.0 * s.stderr_of_mean());
    CHECK(std::abs(sq.mean() - k.d2) < 4.0 * sq.stderr_of_mean() + 1e-12);
  }
}

TEST_CASE("law validation") {
  CHECK_THROWS_AS(PointProcessLaw::gaussian(0, 0, 1), ConfigError);
  CHECK_THROWS_AS(PointProcessLaw::gaussian(2, 0, 0), ConfigError);
  CHECK_THROWS_AS(PointProcessLaw::discrete({{0.5, {1.0}}, {0.4, {0.0}}}), ConfigError);
  CHECK_THROWS_AS(PointProcessLaw::discrete({{1.0, {}}}), ConfigError);
  CHECK_THROWS_AS(log_laplace(PointProcessLaw::gaussian(2, 0, 1), -1.0), ConfigError);
  CHECK_THROWS_AS(log_laplace(PointProcessLaw::gaussian(2, 0, 1), 1e200), NumericError);
  // Single child everywhere: not supercritical.
  CHECK_THROWS_AS(EnvironmentModel({{1.0, PointProcessLaw::discrete({{1.0, {0.0}}})}}), ConfigError);
  CHECK_THROWS_AS(EnvironmentModel({{0.5, PointProcessLaw::gaussian(2, 0, 1)}, {0.6, PointProcessLaw::gaussian(2, 0, 1)}}),
                  ConfigError);
}

TEST_CASE("sampling environments") {
  const auto one = sample_environment(models::dyadic_gaussian(), 5, 3);
  REQUIRE(one.size() == 5);
  for (std::size_t j = 0; j < 5; ++j) CHECK(one.palette_index(j) == 0);

  const auto model = models::canonical_random_variance();
  const std::size_t n = 1'000'000;
  const auto env = sample_environment(model, n, 99);
  double first = 0;
  for (std::size_t j = 0; j < n; ++j) first += env.palette_index(j) == 0 ? 1.0 : 0.0;
  CHECK(std::abs(first / n - 0.5) < 3.0 / std::sqrt(static_cast<double>(n)));

  const auto again = sample_environment(model, n, 99);
  CHECK(std::equal(env.indices().begin(), env.indices().end(), again.indices().begin()));
  const auto other = sample_environment(model, n, 100);
  CHECK_FALSE(std::equal(env.indices().begin(), env.indices().end(), other.indices().begin()));
}

TEST_CASE("attached tilt caches are consistent") {
  auto env = sample_environment(models::canonical_random_variance(), 200, 5);
  CHECK_FALSE(env.has_tilt());
  env.attach_tilt(1.1);
  REQUIRE(env.prefix().size() == 201);
  CHECK(env.K(0) == 0.0);
  for (std::size_t j = 1; j <= env.size(); ++j) CHECK(env.K(j) - env.K(j - 1) == Approx(env.kappa(j - 1)).epsilon(1e-12));
  for (std::size_t j = 0; j < env.size(); ++j) CHECK(env.kappa(j) == log_laplace(env.law(j), 1.1));

  const auto rev = env.reversed();
  for (std::size_t j = 0; j < env.size(); ++j) CHECK(rev.palette_index(j) == env.palette_index(env.size() - 1 - j));
  const auto seg = env.segment(10, 20);
  CHECK(seg.size() == 20);
  CHECK(seg.palette_index(0) == env.palette_index(10));
}
