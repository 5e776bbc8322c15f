#include <cmath>
#include <numbers>

#include <boost/math/tools/roots.hpp>

#include "brwre/analytics.hpp"
#include "brwre/errors.hpp"
#include "doctest.h"

using namespace brwre;
using doctest::Approx;

namespace {

std::vector<EnvironmentModel> model_corpus() {
  return {models::dyadic_gaussian(), models::canonical_random_variance(), models::drift_only_random(),
          EnvironmentModel({{0.3, PointProcessLaw::gaussian(3, 0.2, 0.8)}, {0.7, PointProcessLaw::gaussian(2, -0.1, 1.3)}}),
          EnvironmentModel({{1.0, PointProcessLaw::discrete({{0.5, {1.0, -1.0}}, {0.5, {0.0}}})}})};
}

}  // namespace

TEST_CASE("annealed log-Laplace") {
  CHECK(annealed_log_laplace(models::dyadic_gaussian(), 1.0).kappa == Approx(std::log(2.0) + 0.5));
  CHECK(annealed_log_laplace(models::canonical_random_variance(), 1.0).kappa == Approx(std::log(2.0) + 0.5));
  const auto law = PointProcessLaw::gaussian(3, 0.2, 0.8);
  CHECK(annealed_log_laplace(EnvironmentModel({{1.0, law}}), 0.6).kappa == log_laplace(law, 0.6));
}

TEST_CASE("theta* closed forms and independent root") {
  const double exact = std::sqrt(2.0 * std::log(2.0));
  CHECK(std::abs(solve_theta_star(models::dyadic_gaussian()) - exact) < 1e-10);
  CHECK(std::abs(solve_theta_star(models::canonical_random_variance()) - exact) < 1e-10);

  // theta sinh(theta) / (cosh(theta) + 1/2) = log(cosh(theta) + 1/2), solved by TOMS 748.
  auto g = [](double t) { return t * std::sinh(t) / (std::cosh(t) + 0.5) - std::log(std::cosh(t) + 0.5); };
  boost::math::tools::eps_tolerance<double> tol(50);
  std::uintmax_t it = 200;
  const auto r = boost::math::tools::toms748_solve(g, 0.5, 3.0, tol, it);
  const double oracle = 0.5 * (r.first + r.second);
  const auto mix = PointProcessLaw::discrete({{0.5, {1.0, -1.0}}, {0.5, {0.0}}});
  CHECK(solve_theta_star(mix) == Approx(oracle).epsilon(1e-10));
  CHECK(oracle == Approx(1.326).epsilon(1e-3));

  CHECK_THROWS_AS(solve_theta_star(PointProcessLaw::discrete({{1.0, {1.0, -1.0}}})), NoInteriorMinimizer);
}

TEST_CASE("gap is nondecreasing and vanishes at theta*") {
  for (const auto& m : model_corpus()) {
    const double ts = solve_theta_star(m);
    CHECK(std::abs(annealed_tilt_gap(m, ts)) < 1e-10);
    double last = -INFINITY;
    for (int i = 1; i <= 100; ++i) {
      const double g = annealed_tilt_gap(m, 3.0 * ts * i / 100.0);
      CHECK(g >= last - 1e-12);
      last = g;
    }
  }
}

TEST_CASE("annealed summaries") {
  const double ts = std::sqrt(2.0 * std::log(2.0));
  const auto d = annealed_summary(models::dyadic_gaussian(), 0.5);
  CHECK(d.sigma_a2 == 0.0);
  CHECK(d.phi == Approx(1.5 / ts).epsilon(1e-12));
  CHECK(d.phi == Approx(1.27398).epsilon(1e-5));
  CHECK(d.speed == Approx(ts).epsilon(1e-10));

  const auto c = annealed_summary(models::canonical_random_variance(), 0.5);
  CHECK(c.sigma_q2 == Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(c.sigma_a2 == Approx(std::pow(2.0 * std::log(2.0), 2) / 16.0).epsilon(1e-12));
  CHECK(std::abs(c.beta() - 0.29435) < 1e-5);

  CHECK(annealed_summary(models::drift_only_random(), 0.5).sigma_a2 == 0.0);

  for (const auto& m : model_corpus()) {
    const auto s = annealed_summary(m, 0.3);
    CHECK(s.speed == Approx(annealed_log_laplace(m, s.theta_star).d1).epsilon(1e-10));
    CHECK(s.lambda == Approx(1.1));
    CHECK(s.phi == Approx(1.1 / s.theta_star));
  }
  CHECK_THROWS_AS(annealed_summary(models::dyadic_gaussian(), -0.1), ConfigError);
}

TEST_CASE("speed inequality") {
  const auto one = speed_inequality_report(models::dyadic_gaussian());
  CHECK(one.speed == Approx(one.mean_atom_speed));
  CHECK_FALSE(one.strict);

  const auto c = speed_inequality_report(models::canonical_random_variance());
  const double per = 0.5 * (std::sqrt(2 * 0.5 * std::log(2.0)) + std::sqrt(2 * 1.5 * std::log(2.0)));
  CHECK(c.mean_atom_speed == Approx(per).epsilon(1e-10));
  CHECK(c.strict);
  CHECK(c.speed > c.mean_atom_speed);

  CHECK_FALSE(speed_inequality_report(models::drift_only_random()).strict);

  for (const auto& m : model_corpus()) {
    const auto r = speed_inequality_report(m);
    CHECK(r.speed >= r.mean_atom_speed - 1e-10);
  }
}
