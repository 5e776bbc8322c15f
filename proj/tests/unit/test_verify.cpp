#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "brwre/errors.hpp"
#include "brwre/stats.hpp"
#include "brwre/verify.hpp"
#include "doctest.h"

using namespace brwre;
using doctest::Approx;

namespace {

PointProcessLaw pm_one() { return PointProcessLaw::discrete({{1.0, {1.0, -1.0}}}); }

EnumerableInstance make(std::vector<PointProcessLaw> laws, double theta, PathFunctional f) {
  auto env = EnvironmentSequence::from_laws(std::move(laws));
  env.attach_tilt(theta);
  return {"test", std::move(env), theta, std::move(f)};
}

}  // namespace

TEST_CASE("many-to-one on hand-enumerated instances") {
  const auto a = verify_many_to_one(make({pm_one()}, 1.0, PathFunctional::endpoint_in(0.0, 10.0)));
  CHECK(a.lhs == Approx(1.0).epsilon(1e-14));
  CHECK(a.rhs == Approx(1.0).epsilon(1e-14));
  CHECK(a.gap <= 1e-12);

  const auto two = PointProcessLaw::discrete({{0.3, {0.5}}, {0.7, {-0.25, 0.75, 1.5}}});
  const auto b = verify_many_to_one(make({pm_one(), two, pm_one()}, 0.8, PathFunctional::one()));
  CHECK(b.lhs == Approx(2.0 * (0.3 + 0.7 * 3.0) * 2.0).epsilon(1e-14));
  CHECK(b.gap <= 1e-12);

  const auto c = verify_many_to_one(make({pm_one(), two, pm_one()}, 1.2, PathFunctional::stay_below({0.9, 1.0, 1.4})));
  CHECK(c.gap <= 1e-12);
  CHECK(c.lhs > 0.0);
}

TEST_CASE("catalogue: size, spread of theta and exact agreement") {
  const auto cat = instance_catalogue();
  CHECK(cat.size() >= 50);
  bool half = false, one = false;
  double worst = 0.0;
  for (const auto& inst : cat) {
    half |= inst.theta == 0.5;
    one |= inst.theta == 1.0;
    CHECK(inst.n() <= 4);
    CHECK(realization_count(inst.env) <= kMaxRealizations);
    worst = std::max(worst, verify_many_to_one(inst).gap);
  }
  CHECK(half);
  CHECK(one);
  CHECK(worst <= 1e-12);
}

TEST_CASE("enumerability guards refuse large or Gaussian instances") {
  CHECK_THROWS_AS(realization_count(EnvironmentSequence::from_laws(std::vector<PointProcessLaw>(5, pm_one()))),
                  ConfigError);
  CHECK_THROWS_AS(realization_count(EnvironmentSequence::from_laws({PointProcessLaw::gaussian(2, 0.0, 1.0)})),
                  ConfigError);
  // 20 children per outcome and 50 outcomes: the number of trees explodes by n = 3.
  std::vector<MixtureOutcome> wide;
  for (int i = 0; i < 50; ++i) wide.push_back({1.0 / 50.0, std::vector<double>(20, 0.01 * i)});
  const auto big = PointProcessLaw::discrete(wide);
  CHECK_THROWS_AS(verify_many_to_one(make({big, big, big}, 1.0, PathFunctional::one())), ConfigError);
}

TEST_CASE("exact frontier probability") {
  const auto inst = make({pm_one(), pm_one(), pm_one()}, 1.0, PathFunctional::one());
  CHECK_THROWS_AS(environment_theta_star(inst.env), NoInteriorMinimizer);
  CHECK(exact_frontier_probability(inst, 100.0).probability == 0.0);

  const auto l2 = PointProcessLaw::discrete({{0.5, {1.0, -1.0}}, {0.5, {0.5, 0.0, -0.5}}});
  auto alt = make({pm_one(), l2, pm_one()}, 1.0, PathFunctional::one());
  alt.theta = environment_theta_star(alt.env);
  alt.env.attach_tilt(alt.theta);
  const auto f = exact_frontier_probability(alt, 0.5);
  CHECK(f.probability <= std::exp(-alt.theta * 0.5));
  CHECK(f.holds);
  double prev = 1.0;
  for (double y : {0.1, 0.25, 0.5, 1.0, 2.0}) {
    const double p = exact_frontier_probability(alt, y).probability;
    CHECK(p <= prev);
    prev = p;
  }
  for (const auto& c : instance_catalogue())
    if (c.f.kind == PathFunctional::Kind::One)
      for (double y : {0.5, 1.0, 2.0}) CHECK(exact_frontier_probability(c, y).holds);
}

TEST_CASE("expected maximum of standard normals") {
  using boost::math::quadrature::gauss_kronrod;
  for (int b : {1, 2, 3, 4, 5, 6, 9}) {
    const double phi_norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    auto integrand = [&](double x) {
      return x * b * std::pow(normal_cdf(x), b - 1) * phi_norm * std::exp(-0.5 * x * x);
    };
    const double oracle = gauss_kronrod<double, 61>::integrate(integrand, -12.0, 12.0, 10, 1e-14);
    CHECK(expected_max_std_normal(b) == Approx(oracle).epsilon(1e-10));
  }
  CHECK(expected_max_std_normal(2) == Approx(1.0 / std::sqrt(std::numbers::pi)));
}

TEST_CASE("expected minimum displacement") {
  const EnvironmentModel pm({{1.0, pm_one()}});
  CHECK(expected_min_displacement(pm) == -1.0);
  const EnvironmentModel g({{0.5, PointProcessLaw::gaussian(2, 1.0, 2.0)}, {0.5, PointProcessLaw::gaussian(3, 0.0, 1.0)}});
  CHECK(expected_min_displacement(g) ==
        Approx(0.5 * (1.0 - 2.0 * expected_max_std_normal(2)) + 0.5 * (-expected_max_std_normal(3))));
}

TEST_CASE("Dekking-Host checks") {
  DekkingHostOptions o;
  o.engine = MaxEngine::Particle;
  o.branching_replicates = 4;
  const auto det = dekking_host_check(EnvironmentModel({{1.0, pm_one()}}), {4, 8}, 3, 1, o);
  CHECK(det.C == -1.0);
  for (const auto& r : det.rows) {
    CHECK(r.lhs == 0.0);
    CHECK(r.rhs == Approx(2.0));
    CHECK(r.pass);
  }

  const auto dy = dekking_host_check(models::dyadic_gaussian(), {8, 16}, 40, 2);
  for (const auto& r : dy.rows) CHECK(r.pass);
  CHECK(dy.C == Approx(-expected_max_std_normal(2)));

  const EnvironmentModel lonely({{0.5, PointProcessLaw::discrete({{0.5, {0.0}}, {0.5, {1.0, -1.0}}})},
                                 {0.5, PointProcessLaw::gaussian(2, 0.0, 1.0)}});
  CHECK_THROWS_AS(dekking_host_check(lonely, {8}, 4, 1), ConfigError);
}

TEST_CASE("path functionals") {
  CHECK(PathFunctional::one()({1.0, 2.0}) == 1.0);
  CHECK(PathFunctional::stay_below({1.0, 1.0})({0.5, 1.5}) == 0.0);
  CHECK(PathFunctional::stay_below({1.0, 2.0})({0.5, 1.5}) == 1.0);
  CHECK(PathFunctional::endpoint_in(0.0, 1.0)({5.0, 0.5}) == 1.0);
  CHECK(PathFunctional::exp_endpoint(0.5)({0.0, 2.0}) == Approx(std::exp(1.0)));
  CHECK_FALSE(PathFunctional::exp_endpoint(0.5).describe().empty());
}
