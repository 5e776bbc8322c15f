#include "brwre/verify.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "brwre/analytics.hpp"
#include "brwre/errors.hpp"
#include "brwre/parallel.hpp"
#include "brwre/stats.hpp"

namespace brwre {

namespace {

constexpr std::size_t kMaxHorizon = 4;

const DiscreteMixture& discrete_law(const EnvironmentSequence& env, std::size_t j) {
  if (env.law(j).is_gaussian()) throw ConfigError("enumerable instances need discrete laws in every generation");
  return env.law(j).as_discrete();
}

std::vector<double> extend(const std::vector<double>& path, double d) {
  std::vector<double> p = path;
  p.push_back((path.empty() ? 0.0 : path.back()) + d);
  return p;
}

// Lists every tree realization: one outcome per particle, generation by generation.
class TreeSum {
 public:
  explicit TreeSum(const EnumerableInstance& in) : in_(in) {}

  double run() {
    generation(0, {{}}, 0.0);
    return total_.value();
  }

 private:
  using Paths = std::vector<std::vector<double>>;

  void generation(std::size_t j, const Paths& paths, double log_p) {
    if (j == in_.n()) {
      CompensatedSum leaves;
      for (const auto& p : paths) leaves.add(in_.f(p));
      total_.add(std::exp(log_p) * leaves.value());
      return;
    }
    choose(j, paths, 0, {}, log_p);
  }

  void choose(std::size_t j, const Paths& paths, std::size_t i, const Paths& next, double log_p) {
    if (i == paths.size()) {
      generation(j + 1, next, log_p);
      return;
    }
    for (const auto& o : discrete_law(in_.env, j).outcomes) {
      Paths grown = next;
      for (double d : o.displacements) grown.push_back(extend(paths[i], d));
      choose(j, paths, i + 1, grown, log_p + std::log(o.weight));
    }
  }

  const EnumerableInstance& in_;
  CompensatedSum total_;
};

// Tilted step law of one generation as (displacement, log mu(displacement)).
std::vector<std::pair<double, double>> tilted_atoms(const DiscreteMixture& law, double theta, double kappa) {
  std::map<double, double> mass;
  for (const auto& o : law.outcomes)
    for (double d : o.displacements) mass[d] += o.weight;
  std::vector<std::pair<double, double>> out;
  for (const auto& [d, m] : mass) out.emplace_back(d, std::log(m) + theta * d - kappa);
  return out;
}

}  // namespace

PathFunctional PathFunctional::stay_below(std::vector<double> barrier) {
  PathFunctional f;
  f.kind = Kind::StayBelow;
  f.barrier = std::move(barrier);
  return f;
}

PathFunctional PathFunctional::endpoint_in(double lo, double hi) {
  PathFunctional f;
  f.kind = Kind::EndpointIn;
  f.lo = lo;
  f.hi = hi;
  return f;
}

PathFunctional PathFunctional::exp_endpoint(double rate) {
  PathFunctional f;
  f.kind = Kind::ExpEndpoint;
  f.rate = rate;
  return f;
}

double PathFunctional::operator()(const std::vector<double>& path) const {
  const double end = path.empty() ? 0.0 : path.back();
  switch (kind) {
    case Kind::One:
      return 1.0;
    case Kind::StayBelow:
      for (std::size_t j = 0; j < path.size(); ++j)
        if (path[j] > barrier.at(j)) return 0.0;
      return 1.0;
    case Kind::EndpointIn:
      return lo <= end && end <= hi ? 1.0 : 0.0;
    case Kind::ExpEndpoint:
      return std::exp(rate * end);
  }
  return 0.0;
}

std::string PathFunctional::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::One:
      os << "one";
      break;
    case Kind::StayBelow:
      os << "stay_below[";
      for (std::size_t j = 0; j < barrier.size(); ++j) os << (j ? "," : "") << barrier[j];
      os << "]";
      break;
    case Kind::EndpointIn:
      os << "endpoint_in[" << lo << "," << hi << "]";
      break;
    case Kind::ExpEndpoint:
      os << "exp(" << rate << "*V_n)";
      break;
  }
  return os.str();
}

double realization_count(const EnvironmentSequence& env) {
  if (env.size() < 1 || env.size() > kMaxHorizon) throw ConfigError("enumerable instances need 1 <= n <= 4");
  double c = 1.0;
  for (std::size_t j = env.size(); j-- > 0;) {
    double next = 0.0;
    for (const auto& o : discrete_law(env, j).outcomes) next += std::pow(c, static_cast<double>(o.displacements.size()));
    c = next;
  }
  if (!(c <= kMaxRealizations)) {
    std::ostringstream os;
    os << "instance has " << c << " tree realizations (limit " << kMaxRealizations << "); refusing to enumerate";
    throw ConfigError(os.str());
  }
  return c;
}

ManyToOneCheck verify_many_to_one(const EnumerableInstance& in) {
  realization_count(in.env);
  if (!(in.theta > 0.0)) throw ConfigError("many-to-one check needs theta > 0");
  if (in.f.kind == PathFunctional::Kind::StayBelow && in.f.barrier.size() < in.n())
    throw ConfigError("barrier functional shorter than the horizon");
  ManyToOneCheck out;
  out.lhs = TreeSum(in).run();

  std::vector<std::vector<std::pair<double, double>>> steps;
  double K = 0.0;
  for (std::size_t j = 0; j < in.n(); ++j) {
    const double kappa = log_laplace(in.env.law(j), in.theta);
    K += kappa;
    steps.push_back(tilted_atoms(discrete_law(in.env, j), in.theta, kappa));
  }
  CompensatedSum rhs;
  std::vector<double> path;
  auto walk = [&](auto&& self, std::size_t j, double log_mu) -> void {
    if (j == in.n()) {
      const double s = path.empty() ? 0.0 : path.back();
      rhs.add(std::exp(log_mu - in.theta * s + K) * in.f(path));
      return;
    }
    for (const auto& [d, lm] : steps[j]) {
      path.push_back((path.empty() ? 0.0 : path.back()) + d);
      self(self, j + 1, log_mu + lm);
      path.pop_back();
    }
  };
  walk(walk, 0, 0.0);
  out.rhs = rhs.value();
  out.gap = std::abs(out.lhs - out.rhs);
  return out;
}

double environment_theta_star(const EnvironmentSequence& env) {
  std::vector<ModelAtom> atoms;
  for (std::size_t j = 0; j < env.size(); ++j) atoms.push_back({1.0 / static_cast<double>(env.size()), env.law(j)});
  return solve_theta_star(EnvironmentModel(std::move(atoms)));
}

std::vector<EnumerableInstance> instance_catalogue() {
  using O = MixtureOutcome;
  const auto L1 = PointProcessLaw::discrete({O{1.0, {1.0, -1.0}}});
  const auto L2 = PointProcessLaw::discrete({O{0.5, {1.0, 0.0}}, O{0.5, {2.0, -1.0, 0.0}}});
  const auto L3 = PointProcessLaw::discrete({O{0.3, {0.5}}, O{0.7, {1.0, -0.5, -1.5}}});
  const auto L4 = PointProcessLaw::discrete({O{0.6, {1.0, 1.0}}, O{0.4, {-1.0, 0.5, 2.0}}});
  const auto L5 = PointProcessLaw::discrete({O{0.5, {1.0, -1.0}}, O{0.5, {0.0, 0.0, -1.0}}});
  const std::vector<std::pair<std::string, std::vector<PointProcessLaw>>> envs{
      {"L2", {L2}},
      {"L1x4", {L1, L1, L1, L1}},
      {"L1L1L2L3", {L1, L1, L2, L3}},
      {"L2L3L2", {L2, L3, L2}},
      {"L3L2L3", {L3, L2, L3}},
      {"L4L4", {L4, L4}},
      {"L4L3L1", {L4, L3, L1}},
      {"L5x3", {L5, L5, L5}},
  };
  std::vector<EnumerableInstance> out;
  for (const auto& [name, laws] : envs) {
    const auto env = EnvironmentSequence::from_laws(laws);
    std::vector<std::pair<std::string, double>> thetas{{"0.5", 0.5}, {"1", 1.0}};
    try {
      thetas.emplace_back("theta*", environment_theta_star(env));
    } catch (const NoInteriorMinimizer&) {
      // M_n is deterministic here and the tilt has no root; use a third generic value.
      thetas.emplace_back("1.5", 1.5);
    }
    std::vector<double> barrier;
    for (std::size_t j = 1; j <= env.size(); ++j) barrier.push_back(0.55 * static_cast<double>(j) + 0.2);
    const std::vector<PathFunctional> fs{PathFunctional::one(), PathFunctional::stay_below(barrier),
                                         PathFunctional::endpoint_in(-0.25, 1.25), PathFunctional::exp_endpoint(0.7)};
    for (const auto& [tname, theta] : thetas)
      for (const auto& f : fs) out.push_back({name + "/theta=" + tname + "/" + f.describe(), env, theta, f});
  }
  return out;
}

FrontierCheck exact_frontier_probability(const EnumerableInstance& in, double y) {
  realization_count(in.env);
  if (!(y > 0.0)) throw ConfigError("frontier check needs y > 0");
  const double theta = in.theta;
  std::vector<double> line{y};
  double K = 0.0;
  for (std::size_t j = 0; j < in.n(); ++j) {
    K += log_laplace(in.env.law(j), theta);
    line.push_back(K / theta + y);
  }
  // Probability that no descendant of a generation-j particle at x crosses.
  auto clear = [&](auto&& self, std::size_t j, double x) -> double {
    if (j == in.n()) return 1.0;
    CompensatedSum s;
    for (const auto& o : discrete_law(in.env, j).outcomes) {
      double p = o.weight;
      for (double d : o.displacements) {
        if (x + d > line[j + 1]) {
          p = 0.0;
          break;
        }
        p *= self(self, j + 1, x + d);
      }
      s.add(p);
    }
    return s.value();
  };
  FrontierCheck out;
  out.probability = std::max(0.0, 1.0 - clear(clear, 0, 0.0));
  out.bound = std::exp(-theta * y);
  out.holds = out.probability <= out.bound;
  return out;
}

double expected_max_std_normal(int b) {
  if (b < 1) throw ConfigError("expected maximum needs b >= 1");
  const double rpi = std::numbers::inv_sqrtpi;
  const double a = std::asin(1.0 / 3.0) / std::numbers::pi;
  switch (b) {
    case 1:
      return 0.0;
    case 2:
      return rpi;
    case 3:
      return 1.5 * rpi;
    case 4:
      return 3.0 * rpi * (0.5 + a);
    case 5:
      return 2.5 * rpi * (0.5 + 3.0 * a);
    default:
      break;
  }
  const double bb = b;
  auto density = [bb](double x) { return x * bb * std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi) *
                                         std::pow(normal_cdf(x), bb - 1.0); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(density, -12.0, 12.0, 15, 1e-14);
}

double expected_min_displacement(const EnvironmentModel& model) {
  CompensatedSum c;
  for (const auto& atom : model.atoms()) {
    if (atom.law.is_gaussian()) {
      const auto& g = atom.law.as_gaussian();
      c.add(atom.probability * (g.drift - g.sigma * expected_max_std_normal(g.children)));
    } else {
      for (const auto& o : atom.law.as_discrete().outcomes)
        c.add(atom.probability * o.weight * *std::min_element(o.displacements.begin(), o.displacements.end()));
    }
  }
  return c.value();
}

DekkingHostReport dekking_host_check(const EnvironmentModel& model, const std::vector<std::size_t>& n_grid,
                                     std::size_t environments, std::uint64_t seed,
                                     const DekkingHostOptions& options) {
  if (n_grid.empty() || !std::is_sorted(n_grid.begin(), n_grid.end()) || n_grid.front() < 1)
    throw ConfigError("Dekking-Host check needs a sorted, non-empty nGrid of values >= 1");
  if (environments < 1) throw ConfigError("Dekking-Host check needs environments >= 1");
  std::vector<std::string> offending;
  for (std::size_t i = 0; i < model.size(); ++i)
    if (model.atoms()[i].law.min_children() < 2)
      offending.push_back("atom " + std::to_string(i) + " (" + model.atoms()[i].law.describe() + ")");
  if (!offending.empty()) {
    std::string msg = "Dekking-Host check needs at least two children almost surely; offending:";
    for (const auto& s : offending) msg += " " + s;
    throw ConfigError(msg);
  }
  DekkingHostReport out;
  out.C = expected_min_displacement(model);
  out.speed = std::numeric_limits<double>::quiet_NaN();
  const SeedTree tree(seed);
  struct Cell {
    std::vector<double> mad, step;
  };
  std::vector<Cell> cells;

  if (options.engine == MaxEngine::Exact) {
    if (!model.all_gaussian())
      throw ConfigError("Dekking-Host exact engine needs a Gaussian model; select the particle engine");
    const double theta = solve_theta_star(model);
    out.speed = annealed_log_laplace(model, theta).d1;
    std::vector<std::size_t> both;
    for (auto n : n_grid) {
      both.push_back(n);
      both.push_back(n + 1);
    }
    std::sort(both.begin(), both.end());
    both.erase(std::unique(both.begin(), both.end()), both.end());
    auto at = [&](std::size_t n) { return static_cast<std::size_t>(std::lower_bound(both.begin(), both.end(), n) - both.begin()); };
    const std::size_t distinct = model.size() == 1 ? 1 : environments;
    cells = parallel_map<Cell>(distinct, options.workers, [&](std::size_t r) {
      EnvironmentSequence draws = sample_environment(model, both.back(), tree.child_seed(StreamDomain::Environment, r));
      draws.attach_tilt(theta);
      const auto laws = coupled_max_laws(draws, both, options.grid);
      Cell c;
      for (auto n : n_grid) {
        const auto& a = laws[at(n)];
        c.mad.push_back(a.mean_abs_deviation());
        // E M_{n+1} - E M_n = v + E(Y_{n+1} - Y_n).
        c.step.push_back(out.speed + laws[at(n + 1)].mean() - a.mean());
      }
      return c;
    });
  } else {
    if (options.branching_replicates < 2) throw ConfigError("Dekking-Host particle engine needs >= 2 branching replicates");
    options.prune.validate();
    double theta = 1.0;
    try {
      theta = solve_theta_star(model);
    } catch (const NoInteriorMinimizer&) {
      if (std::isfinite(options.prune.upper_offset))
        throw ConfigError("Dekking-Host: upper pruning needs theta*, which this model lacks");
    }
    cells = parallel_map<Cell>(environments, options.workers, [&](std::size_t r) {
      Cell c;
      for (std::size_t i = 0; i < n_grid.size(); ++i) {
        const std::size_t n = n_grid[i];
        EnvironmentSequence env = sample_environment(model, n + 1, tree.child_seed(StreamDomain::Environment, i, r));
        env.attach_tilt(theta);
        BrwOptions bo;
        bo.record_generations = true;
        bo.workers = 1;
        std::vector<double> mn, step;
        for (std::size_t k = 0; k < options.branching_replicates; ++k) {
          const auto run = simulate_brw(env, n + 1, options.prune, tree.child_seed(StreamDomain::Branching, i, r * options.branching_replicates + k), bo);
          mn.push_back(run.generations[n - 1].max);
          step.push_back(run.sample.M - mn.back());
        }
        RunningStats m, d;
        for (std::size_t k = 0; k < mn.size(); ++k) {
          m.add(mn[k]);
          d.add(step[k]);
        }
        RunningStats dev;
        for (double x : mn) dev.add(std::abs(x - m.mean()));
        c.mad.push_back(dev.mean());
        c.step.push_back(d.mean());
      }
      return c;
    });
  }
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    RunningStats lhs, step;
    for (const auto& c : cells) {
      lhs.add(c.mad[i]);
      step.add(c.step[i]);
    }
    DekkingHostRow row;
    row.n = n_grid[i];
    row.lhs = lhs.mean();
    row.lhs_stderr = lhs.stderr_of_mean();
    row.rhs = std::abs(step.mean() - out.C);
    row.rhs_stderr = step.stderr_of_mean();
    row.slack = row.rhs - row.lhs;
    row.slack_stderr = std::hypot(row.lhs_stderr, row.rhs_stderr);
    row.pass = row.slack >= -3.0 * row.slack_stderr;
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace brwre
