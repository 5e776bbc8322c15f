#include "brwre/brw.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/random/binomial_distribution.hpp>

#include "brwre/analytics.hpp"
#include "brwre/errors.hpp"
#include "brwre/parallel.hpp"
#include "brwre/rwre.hpp"
#include "brwre/stats.hpp"

namespace brwre {

namespace {

constexpr std::size_t kParentBlock = 8192;
constexpr std::uint64_t kRouletteSalt = std::uint64_t{1} << 40;

// Cumulative outcome weights of a discrete law.
std::vector<double> outcome_cdf(const DiscreteMixture& d) {
  std::vector<double> c;
  double s = 0.0;
  for (const auto& o : d.outcomes) c.push_back(s += o.weight);
  c.back() = 1.0;
  return c;
}

std::size_t pick(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

// Children of parents[begin, end) for generation g. Parent i draws from its own stream,
// so the output does not depend on how parents are split into blocks.
void branch_block(const PointProcessLaw& law, const std::vector<double>* cdf, const std::vector<double>& parents,
                  std::size_t begin, std::size_t end, const SeedTree& tree, std::size_t g, std::vector<double>& out) {
  for (std::size_t i = begin; i < end; ++i) {
    RandomStream rng = tree.stream(StreamDomain::Branching, g, i);
    const double x = parents[i];
    if (law.is_gaussian()) {
      const auto& gl = law.as_gaussian();
      for (int c = 0; c < gl.children; ++c) out.push_back(x + gl.drift + gl.sigma * rng.normal());
    } else {
      const auto& o = law.as_discrete().outcomes[pick(*cdf, rng.uniform())];
      for (double d : o.displacements) out.push_back(x + d);
    }
  }
}

std::vector<double> branch(const PointProcessLaw& law, const std::vector<double>& parents, const SeedTree& tree,
                           std::size_t g, int workers, std::size_t max_particles) {
  std::vector<double> cdf;
  std::size_t widest = 0;
  if (law.is_gaussian()) {
    widest = static_cast<std::size_t>(law.as_gaussian().children);
  } else {
    cdf = outcome_cdf(law.as_discrete());
    for (const auto& o : law.as_discrete().outcomes) widest = std::max(widest, o.displacements.size());
  }
  if (parents.size() > max_particles / std::max<std::size_t>(widest, 1)) {
    // Exact for Gaussian laws; an upper bound for discrete ones.
    if (law.is_gaussian() || parents.size() * law.mean_offspring() > static_cast<double>(max_particles)) {
      std::ostringstream os;
      os << "generation " << g + 1 << " would hold about " << parents.size() * law.mean_offspring()
         << " particles before pruning (limit " << max_particles
         << "); use fewer children per particle, a tighter lower trim or a smaller hard cap";
      throw ResourceError(os.str());
    }
  }
  const std::size_t blocks = (parents.size() + kParentBlock - 1) / kParentBlock;
  if (blocks <= 1) {
    std::vector<double> out;
    out.reserve(parents.size() * widest);
    branch_block(law, &cdf, parents, 0, parents.size(), tree, g, out);
    return out;
  }
  auto parts = parallel_map<std::vector<double>>(blocks, workers, [&](std::size_t b) {
    std::vector<double> out;
    const std::size_t begin = b * kParentBlock, end = std::min(parents.size(), begin + kParentBlock);
    out.reserve((end - begin) * widest);
    branch_block(law, &cdf, parents, begin, end, tree, g, out);
    return out;
  });
  std::vector<double> all;
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  if (total > max_particles) throw ResourceError("generation " + std::to_string(g + 1) + " exceeds the particle limit");
  all.reserve(total);
  for (const auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return all;
}

void require_gaussian(const EnvironmentModel& model, const char* what) {
  if (!model.all_gaussian())
    throw ConfigError(std::string(what) + ": the exact engine needs a Gaussian model; select the particle engine");
}

// OLS slope of y on log n.
double log_slope(const std::vector<std::size_t>& n, const std::vector<double>& y) {
  std::vector<double> x;
  for (auto v : n) x.push_back(std::log(static_cast<double>(v)));
  return fit_linear(x, y).slope;
}

}  // namespace

void PruneConfig::validate() const {
  if (!(upper_offset > 0.0)) throw ConfigError("prune: upperBarrierOffset y must be > 0");
  if (!(lower_width > 0.0)) throw ConfigError("prune: lowerTrimWidth w must be > 0");
  if (hard_cap < 1) throw ConfigError("prune: hardCap must be >= 1");
}

PruneConfig PruneConfig::defaults(double theta_star, std::size_t n) {
  PruneConfig p;
  p.upper_offset = 12.0 / theta_star;
  p.lower_width = 8.0 * std::log(static_cast<double>(std::max<std::size_t>(n, 2))) / theta_star;
  p.hard_cap = std::size_t{1} << 22;
  return p;
}

BrwRun simulate_brw(const EnvironmentSequence& env, std::size_t n, const PruneConfig& prune, std::uint64_t seed,
                    const BrwOptions& options) {
  prune.validate();
  if (!env.has_tilt()) throw ConfigError("simulate_brw: attach theta* to the environment first");
  if (n > env.size()) throw ConfigError("simulate_brw: n exceeds the environment length");
  const double theta = env.theta();
  const SeedTree tree(seed);
  BrwRun run;
  auto& s = run.sample;
  s.n = n;
  s.environment_seed = env.seed();
  s.branching_seed = seed;
  std::vector<double> pop{0.0};
  for (std::size_t g = 0; g < n; ++g) {
    std::vector<double> kids = branch(env.law(g), pop, tree, g, options.workers, options.max_particles);
    const std::size_t born = kids.size();
    const double line = env.K(g + 1) / theta;
    if (options.detect_line && !s.line_crossed)
      s.line_crossed = std::any_of(kids.begin(), kids.end(), [&](double x) { return x > line + *options.detect_line; });
    if (std::isfinite(prune.upper_offset)) {
      const double top = line + prune.upper_offset;
      const auto above = static_cast<std::size_t>(std::count_if(kids.begin(), kids.end(), [&](double x) { return x > top; }));
      if (above == kids.size()) {
        s.barrier_skipped = true;
      } else if (above > 0) {
        s.losses.upper += above;
        std::erase_if(kids, [&](double x) { return x > top; });
      }
    }
    if (std::isfinite(prune.lower_width)) {
      const double floor = *std::max_element(kids.begin(), kids.end()) - prune.lower_width;
      const std::size_t before = kids.size();
      std::erase_if(kids, [&](double x) { return x < floor; });
      s.losses.lower += before - kids.size();
    }
    if (kids.size() > prune.hard_cap) {
      const auto cap = static_cast<std::ptrdiff_t>(prune.hard_cap);
      std::nth_element(kids.begin(), kids.begin() + cap - 1, kids.end(), std::greater<>());
      s.losses.cap += kids.size() - prune.hard_cap;
      kids.resize(prune.hard_cap);
    }
    pop = std::move(kids);
    if (options.record_generations)
      run.generations.push_back({g + 1, born, pop.size(), *std::max_element(pop.begin(), pop.end())});
  }
  s.M = *std::max_element(pop.begin(), pop.end());
  s.K = env.K(n);
  s.centered = s.M - s.K / theta;
  return run;
}

LogCorrectionFit fit_log_correction(const EnvironmentModel& model, const std::vector<std::size_t>& n_grid,
                                    std::size_t replicates, const PruneConfig& prune, std::uint64_t seed,
                                    const LogCorrectionOptions& options) {
  if (n_grid.size() < 3 || !std::is_sorted(n_grid.begin(), n_grid.end()) || n_grid.front() < 1)
    throw ConfigError("log-correction fit needs >= 3 sorted values of n");
  if (replicates < 1) throw ConfigError("log-correction fit needs replicates >= 1");
  const double theta = solve_theta_star(model);
  const SeedTree tree(seed);
  LogCorrectionFit out;
  out.n_grid = n_grid;
  out.replicates = replicates;
  out.engine = options.engine;
  std::vector<double> logn;
  for (auto n : n_grid) logn.push_back(std::log(static_cast<double>(n)));

  if (options.engine == MaxEngine::Exact) {
    require_gaussian(model, "fit_log_correction");
    // A single-atom model has one environment: every path gives the same laws.
    const std::size_t distinct = model.size() == 1 ? 1 : replicates;
    auto laws = parallel_map<std::vector<TailFunction>>(distinct, options.workers, [&](std::size_t r) {
      EnvironmentSequence draws = sample_environment(model, n_grid.back(), tree.child_seed(StreamDomain::Environment, r));
      draws.attach_tilt(theta);
      return coupled_max_laws(draws, n_grid, options.grid);
    });
    const std::size_t points = laws.front().front().values.size();
    auto annealed_median = [&](const std::vector<double>& mult, std::size_t i) {
      TailFunction avg = laws.front()[i];
      std::fill(avg.values.begin(), avg.values.end(), 0.0);
      double total = 0.0;
      for (std::size_t r = 0; r < laws.size(); ++r) {
        if (mult[r] == 0.0) continue;
        total += mult[r];
        const auto& v = laws[r][i].values;
        for (std::size_t k = 0; k < points; ++k) avg.values[k] += mult[r] * v[k];
      }
      for (double& v : avg.values) v /= total;
      return avg.median();
    };
    const std::vector<double> ones(laws.size(), 1.0);
    for (std::size_t i = 0; i < n_grid.size(); ++i) out.median.push_back(annealed_median(ones, i));
    out.fit = fit_linear(logn, out.median);
    std::vector<RunningStats> med(n_grid.size());
    RunningStats slopes;
    if (laws.size() > 1) {
      RandomStream rng = tree.stream(StreamDomain::Bootstrap);
      for (std::size_t b = 0; b < options.bootstrap; ++b) {
        std::vector<double> mult(laws.size(), 0.0);
        for (std::size_t r = 0; r < laws.size(); ++r)
          mult[std::min(laws.size() - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(laws.size())))] += 1.0;
        std::vector<double> m;
        for (std::size_t i = 0; i < n_grid.size(); ++i) {
          m.push_back(annealed_median(mult, i));
          med[i].add(m.back());
        }
        slopes.add(log_slope(n_grid, m));
      }
    }
    for (auto& m : med) out.median_stderr.push_back(std::sqrt(m.variance()));
    out.bootstrap_stderr = std::sqrt(slopes.variance());
  } else {
    prune.validate();
    if (prune.upper_offset < 10.0 / theta) throw ConfigError("particle log-correction fit needs prune y >= 10/theta*");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
      const std::size_t n = n_grid[i];
      const auto centered = parallel_map<double>(replicates, options.workers, [&](std::size_t r) {
        EnvironmentSequence env = sample_environment(model, n, tree.child_seed(StreamDomain::Environment, i, r));
        env.attach_tilt(theta);
        return simulate_brw(env, n, prune, tree.child_seed(StreamDomain::Branching, i, r)).sample.centered;
      });
      out.median.push_back(median(centered));
      out.median_stderr.push_back(median_stderr(centered));
      const double iqr = quantile(centered, 0.75) - quantile(centered, 0.25);
      if (iqr / std::sqrt(static_cast<double>(replicates)) > 0.25) out.under_resolved = true;
    }
    bool weighted = std::all_of(out.median_stderr.begin(), out.median_stderr.end(), [](double s) { return s > 0.0 && std::isfinite(s); });
    out.fit = weighted ? fit_linear(logn, out.median, out.median_stderr) : fit_linear(logn, out.median);
  }
  out.slope = out.fit.slope;
  out.slope_stderr = std::hypot(out.fit.slope_stderr, out.bootstrap_stderr);
  return out;
}

QuenchedMedianTrace quenched_median_trace(const EnvironmentModel& model, std::size_t n, std::size_t environments,
                                          std::size_t branching_replicates, const PruneConfig& prune,
                                          std::uint64_t seed, const LogCorrectionOptions& options) {
  if (environments < 1) throw ConfigError("quenched median trace needs environments >= 1");
  const double theta = solve_theta_star(model);
  const SeedTree tree(seed);
  QuenchedMedianTrace out;
  out.n = n;
  struct Cell {
    double median = 0.0;
    double stderr = 0.0;
  };
  std::vector<Cell> cells;
  if (options.engine == MaxEngine::Exact) {
    require_gaussian(model, "quenched_median_trace");
    cells = parallel_map<Cell>(environments, options.workers, [&](std::size_t e) {
      EnvironmentSequence env = sample_environment(model, n, tree.child_seed(StreamDomain::Environment, e));
      env.attach_tilt(theta);
      return Cell{quenched_max_law(env, n, options.grid).median(), 0.0};
    });
  } else {
    if (branching_replicates < 100) throw ConfigError("quenched median trace needs >= 100 branching replicates");
    prune.validate();
    cells = parallel_map<Cell>(environments, options.workers, [&](std::size_t e) {
      EnvironmentSequence env = sample_environment(model, n, tree.child_seed(StreamDomain::Environment, e));
      env.attach_tilt(theta);
      std::vector<double> c;
      for (std::size_t r = 0; r < branching_replicates; ++r)
        c.push_back(simulate_brw(env, n, prune, tree.child_seed(StreamDomain::Branching, e, r)).sample.centered);
      return Cell{median(c), median_stderr(c)};
    });
  }
  RunningStats s;
  for (const auto& c : cells) {
    out.centered_median.push_back(c.median);
    out.median_stderr.push_back(c.stderr);
    s.add(c.median);
  }
  out.mean = s.mean();
  out.spread = std::sqrt(s.variance());
  return out;
}

std::pair<double, double> barrier_count_mean(const EnvironmentSequence& env, std::size_t n, double beta,
                                             std::uint64_t replicates, std::uint64_t seed) {
  if (replicates < 2) throw ConfigError("barrier_count_mean needs >= 2 replicates");
  if (n > env.size()) throw ConfigError("barrier_count_mean: n exceeds the environment length");
  const StepTable steps(env);
  const double ln = std::log(static_cast<double>(std::max<std::size_t>(n, 1)));
  const double c = -beta * env.theta() * ln;
  RandomStream rng = SeedTree(seed).stream(StreamDomain::Walk);
  RunningStats s;
  for (std::uint64_t r = 0; r < replicates; ++r) {
    double t = 0.0;
    bool alive = true;
    for (std::size_t j = 0; j < n; ++j) {
      t += steps.sample(env.palette_index(j), rng);
      if (t > ln) {
        alive = false;
        break;
      }
    }
    s.add(alive && t >= c ? std::exp(-t) : 0.0);
  }
  return {s.mean(), s.stderr_of_mean()};
}

BarrierCount count_barrier_particles(const EnvironmentSequence& env, std::size_t n, double beta, std::uint64_t seed,
                                     const BarrierCountOptions& options) {
  if (!env.has_tilt()) throw ConfigError("count_barrier_particles: attach theta* first");
  if (n > env.size()) throw ConfigError("count_barrier_particles: n exceeds the environment length");
  if (!(beta > 0.0)) throw ConfigError("count_barrier_particles: beta must be > 0");
  const double theta = env.theta();
  const double ln = std::log(static_cast<double>(std::max<std::size_t>(n, 1)));
  const double c = -beta * theta * ln;
  const SeedTree tree(seed);
  BarrierCount out;
  out.roulette = options.roulette_population > 0;
  // Positions are kept in T-units: tau = theta V - K_j.
  std::vector<double> tau{0.0}, weight{1.0};
  for (std::size_t g = 0; g < n; ++g) {
    std::vector<double> parents(tau.size());
    for (std::size_t i = 0; i < tau.size(); ++i) parents[i] = (tau[i] + env.K(g)) / theta;
    std::vector<double> kids = branch(env.law(g), parents, tree, g, 1, options.max_particles);
    // Children inherit their parent's weight; branch() emits them parent by parent.
    std::vector<double> kid_weight;
    kid_weight.reserve(kids.size());
    {
      std::size_t k = 0;
      const PointProcessLaw& law = env.law(g);
      std::vector<double> cdf = law.is_gaussian() ? std::vector<double>{} : outcome_cdf(law.as_discrete());
      for (std::size_t i = 0; i < parents.size(); ++i) {
        std::size_t count;
        if (law.is_gaussian()) {
          count = static_cast<std::size_t>(law.as_gaussian().children);
        } else {
          RandomStream rng = tree.stream(StreamDomain::Branching, g, i);
          count = law.as_discrete().outcomes[pick(cdf, rng.uniform())].displacements.size();
        }
        for (std::size_t j = 0; j < count; ++j, ++k) kid_weight.push_back(weight[i]);
      }
    }
    std::vector<double> next_tau, next_weight;
    for (std::size_t k = 0; k < kids.size(); ++k) {
      const double t = theta * kids[k] - env.K(g + 1);
      if (t > ln) {
        ++out.upper_kills;
        continue;
      }
      next_tau.push_back(t);
      next_weight.push_back(kid_weight[k]);
    }
    if (out.roulette && g + 1 < n && next_tau.size() > options.roulette_population) {
      // Importance e^{tau - c}: the expected number of window descendants is at most this.
      // Find I0 with sum min(1, I/I0) = target, then keep each particle w.p. min(1, I/I0).
      std::vector<double> imp(next_tau.size());
      for (std::size_t k = 0; k < imp.size(); ++k) imp[k] = next_tau[k] - c;
      const double target = static_cast<double>(options.roulette_population);
      double lo = *std::min_element(imp.begin(), imp.end()) - 50.0, hi = *std::max_element(imp.begin(), imp.end());
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        double kept = 0.0;
        for (double v : imp) kept += v >= mid ? 1.0 : std::exp(v - mid);
        (kept > target ? lo : hi) = mid;
      }
      const double log_i0 = hi;
      RandomStream rng = tree.stream(StreamDomain::Branching, kRouletteSalt + g);
      std::vector<double> kt, kw;
      for (std::size_t k = 0; k < imp.size(); ++k) {
        const double p = imp[k] >= log_i0 ? 1.0 : std::exp(imp[k] - log_i0);
        if (rng.uniform() < p) {
          kt.push_back(next_tau[k]);
          kw.push_back(next_weight[k] / p);
        }
      }
      next_tau = std::move(kt);
      next_weight = std::move(kw);
    }
    tau = std::move(next_tau);
    weight = std::move(next_weight);
    if (tau.empty()) break;
  }
  out.population = tau.size();
  for (std::size_t k = 0; k < tau.size(); ++k)
    if (tau[k] >= c) out.count += weight[k];
  std::tie(out.predicted_mean, out.predicted_stderr) =
      barrier_count_mean(env, n, beta, options.walk_replicates, tree.child_seed(StreamDomain::Walk));
  return out;
}

TrimmedGrowth trimmed_growth_rate(const EnvironmentModel& model, int A, const std::vector<std::size_t>& n_grid,
                                  std::size_t replicates, std::uint64_t seed, int workers) {
  if (A < 1) throw ConfigError("trimmed growth: A must be a positive integer");
  if (n_grid.size() < 2 || !std::is_sorted(n_grid.begin(), n_grid.end()) || n_grid.front() < 1)
    throw ConfigError("trimmed growth: nGrid needs >= 2 sorted values >= 1");
  if (replicates < 2) throw ConfigError("trimmed growth: replicates must be >= 2");
  // Distribution of the number of kept children, per atom.
  std::vector<std::vector<double>> dist;
  TrimmedGrowth out;
  double elog = 0.0;
  for (const auto& atom : model.atoms()) {
    std::vector<double> q(static_cast<std::size_t>(A) + 1, 0.0);
    if (atom.law.is_gaussian()) {
      const auto& g = atom.law.as_gaussian();
      const double p = normal_cdf((static_cast<double>(A) + g.drift) / g.sigma);
      for (int k = 0; k <= g.children; ++k) {
        const double pk = std::exp(std::lgamma(g.children + 1.0) - std::lgamma(k + 1.0) - std::lgamma(g.children - k + 1.0)) *
                          std::pow(p, k) * std::pow(1.0 - p, g.children - k);
        q[static_cast<std::size_t>(std::min(k, A))] += pk;
      }
    } else {
      for (const auto& o : atom.law.as_discrete().outcomes) {
        const auto kept = std::count_if(o.displacements.begin(), o.displacements.end(),
                                        [A](double d) { return d >= -static_cast<double>(A); });
        q[static_cast<std::size_t>(std::min<std::ptrdiff_t>(kept, A))] += o.weight;
      }
    }
    double m = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) m += static_cast<double>(k) * q[k];
    out.mean_offspring.push_back(m);
    elog += atom.probability * (m > 0.0 ? std::log(m) : -INFINITY);
    dist.push_back(std::move(q));
  }
  out.rho_theory = std::exp(elog);
  if (!(elog > 0.0)) {
    std::ostringstream os;
    os << "trimmed tree with A = " << A << " does not grow (E log m_A = " << elog << ")";
    throw ConfigError(os.str());
  }
  const SeedTree tree(seed);
  const double cap = 0x1.0p52;
  auto slopes = parallel_map<double>(replicates, workers, [&](std::size_t r) {
    RandomStream env_rng = tree.stream(StreamDomain::Environment, r);
    RandomStream rng = tree.stream(StreamDomain::Branching, r);
    std::uint64_t N = 1;
    std::vector<double> logs;
    std::size_t next = 0;
    for (std::size_t k = 1; k <= n_grid.back(); ++k) {
      const auto& q = dist[model.pick(env_rng.uniform())];
      // Multinomial split of N parents over kept-children counts, by sequential binomials.
      std::uint64_t remaining = N, born = 0;
      double mass = 1.0;
      for (std::size_t j = 0; j < q.size() && remaining > 0; ++j) {
        const double p = j + 1 == q.size() ? 1.0 : std::clamp(q[j] / mass, 0.0, 1.0);
        const std::uint64_t c =
            p >= 1.0 ? remaining : static_cast<std::uint64_t>(boost::random::binomial_distribution<std::int64_t, double>(static_cast<std::int64_t>(remaining), p)(rng));
        born += c * j;
        remaining -= c;
        mass -= q[j];
      }
      N = born;
      if (N == 0) return std::numeric_limits<double>::quiet_NaN();
      if (static_cast<double>(N) > cap) throw ResourceError("trimmed growth: population count passed 2^52; lower max(nGrid)");
      while (next < n_grid.size() && n_grid[next] == k) {
        logs.push_back(std::log(static_cast<double>(N)));
        ++next;
      }
    }
    std::vector<double> x;
    for (auto n : n_grid) x.push_back(static_cast<double>(n));
    if (x.size() == 2) return (logs[1] - logs[0]) / (x[1] - x[0]);
    return fit_linear(x, logs).slope;
  });
  RunningStats s;
  for (double v : slopes) {
    if (std::isnan(v)) {
      ++out.extinct;
      continue;
    }
    s.add(v);
  }
  out.replicates = s.count();
  if (s.count() < 2) throw UnderResolvedError("trimmed growth: fewer than 2 surviving replicates");
  out.rho_hat = std::exp(s.mean());
  out.stderr = out.rho_hat * s.stderr_of_mean();
  return out;
}

std::vector<FrontierRate> frontier_violation_rate(const EnvironmentModel& model, std::size_t n,
                                                  const std::vector<double>& y_grid, std::size_t environments,
                                                  std::uint64_t seed, const LawGrid& grid, int workers) {
  require_gaussian(model, "frontier_violation_rate");
  if (environments < 2) throw ConfigError("frontier rate needs >= 2 environments");
  const double theta = solve_theta_star(model);
  const SeedTree tree(seed);
  auto probs = parallel_map<std::vector<double>>(environments, workers, [&](std::size_t e) {
    EnvironmentSequence env = sample_environment(model, n, tree.child_seed(StreamDomain::Environment, e));
    env.attach_tilt(theta);
    std::vector<double> p;
    for (double y : y_grid) p.push_back(frontier_violation_probability(env, n, y, grid));
    return p;
  });
  std::vector<FrontierRate> out;
  for (std::size_t k = 0; k < y_grid.size(); ++k) {
    RunningStats s;
    for (const auto& p : probs) s.add(p[k]);
    FrontierRate f;
    f.y = y_grid[k];
    f.rate = s.mean();
    f.stderr = s.stderr_of_mean();
    f.bound = std::exp(-theta * f.y);
    f.pass = f.rate <= f.bound + 3.0 * f.stderr;
    out.push_back(f);
  }
  return out;
}

}  // namespace brwre
