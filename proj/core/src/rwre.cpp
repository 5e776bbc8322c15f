#include "brwre/rwre.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "brwre/analytics.hpp"
#include "brwre/errors.hpp"
#include "brwre/parallel.hpp"

namespace brwre {

namespace {

constexpr std::uint64_t kChunk = 1U << 15;

std::uint64_t chunk_count(std::uint64_t replicates) { return (replicates + kChunk - 1) / kChunk; }
std::uint64_t chunk_size(std::uint64_t replicates, std::uint64_t c) {
  return std::min(kChunk, replicates - c * kChunk);
}

// Walks one path; returns whether the event holds and writes start + sT_n to *end.
template <class IndexFn>
bool run_path(const StepTable& steps, IndexFn&& index, std::size_t n, const WalkEvent& ev,
              const std::vector<double>* levels, RandomStream& rng, double* end) {
  const double sign = ev.negate ? -1.0 : 1.0;
  const bool below = ev.barrier && ev.barrier->side == BarrierSide::StayBelow;
  double t = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    t += steps.sample(index(j, rng), rng);
    if (levels) {
      const double v = ev.start + sign * t;
      if (below ? v > (*levels)[j] : v < (*levels)[j]) return false;
    }
  }
  const double v = ev.start + sign * t;
  if (end) *end = v;
  if (ev.final_lo && v < *ev.final_lo) return false;
  if (ev.final_hi && v > *ev.final_hi) return false;
  return true;
}

std::optional<std::vector<double>> event_levels(const WalkEvent& ev, std::size_t n) {
  if (!ev.barrier) return std::nullopt;
  ev.barrier->validate();
  return ev.barrier->levels(n);
}

template <class IndexFn>
ProportionEstimate chunked_probability(const StepTable& steps, IndexFn index, std::size_t n, const WalkEvent& ev,
                                       std::uint64_t replicates, std::uint64_t seed, int workers) {
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  const auto levels = event_levels(ev, n);
  const SeedTree tree(seed);
  const auto hits = parallel_map<std::uint64_t>(chunk_count(replicates), workers, [&](std::size_t c) {
    RandomStream rng = tree.stream(StreamDomain::Walk, c);
    std::uint64_t h = 0;
    const auto size = chunk_size(replicates, c);
    for (std::uint64_t r = 0; r < size; ++r)
      h += run_path(steps, index, n, ev, levels ? &*levels : nullptr, rng, nullptr) ? 1 : 0;
    return h;
  });
  return proportion(std::accumulate(hits.begin(), hits.end(), std::uint64_t{0}), replicates);
}

template <class IndexFn>
std::vector<double> chunked_endpoints(const StepTable& steps, IndexFn index, std::size_t n, std::uint64_t replicates,
                                      std::uint64_t seed, int workers) {
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  const SeedTree tree(seed);
  const WalkEvent ev;
  auto parts = parallel_map<std::vector<double>>(chunk_count(replicates), workers, [&](std::size_t c) {
    RandomStream rng = tree.stream(StreamDomain::Walk, c);
    std::vector<double> out(chunk_size(replicates, c));
    for (double& e : out) run_path(steps, index, n, ev, nullptr, rng, &e);
    return out;
  });
  std::vector<double> all;
  all.reserve(replicates);
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return all;
}

auto forward_index(const EnvironmentSequence& env, std::size_t offset) {
  const auto idx = env.indices();
  return [idx, offset](std::size_t j, RandomStream&) { return static_cast<std::size_t>(idx[offset + j - 1]); };
}

auto reversed_index(const EnvironmentSequence& env, std::size_t offset, std::size_t n) {
  const auto idx = env.indices();
  return [idx, offset, n](std::size_t j, RandomStream&) { return static_cast<std::size_t>(idx[offset + n - j]); };
}

auto annealed_index(const EnvironmentModel& model) {
  return [&model](std::size_t, RandomStream& rng) { return model.pick(rng.uniform()); };
}

void require_tilt(const EnvironmentSequence& env) {
  if (!env.has_tilt()) throw ConfigError("environment needs attach_tilt(theta*) before walking T");
}

void require_horizon(const EnvironmentSequence& env, std::size_t offset, std::size_t n) {
  if (offset + n > env.size()) throw ConfigError("walk horizon exceeds the environment length");
}

std::vector<PointProcessLaw> model_palette(const EnvironmentModel& model) {
  std::vector<PointProcessLaw> p;
  for (const auto& a : model.atoms()) p.push_back(a.law);
  return p;
}

}  // namespace

StepTable::StepTable(const std::vector<PointProcessLaw>& palette, double theta) {
  for (const auto& law : palette) {
    const TiltedStepLaw step = tilted_step_law(law, theta);
    const double kappa = log_laplace(law, theta);
    Entry e;
    if (step.is_gaussian()) {
      e.gaussian = true;
      e.mean = tilt_gap(law, theta);
      e.sd = theta * step.as_gaussian().sd;
    } else {
      e.gaussian = false;
      const auto& d = step.as_discrete();
      for (double v : d.values) e.values.push_back(theta * v - kappa);
      e.cumulative = d.cumulative;
      e.mean = tilt_gap(law, theta);
      e.sd = theta * std::sqrt(step.variance());
    }
    entries_.push_back(std::move(e));
  }
}

StepTable::StepTable(const EnvironmentSequence& env) : StepTable(env.palette(), env.theta()) {}

double StepTable::sample_discrete(const Entry& e, double u) noexcept {
  const auto it = std::upper_bound(e.cumulative.begin(), e.cumulative.end(), u);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(it - e.cumulative.begin()), e.values.size() - 1);
  return e.values[i];
}

WalkPath sample_walk(const EnvironmentSequence& env, std::size_t offset, std::size_t m, std::uint64_t seed) {
  require_tilt(env);
  require_horizon(env, offset, m);
  const StepTable steps(env);
  RandomStream rng = SeedTree(seed).stream(StreamDomain::Walk);
  WalkPath path;
  path.offset = offset;
  path.values.assign(m + 1, 0.0);
  for (std::size_t j = 1; j <= m; ++j)
    path.values[j] = path.values[j - 1] + steps.sample(env.palette_index(offset + j - 1), rng);
  return path;
}

double quenched_mean(const EnvironmentSequence& env, std::size_t offset, std::size_t m) {
  require_tilt(env);
  require_horizon(env, offset, m);
  const double theta = env.theta();
  double s = 0.0;
  for (std::size_t j = offset; j < offset + m; ++j) s += tilt_gap(env.law(j), theta);
  return s;
}

BarrierSpec BarrierSpec::constant(double level, BarrierSide side) { return {Constant{level}, side}; }
BarrierSpec BarrierSpec::excursion_ceiling(double x, double alpha) {
  return {ExcursionCeiling{x, alpha}, BarrierSide::StayBelow};
}
BarrierSpec BarrierSpec::proof_shape(double delta, double phi, double theta_star) {
  return {ProofShape{delta, phi, theta_star}, BarrierSide::StayBelow};
}

void BarrierSpec::validate() const {
  if (const auto* e = std::get_if<ExcursionCeiling>(&shape)) {
    if (!(e->alpha >= 0.0 && e->alpha < 0.5)) throw ConfigError("excursion ceiling needs alpha in [0, 1/2)");
  }
  if (const auto* p = std::get_if<ProofShape>(&shape)) {
    if (!(p->theta_star > 0.0)) throw ConfigError("proof-shape barrier needs theta* > 0");
  }
}

double BarrierSpec::level(std::size_t j, std::size_t n) const {
  if (const auto* c = std::get_if<Constant>(&shape)) return c->level;
  if (const auto* e = std::get_if<ExcursionCeiling>(&shape)) {
    const double m = static_cast<double>(std::min(j, n - std::min(j, n)));
    return e->x - std::pow(m, e->alpha);
  }
  const auto& p = std::get<ProofShape>(shape);
  const double ln = std::log(static_cast<double>(std::max<std::size_t>(n, 1)));
  const double r = j <= n / 2 ? std::cbrt(static_cast<double>(j)) - p.delta * ln
                              : std::cbrt(static_cast<double>(n - j)) + (p.phi - p.delta) * ln;
  return -p.theta_star * r;
}

std::vector<double> BarrierSpec::levels(std::size_t n) const {
  std::vector<double> out(n + 1, 0.0);
  for (std::size_t j = 1; j <= n; ++j) out[j] = level(j, n);
  return out;
}

ProportionEstimate walk_event_probability(const EnvironmentSequence& env, std::size_t offset, std::size_t n,
                                          const WalkEvent& event, std::uint64_t replicates, std::uint64_t seed,
                                          int workers) {
  require_tilt(env);
  require_horizon(env, offset, n);
  const StepTable steps(env);
  if (event.reversed) return chunked_probability(steps, reversed_index(env, offset, n), n, event, replicates, seed, workers);
  return chunked_probability(steps, forward_index(env, offset), n, event, replicates, seed, workers);
}

ProportionEstimate annealed_event_probability(const EnvironmentModel& model, double theta, std::size_t n,
                                              const WalkEvent& event, std::uint64_t replicates,
                                              std::uint64_t seed, int workers) {
  const StepTable steps(model_palette(model), theta);
  return chunked_probability(steps, annealed_index(model), n, event, replicates, seed, workers);
}

ProportionEstimate excursion_probability(const EnvironmentSequence& env, std::size_t n, double x, double y,
                                         const BarrierSpec& barrier, std::uint64_t replicates,
                                         std::uint64_t seed, int workers) {
  if (!(y >= 0.0 && y <= x)) throw ConfigError("excursion needs 0 <= y <= x");
  if (barrier.side != BarrierSide::StayBelow) throw ConfigError("excursion barrier must be stay-below");
  WalkEvent ev;
  ev.barrier = barrier;
  ev.final_lo = x - y;
  return walk_event_probability(env, 0, n, ev, replicates, seed, workers);
}

ProportionEstimate reversed_persistence(const EnvironmentSequence& env, std::size_t n, std::size_t offset,
                                        double start, const BarrierSpec& barrier, bool negate,
                                        std::uint64_t replicates, std::uint64_t seed, int workers) {
  if (n == 0) return proportion(replicates, replicates);
  WalkEvent ev;
  ev.barrier = barrier;
  ev.start = start;
  ev.negate = negate;
  ev.reversed = true;
  return walk_event_probability(env, offset, n, ev, replicates, seed, workers);
}

double OffsetRule::at(std::size_t n) const { return log_n ? std::log(static_cast<double>(n)) : value; }

namespace {

template <class EventFn>
PooledExponent pooled_exponent(const EnvironmentModel& model, const ExponentExperiment& exp, EventFn make_event) {
  if (exp.n_grid.size() < 3) throw ConfigError("exponent experiments need at least 3 values of n");
  for (std::size_t i = 1; i < exp.n_grid.size(); ++i)
    if (exp.n_grid[i] <= exp.n_grid[i - 1]) throw ConfigError("nGrid must be strictly increasing");
  if (exp.n_grid.front() < 1) throw ConfigError("nGrid values must be >= 1");
  if (exp.environments < 1) throw ConfigError("environment count must be >= 1");
  const double theta = solve_theta_star(model);
  const SeedTree tree(exp.seed);
  PooledExponent out;
  out.n_grid = exp.n_grid;
  out.quenched = exp.quenched;
  const std::size_t rows = exp.quenched ? exp.environments : 1;
  for (std::size_t e = 0; e < rows; ++e) {
    std::vector<ProportionEstimate> row;
    if (exp.quenched) {
      EnvironmentSequence env = sample_environment(model, exp.n_grid.back(), tree.child_seed(StreamDomain::Environment, e));
      env.attach_tilt(theta);
      for (std::size_t i = 0; i < exp.n_grid.size(); ++i)
        row.push_back(walk_event_probability(env, 0, exp.n_grid[i], make_event(exp.n_grid[i]), exp.replicates,
                                             tree.child_seed(StreamDomain::Walk, e, i), exp.workers));
    } else {
      for (std::size_t i = 0; i < exp.n_grid.size(); ++i)
        row.push_back(annealed_event_probability(model, theta, exp.n_grid[i], make_event(exp.n_grid[i]), exp.replicates,
                                                 tree.child_seed(StreamDomain::Walk, e, i), exp.workers));
    }
    out.cells.push_back(std::move(row));
  }

  std::vector<FitPoint> mean_points;
  for (std::size_t i = 0; i < exp.n_grid.size(); ++i) {
    double p = 0.0, v = 0.0;
    for (const auto& row : out.cells) {
      p += row[i].estimate;
      v += row[i].stderr * row[i].stderr;
      if (row[i].hits == 0) ++out.dropped_cells;
    }
    const double k = static_cast<double>(out.cells.size());
    mean_points.push_back({static_cast<double>(exp.n_grid[i]), p / k, std::sqrt(v) / k});
  }
  out.mean_fit = fit_exponent(mean_points);

  if (!exp.quenched) {
    out.slope = out.mean_fit.slope;
    out.stderr = out.mean_fit.slope_stderr;
    return out;
  }
  RunningStats slopes;
  double se2 = 0.0;
  for (const auto& row : out.cells) {
    std::vector<FitPoint> pts;
    for (std::size_t i = 0; i < exp.n_grid.size(); ++i)
      pts.push_back({static_cast<double>(exp.n_grid[i]), row[i].estimate, row[i].stderr});
    try {
      const ExponentFit f = fit_exponent(pts);
      out.per_environment.push_back(f);
      slopes.add(f.slope);
      se2 += f.slope_stderr * f.slope_stderr;
    } catch (const UnderResolvedError&) {
      ++out.failed_environments;
    }
  }
  if (slopes.count() == 0) throw UnderResolvedError("no environment produced a usable exponent fit");
  const double k = static_cast<double>(slopes.count());
  out.slope = slopes.mean();
  // The larger of the across-environment spread and the mean within-fit error.
  out.stderr = std::sqrt(std::max(slopes.variance() / k, se2 / (k * k)));
  return out;
}

}  // namespace

PooledExponent persistence_exponent(const EnvironmentModel& model, const ExponentExperiment& exp,
                                    const OffsetRule& offset) {
  return pooled_exponent(model, exp, [&](std::size_t n) {
    WalkEvent ev;
    ev.barrier = BarrierSpec::constant(0.0, BarrierSide::StayAbove);
    ev.start = offset.at(n);
    return ev;
  });
}

PooledExponent excursion_exponent(const EnvironmentModel& model, const ExponentExperiment& exp,
                                  const OffsetRule& offset, double alpha) {
  return pooled_exponent(model, exp, [&](std::size_t n) {
    const double x = offset.at(n);
    WalkEvent ev;
    ev.barrier = BarrierSpec::excursion_ceiling(x, alpha);
    ev.final_lo = 0.0;  // x - y with y = x
    return ev;
  });
}

ProportionEstimate llt_window_probability(const EnvironmentModel& model, std::size_t n, double width, double y,
                                          std::uint64_t replicates, std::uint64_t seed, int workers) {
  if (!(width > 0.0)) throw ConfigError("window width must be > 0");
  WalkEvent ev;
  ev.final_lo = y;
  ev.final_hi = y + width;
  return annealed_event_probability(model, solve_theta_star(model), n, ev, replicates, seed, workers);
}

WindowSup llt_sup_window(const EnvironmentModel& model, std::size_t n, double width, std::uint64_t replicates,
                         std::uint64_t seed, int workers) {
  if (!(width > 0.0)) throw ConfigError("window width must be > 0");
  const StepTable steps(model_palette(model), solve_theta_star(model));
  std::vector<double> z = chunked_endpoints(steps, annealed_index(model), n, replicates, seed, workers);
  std::sort(z.begin(), z.end());
  std::size_t best = 0, arg = 0, j = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    j = std::max(j, i);
    while (j < z.size() && z[j] <= z[i] + width) ++j;
    if (j - i > best) {
      best = j - i;
      arg = i;
    }
  }
  return {proportion(best, replicates), z[arg]};
}

LltDecay llt_decay_exponent(const EnvironmentModel& model, const std::vector<std::size_t>& n_grid,
                               const OffsetRule& width, std::uint64_t replicates, std::uint64_t seed, int workers) {
  const SeedTree tree(seed);
  std::vector<FitPoint> pts;
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    const auto s = llt_sup_window(model, n_grid[i], width.at(n_grid[i]), replicates,
                                  tree.child_seed(StreamDomain::Walk, 0, i), workers);
    pts.push_back({static_cast<double>(n_grid[i]), s.probability.estimate, s.probability.stderr});
  }
  LltDecay out{pts, {}};
  out.fit = fit_exponent(pts);
  return out;
}

KolmogorovDecay kolmogorov_decay(const EnvironmentSequence& env, const std::vector<std::size_t>& n_grid,
                                 std::uint64_t replicates, std::uint64_t seed, int workers) {
  require_tilt(env);
  const StepTable steps(env);
  const SeedTree tree(seed);
  KolmogorovDecay out;
  out.n_grid = n_grid;
  std::vector<FitPoint> pts;
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    const std::size_t n = n_grid[i];
    require_horizon(env, 0, n);
    double mean = 0.0, var = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      mean += steps.mean(env.palette_index(j));
      var += steps.variance(env.palette_index(j));
    }
    std::vector<double> z =
        chunked_endpoints(steps, forward_index(env, 0), n, replicates, tree.child_seed(StreamDomain::Walk, 0, i), workers);
    std::sort(z.begin(), z.end());
    const double sd = std::sqrt(var);
    const double r = static_cast<double>(z.size());
    double d = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
      // Compare Phi with the empirical CDF just below and at each order statistic.
      const double phi = normal_cdf((z[k] - mean) / sd);
      const std::size_t lo = static_cast<std::size_t>(std::lower_bound(z.begin(), z.end(), z[k]) - z.begin());
      const std::size_t hi = static_cast<std::size_t>(std::upper_bound(z.begin(), z.end(), z[k]) - z.begin());
      d = std::max({d, std::abs(phi - static_cast<double>(lo) / r), std::abs(static_cast<double>(hi) / r - phi)});
      k = hi - 1;
    }
    out.distance.push_back(d);
    pts.push_back({static_cast<double>(n), d, 0.0});
  }
  out.fit = fit_exponent(pts);
  return out;
}

}  // namespace brwre
