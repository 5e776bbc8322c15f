#include "brwre/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "brwre/errors.hpp"
#include "brwre/parallel.hpp"
#include "brwre/rng.hpp"
#include "brwre/stats.hpp"

namespace brwre {

namespace {

std::vector<std::size_t> grid_steps(const GammaOptions& o) {
  if (o.t_grid.empty()) throw ConfigError("gamma: tGrid is empty");
  if (!(o.dt > 0.0) || !std::isfinite(o.dt)) throw ConfigError("gamma: dt must be > 0");
  if (o.n_w < 1 || o.n_b < 1) throw ConfigError("gamma: nW and nB must be >= 1");
  if (!(o.beta >= 0.0) || !std::isfinite(o.beta)) throw ConfigError("gamma: beta must be >= 0");
  if (!(o.drop_fraction >= 0.0 && o.drop_fraction < 1.0)) throw ConfigError("gamma: drop fraction must lie in [0,1)");
  std::vector<std::size_t> steps;
  for (std::size_t i = 0; i < o.t_grid.size(); ++i) {
    const double t = o.t_grid[i];
    if (!(t > 0.0) || (i > 0 && !(t > o.t_grid[i - 1]))) throw ConfigError("gamma: tGrid must be positive and strictly increasing");
    const double m = std::floor(t / o.dt + 1e-9);
    if (m < 1.0) throw ConfigError("gamma: every grid time must be at least one step dt");
    if (m > static_cast<double>(o.max_steps))
      throw ResourceError("gamma: max(tGrid)/dt exceeds the path memory budget of " + std::to_string(o.max_steps) + " steps");
    steps.push_back(static_cast<std::size_t>(m));
    if (i > 0 && steps[i] == steps[i - 1]) throw ConfigError("gamma: two grid times fall on the same Euler step");
  }
  return steps;
}

std::vector<double> brownian_path(RandomStream rng, std::size_t steps, double dt) {
  std::vector<double> w(steps + 1, 0.0);
  const double s = std::sqrt(dt);
  for (std::size_t k = 1; k <= steps; ++k) w[k] = w[k - 1] + s * rng.normal();
  return w;
}

// First Euler step at which B drops below floor[k] (k >= 1), or steps + 1 if it never does.
std::size_t first_exit(RandomStream rng, const std::vector<double>& floor, std::size_t steps, double sdt) {
  double b = 0.0;
  for (std::size_t k = 1; k <= steps; ++k) {
    b += sdt * rng.normal();
    if (b < floor[k]) return k;
  }
  return steps + 1;
}

struct ReplicateResult {
  std::vector<double> survival;  // per grid time
  double gamma = std::numeric_limits<double>::quiet_NaN();
  ExponentFit fit;
  std::size_t cells = 0;
  std::size_t dropped = 0;
};

ReplicateResult fit_replicate(const GammaOptions& o, const std::vector<std::uint64_t>& alive) {
  ReplicateResult r;
  for (auto a : alive) r.survival.push_back(static_cast<double>(a) / static_cast<double>(o.n_b));
  const std::size_t skip = static_cast<std::size_t>(std::floor(o.drop_fraction * static_cast<double>(o.t_grid.size())));
  std::vector<FitPoint> pts;
  for (std::size_t i = skip; i < o.t_grid.size(); ++i) {
    const auto p = proportion(alive[i], o.n_b);
    ++r.cells;
    if (p.hits == 0) {
      ++r.dropped;
      continue;
    }
    pts.push_back({o.t_grid[i], p.estimate, p.stderr});
  }
  if (pts.size() >= 3) {
    r.fit = fit_exponent(pts);
    r.gamma = -r.fit.slope;
  }
  return r;
}

GammaEstimate pool(const GammaOptions& o, std::vector<ReplicateResult> reps, bool backward) {
  GammaEstimate e;
  e.beta = o.beta;
  e.dt = o.dt;
  e.t_grid = o.t_grid;
  e.backward = backward;
  RunningStats g;
  std::vector<RunningStats> surv(o.t_grid.size());
  for (const auto& r : reps) {
    e.cells_total += r.cells;
    e.cells_dropped += r.dropped;
    e.replicate_gamma.push_back(r.gamma);
    for (std::size_t i = 0; i < surv.size(); ++i) surv[i].add(r.survival[i]);
    if (std::isnan(r.gamma)) {
      ++e.failed_replicates;
      continue;
    }
    e.fits.push_back(r.fit);
    g.add(r.gamma);
  }
  for (const auto& s : surv) {
    e.mean_survival.push_back(s.mean());
    e.mean_survival_stderr.push_back(s.stderr_of_mean());
  }
  e.under_resolved = e.cells_total == 0 || static_cast<double>(e.cells_dropped) > 0.2 * static_cast<double>(e.cells_total);
  if (g.count() == 0) throw UnderResolvedError("gamma: no W replicate had 3 usable cells");
  e.gamma_hat = g.mean();
  // A single replicate has no spread; fall back to its own fit error.
  e.stderr = g.count() > 1 ? g.stderr_of_mean() : e.fits.front().slope_stderr;
  if (!(e.stderr > 0.0)) e.stderr = e.fits.front().slope_stderr;
  if (e.gamma_hat < 0.0) e.under_resolved = true;
  return e;
}

}  // namespace

GammaEstimate estimate_gamma(const GammaOptions& o) {
  const auto steps = grid_steps(o);
  const std::size_t horizon = steps.back();
  const SeedTree tree(o.seed);
  const double sdt = std::sqrt(o.dt);
  auto reps = parallel_map<ReplicateResult>(o.n_w, o.workers, [&](std::size_t w) {
    std::vector<double> floor = brownian_path(tree.stream(StreamDomain::GammaWall, w), horizon, o.dt);
    for (double& f : floor) f = o.beta * f - 1.0;
    std::vector<std::uint64_t> alive(steps.size(), 0);
    for (std::size_t j = 0; j < o.n_b; ++j) {
      const std::size_t tau = first_exit(tree.stream(StreamDomain::GammaPath, w, j), floor, horizon, sdt);
      for (std::size_t i = 0; i < steps.size() && steps[i] < tau; ++i) ++alive[i];
    }
    return fit_replicate(o, alive);
  });
  return pool(o, std::move(reps), false);
}

GammaEstimate estimate_gamma_backward(const GammaOptions& o) {
  const auto steps = grid_steps(o);
  const std::size_t horizon = steps.back();
  const SeedTree tree(o.seed);
  const double sdt = std::sqrt(o.dt);
  auto reps = parallel_map<ReplicateResult>(o.n_w, o.workers, [&](std::size_t w) {
    const std::vector<double> wpath = brownian_path(tree.stream(StreamDomain::GammaWall, w), horizon, o.dt);
    std::vector<std::uint64_t> alive(steps.size(), 0);
    std::vector<double> floor(horizon + 1, 0.0);
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const std::size_t m = steps[i];
      for (std::size_t k = 1; k <= m; ++k) floor[k] = o.beta * (wpath[m] - wpath[m - k]) - 1.0;
      for (std::size_t j = 0; j < o.n_b; ++j) {
        // Path streams are indexed by (replicate, grid time, path) so each barrier gets fresh B noise.
        const std::size_t tau = first_exit(tree.stream(StreamDomain::GammaPath, w, (i << 32) | j), floor, m, sdt);
        if (tau > m) ++alive[i];
      }
    }
    return fit_replicate(o, alive);
  });
  return pool(o, std::move(reps), true);
}

}  // namespace brwre
