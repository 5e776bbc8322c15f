#include "brwre/run.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "brwre/analytics.hpp"
#include "brwre/brw.hpp"
#include "brwre/errors.hpp"
#include "brwre/gamma.hpp"
#include "brwre/parallel.hpp"
#include "brwre/rwre.hpp"
#include "brwre/stats.hpp"
#include "brwre/verify.hpp"

#ifndef BRWRE_VERSION
#define BRWRE_VERSION "unknown"
#endif

namespace brwre {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void expect_slope(SimulationReport& r, const std::optional<double>& expected, double tolerance, double slope) {
  if (!expected) return;
  const bool pass = std::abs(slope - *expected) <= tolerance;
  r.verdicts.push_back({"slope", pass, "slope " + fmt(slope) + " vs " + fmt(*expected) + " +/- " + fmt(tolerance)});
}

double beta_ratio(const EnvironmentModel& model) {
  try {
    return annealed_summary(model, 0.0).beta();
  } catch (const NumericError&) {
    return NAN;
  }
}

void run_analyze(const ExperimentConfig& c, SimulationReport& r) {
  const auto model = c.model();
  const auto s = annealed_summary(model, c.analyze.gamma_hat);
  auto& res = r.results;
  res["thetaStar"] = exact(s.theta_star);
  res["speed"] = exact(s.speed);
  res["sigmaQ2"] = exact(s.sigma_q2);
  res["sigmaA2"] = exact(s.sigma_a2);
  res["betaRatio"] = exact(s.beta());
  res["gammaHat"] = exact(s.gamma_hat);
  res["lambda"] = exact(s.lambda);
  res["phi"] = exact(s.phi);
  const auto si = speed_inequality_report(model);
  res["meanAtomSpeed"] = exact(si.mean_atom_speed);
  res["speedGap"] = exact(si.speed - si.mean_atom_speed);
  res["atomSpeeds"] = si.atom_speeds;
  res["strictSpeedInequality"] = si.strict;
  const bool expected_strict = s.sigma_a2 > 0.0;
  r.verdicts.push_back({"speed inequality", si.strict == expected_strict,
                        "v - E(v_1) = " + fmt(si.speed - si.mean_atom_speed) + ", sigma_A^2 = " + fmt(s.sigma_a2)});
}

void run_gamma(const ExperimentConfig& c, int workers, SimulationReport& r) {
  const SeedTree tree(*c.seed);
  ResultTable gamma{"gamma", {"beta"}, {}};
  ResultTable survival{"survival", {"beta", "t"}, {}};
  json per = json::array();
  std::vector<GammaEstimate> ests;
  for (std::size_t k = 0; k < c.gamma.beta.size(); ++k) {
    GammaOptions o;
    o.beta = c.gamma.beta[k];
    o.t_grid = c.gamma.t_grid;
    o.dt = c.gamma.dt;
    o.n_w = c.gamma.n_w;
    o.n_b = c.gamma.n_b;
    o.drop_fraction = c.gamma.drop_fraction;
    o.seed = tree.child_seed(StreamDomain::GammaWall, k);
    o.workers = workers;
    GammaEstimate e = c.gamma.backward ? estimate_gamma_backward(o) : estimate_gamma(o);
    gamma.add({e.beta}, e.gamma_hat, e.stderr, c.gamma.n_w);
    for (std::size_t i = 0; i < e.t_grid.size(); ++i)
      survival.add({e.beta, e.t_grid[i]}, e.mean_survival[i], e.mean_survival_stderr[i], c.gamma.n_w * c.gamma.n_b);
    per.push_back({{"beta", e.beta},
                   {"gamma", estimate(e.gamma_hat, e.stderr)},
                   {"replicates", c.gamma.n_w},
                   {"cellsTotal", e.cells_total},
                   {"cellsDropped", e.cells_dropped},
                   {"failedReplicates", e.failed_replicates},
                   {"underResolved", e.under_resolved}});
    r.under_resolved = r.under_resolved || e.under_resolved;
    ests.push_back(std::move(e));
  }
  r.results["perBeta"] = per;
  if (ests.size() == 1) r.results["gamma"] = estimate(ests[0].gamma_hat, ests[0].stderr);
  for (std::size_t k = 1; k < ests.size(); ++k) {
    const double d = ests[k].gamma_hat - ests[k - 1].gamma_hat;
    const double se = std::hypot(ests[k].stderr, ests[k - 1].stderr);
    r.verdicts.push_back({"nondecreasing beta=" + fmt(ests[k - 1].beta) + "->" + fmt(ests[k].beta), d >= -2.0 * se,
                          "difference " + fmt(d) + ", pooled stderr " + fmt(se)});
  }
  r.tables = {gamma, survival};
}

void add_pooled(SimulationReport& r, const PooledExponent& p, std::uint64_t replicates) {
  r.results["slope"] = estimate(p.slope, p.stderr);
  r.results["meanFitSlope"] = estimate(p.mean_fit.slope, p.mean_fit.slope_stderr);
  json per = json::array();
  for (const auto& f : p.per_environment) per.push_back(estimate(f.slope, f.slope_stderr));
  r.results["perEnvironment"] = per;
  r.results["droppedCells"] = p.dropped_cells;
  r.results["failedEnvironments"] = p.failed_environments;
  ResultTable cells{"cells", {"environment", "n"}, {}};
  for (std::size_t e = 0; e < p.cells.size(); ++e)
    for (std::size_t i = 0; i < p.cells[e].size(); ++i)
      cells.add({e, p.n_grid[i]}, p.cells[e][i].estimate, p.cells[e][i].stderr, replicates);
  r.tables.push_back(cells);
  if (p.dropped_cells > 0 || p.failed_environments > 0) r.under_resolved = true;
}

void run_ballot(const ExperimentConfig& c, int workers, SimulationReport& r) {
  const auto model = c.model();
  const auto& b = c.ballot;
  r.results["betaRatio"] = exact(beta_ratio(model));
  const OffsetRule offset{b.offset, b.log_offset};
  ExponentExperiment exp;
  exp.n_grid = b.n_grid;
  exp.replicates = b.replicates;
  exp.environments = b.environments;
  exp.quenched = b.quenched;
  exp.seed = *c.seed;
  exp.workers = workers;
  double slope = 0.0;
  if (b.test == "excursion") {
    const auto p = excursion_exponent(model, exp, offset, b.alpha);
    add_pooled(r, p, b.replicates);
    slope = p.slope;
  } else if (b.test == "persistence") {
    const auto p = persistence_exponent(model, exp, offset);
    add_pooled(r, p, b.replicates);
    slope = p.slope;
  } else if (b.test == "llt") {
    const auto d = llt_decay_exponent(model, b.n_grid, offset, b.replicates, *c.seed, workers);
    r.results["slope"] = estimate(d.fit.slope, d.fit.slope_stderr);
    r.results["r2"] = d.fit.r2;
    ResultTable t{"window", {"n"}, {}};
    for (const auto& p : d.points) t.add({static_cast<std::uint64_t>(p.n)}, p.estimate, p.stderr, b.replicates);
    r.tables.push_back(t);
    slope = d.fit.slope;
  } else {
    const SeedTree tree(*c.seed);
    auto env = sample_environment(model, b.n_grid.back(), tree.child_seed(StreamDomain::Environment));
    env.attach_tilt(solve_theta_star(model));
    const auto k = kolmogorov_decay(env, b.n_grid, b.replicates, tree.child_seed(StreamDomain::Walk), workers);
    r.results["slope"] = estimate(k.fit.slope, k.fit.slope_stderr);
    // Sampling scale of a Kolmogorov statistic from R draws.
    const double se = 1.0 / std::sqrt(static_cast<double>(b.replicates));
    ResultTable t{"kolmogorov", {"n"}, {}};
    for (std::size_t i = 0; i < k.n_grid.size(); ++i) t.add({k.n_grid[i]}, k.distance[i], se, b.replicates);
    r.tables.push_back(t);
    slope = k.fit.slope;
  }
  expect_slope(r, b.expect_slope, b.tolerance, slope);
}

PruneConfig prune_for(const ExperimentConfig& c, double theta, std::size_t n) {
  return c.brw.prune ? *c.brw.prune : PruneConfig::defaults(theta, n);
}

void run_brw(const ExperimentConfig& c, int workers, SimulationReport& r) {
  const auto model = c.model();
  const auto& b = c.brw;
  const SeedTree tree(*c.seed);
  const double theta = solve_theta_star(model);
  r.results["thetaStar"] = exact(theta);
  r.results["betaRatio"] = exact(beta_ratio(model));
  const std::size_t n = b.n_grid.back();
  LogCorrectionOptions lo;
  lo.engine = b.engine;
  lo.grid = b.grid;
  lo.bootstrap = b.bootstrap;
  lo.workers = workers;

  if (b.test == "logCorrection") {
    const auto f = fit_log_correction(model, b.n_grid, b.replicates, prune_for(c, theta, n), *c.seed, lo);
    r.results["slope"] = estimate(f.slope, f.slope_stderr);
    r.results["intercept"] = estimate(f.fit.intercept, f.fit.intercept_stderr);
    r.results["fitSlopeStderr"] = f.fit.slope_stderr;
    r.results["bootstrapStderr"] = f.bootstrap_stderr;
    r.results["r2"] = f.fit.r2;
    ResultTable t{"medians", {"n"}, {}};
    for (std::size_t i = 0; i < f.n_grid.size(); ++i) t.add({f.n_grid[i]}, f.median[i], f.median_stderr[i], f.replicates);
    r.tables.push_back(t);
    r.under_resolved = f.under_resolved;
    expect_slope(r, b.expect_slope, b.tolerance, f.slope);
  } else if (b.test == "trace") {
    const auto q = quenched_median_trace(model, n, b.environments, b.replicates, prune_for(c, theta, n), *c.seed, lo);
    r.results["n"] = n;
    r.results["mean"] = estimate(q.mean, q.spread / std::sqrt(static_cast<double>(b.environments)));
    r.results["spread"] = q.spread;
    ResultTable t{"quenched_medians", {"environment"}, {}};
    for (std::size_t e = 0; e < q.centered_median.size(); ++e)
      t.add({e}, q.centered_median[e], q.median_stderr[e], b.engine == MaxEngine::Exact ? 0 : b.replicates);
    r.tables.push_back(t);
  } else if (b.test == "frontier") {
    const auto rates = frontier_violation_rate(model, n, b.y_grid, b.environments, *c.seed, b.grid, workers);
    ResultTable t{"frontier", {"y"}, {}};
    for (const auto& f : rates) {
      t.add({f.y}, f.rate, f.stderr, b.environments);
      r.verdicts.push_back({"frontier y=" + fmt(f.y), f.pass,
                            "rate " + fmt(f.rate) + " +/- " + fmt(f.stderr) + ", bound " + fmt(f.bound)});
    }
    r.tables.push_back(t);
  } else if (b.test == "trimmed") {
    ResultTable t{"trimmed", {"A"}, {}};
    json per = json::array();
    double last = 0.0, last_se = 0.0;
    for (std::size_t k = 0; k < b.trimmed_a.size(); ++k) {
      const int A = b.trimmed_a[k];
      const auto g = trimmed_growth_rate(model, A, b.n_grid, b.replicates,
                                         tree.child_seed(StreamDomain::Branching, static_cast<std::uint64_t>(A)), workers);
      t.add({A}, g.rho_hat, g.stderr, g.replicates);
      per.push_back({{"A", A}, {"rho", estimate(g.rho_hat, g.stderr)}, {"rhoTheory", exact(g.rho_theory)},
                     {"extinct", g.extinct}});
      r.verdicts.push_back({"rho_A > 1 for A=" + std::to_string(A), g.rho_hat > 1.0, "rho " + fmt(g.rho_hat)});
      if (k > 0)
        r.verdicts.push_back({"rho nondecreasing to A=" + std::to_string(A),
                              g.rho_hat - last >= -2.0 * std::hypot(g.stderr, last_se),
                              fmt(last) + " -> " + fmt(g.rho_hat)});
      last = g.rho_hat;
      last_se = g.stderr;
    }
    r.results["perA"] = per;
    r.tables.push_back(t);
  } else if (b.test == "barrierCount") {
    auto env = sample_environment(model, n, tree.child_seed(StreamDomain::Environment));
    env.attach_tilt(theta);
    BarrierCountOptions bo;
    bo.walk_replicates = b.walk_replicates;
    bo.roulette_population = b.roulette_population;
    const auto predicted = barrier_count_mean(env, n, b.beta, b.walk_replicates, tree.child_seed(StreamDomain::Walk));
    const auto counts = parallel_map<double>(b.replicates, workers, [&](std::size_t k) {
      BarrierCountOptions o = bo;
      o.walk_replicates = 2;  // the prediction is computed once above
      return count_barrier_particles(env, n, b.beta, tree.child_seed(StreamDomain::Branching, k), o).count;
    });
    const auto m = mean_estimate(counts);
    r.results["n"] = n;
    r.results["count"] = estimate(m.mean, m.stderr);
    r.results["predicted"] = estimate(predicted.first, predicted.second);
    const double se = std::hypot(m.stderr, predicted.second);
    r.verdicts.push_back({"many-to-one mean", std::abs(m.mean - predicted.first) <= 3.0 * se,
                          "count " + fmt(m.mean) + " vs predicted " + fmt(predicted.first) + ", stderr " + fmt(se)});
    ResultTable t{"barrier_count", {"n", "quantity"}, {}};
    t.add({n, "count"}, m.mean, m.stderr, b.replicates);
    t.add({n, "predicted"}, predicted.first, predicted.second, b.walk_replicates);
    r.tables.push_back(t);
  } else {
    const PruneConfig prune = prune_for(c, theta, n);
    struct One {
      double centered;
      PruneLosses losses;
      bool skipped;
    };
    const auto runs = parallel_map<One>(b.replicates, workers, [&](std::size_t k) {
      auto env = sample_environment(model, n, tree.child_seed(StreamDomain::Environment, k));
      env.attach_tilt(theta);
      BrwOptions o;
      o.workers = 1;
      const auto s = simulate_brw(env, n, prune, tree.child_seed(StreamDomain::Branching, k), o).sample;
      return One{s.centered, s.losses, s.barrier_skipped};
    });
    std::vector<double> centered;
    PruneLosses total;
    std::size_t skipped = 0;
    for (const auto& o : runs) {
      centered.push_back(o.centered);
      total.upper += o.losses.upper;
      total.lower += o.losses.lower;
      total.cap += o.losses.cap;
      skipped += o.skipped ? 1 : 0;
    }
    const auto m = mean_estimate(centered);
    r.results["n"] = n;
    r.results["median"] = estimate(median(centered), median_stderr(centered));
    r.results["mean"] = estimate(m.mean, m.stderr);
    r.results["losses"] = {{"upper", total.upper}, {"lower", total.lower}, {"cap", total.cap}};
    r.results["barrierSkipped"] = skipped;
    ResultTable t{"centered_max", {"n", "statistic"}, {}};
    t.add({n, "median"}, median(centered), median_stderr(centered), b.replicates);
    t.add({n, "mean"}, m.mean, m.stderr, b.replicates);
    r.tables.push_back(t);
  }
}

void run_verify(const ExperimentConfig& c, int workers, SimulationReport& r) {
  const auto& v = c.verify;
  if (v.catalogue) {
    const auto cat = instance_catalogue();
    const auto checks = parallel_map<ManyToOneCheck>(cat.size(), workers, [&](std::size_t i) { return verify_many_to_one(cat[i]); });
    ResultTable t{"many_to_one", {"instance"}, {}};
    std::size_t ok = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < cat.size(); ++i) {
      t.add({cat[i].label}, checks[i].gap, 0.0, 1);
      ok += checks[i].gap <= 1e-12 ? 1 : 0;
      worst = std::max(worst, checks[i].gap);
    }
    r.results["manyToOne"] = {{"instances", cat.size()}, {"passed", ok}, {"worstGap", exact(worst)}};
    r.verdicts.push_back({"many-to-one", ok == cat.size(),
                          std::to_string(ok) + "/" + std::to_string(cat.size()) + " instances, worst gap " + fmt(worst)});
    r.tables.push_back(t);

    ResultTable f{"frontier_exact", {"instance", "y", "bound"}, {}};
    std::size_t held = 0, total = 0;
    for (const auto& in : cat) {
      if (in.f.kind != PathFunctional::Kind::One) continue;  // the functional plays no part here
      for (double y : v.frontier_y) {
        const auto fc = exact_frontier_probability(in, y);
        f.add({in.label, y, fc.bound}, fc.probability, 0.0, 1);
        held += fc.holds ? 1 : 0;
        ++total;
      }
    }
    r.results["frontierExact"] = {{"checks", total}, {"held", held}};
    r.verdicts.push_back({"exact frontier bound", held == total, std::to_string(held) + "/" + std::to_string(total)});
    r.tables.push_back(f);
  }
  if (v.dekking_host) {
    const auto model = c.model();
    DekkingHostOptions o;
    o.engine = v.dh_engine;
    o.branching_replicates = v.dh_branching_replicates;
    o.workers = workers;
    const auto dh = dekking_host_check(model, v.dh_n_grid, v.dh_environments, *c.seed, o);
    r.results["dekkingHost"] = {{"C", exact(dh.C)}};
    ResultTable t{"dekking_host", {"n", "quantity"}, {}};
    for (const auto& row : dh.rows) {
      t.add({row.n, "lhs"}, row.lhs, row.lhs_stderr, v.dh_environments);
      t.add({row.n, "rhs"}, row.rhs, row.rhs_stderr, v.dh_environments);
      t.add({row.n, "slack"}, row.slack, row.slack_stderr, v.dh_environments);
      r.verdicts.push_back({"Dekking-Host n=" + std::to_string(row.n), row.pass,
                            "slack " + fmt(row.slack) + " +/- " + fmt(row.slack_stderr)});
    }
    r.tables.push_back(t);
  }
}

void run_report(const ExperimentConfig& c, SimulationReport& r) {
  std::vector<json> inputs;
  for (const auto& p : c.report.inputs) inputs.push_back(read_report(p));
  SimulationReport agg = aggregate_reports(inputs);
  r.results = agg.results;
  r.tables = agg.tables;
}

}  // namespace

const char* version() { return BRWRE_VERSION; }

SimulationReport run(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const int workers = resolve_workers(config.workers);
  SimulationReport r;
  r.kind = to_string(config.kind);
  r.config = config.echo();
  switch (config.kind) {
    case ExperimentKind::Analyze:
      run_analyze(config, r);
      break;
    case ExperimentKind::Gamma:
      run_gamma(config, workers, r);
      break;
    case ExperimentKind::Ballot:
      run_ballot(config, workers, r);
      break;
    case ExperimentKind::Brw:
      run_brw(config, workers, r);
      break;
    case ExperimentKind::Verify:
      run_verify(config, workers, r);
      break;
    case ExperimentKind::Report:
      run_report(config, r);
      break;
  }
  r.provenance.seed = *config.seed;
  r.provenance.version = version();
  r.provenance.workers = workers;
  r.provenance.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace brwre
