#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "brwre/env.hpp"
#include "brwre/fit.hpp"
#include "brwre/quenched_law.hpp"

namespace brwre {

/// Population control for the particle engine, applied after each generation in this order.
struct PruneConfig {
  /// Kill particles above K_j/theta* + y.
  double upper_offset = std::numeric_limits<double>::infinity();
  /// Kill particles below (current max - w).
  double lower_width = std::numeric_limits<double>::infinity();
  /// Keep only the highest particles when the population exceeds this.
  std::size_t hard_cap = std::numeric_limits<std::size_t>::max();

  void validate() const;
  /// y = 12/theta*, w = 8 log n / theta*, cap = 2^22.
  static PruneConfig defaults(double theta_star, std::size_t n);
  static PruneConfig none() { return {}; }
};

struct PruneLosses {
  std::uint64_t upper = 0;
  std::uint64_t lower = 0;
  std::uint64_t cap = 0;
};

struct GenerationStats {
  std::size_t generation = 0;
  std::size_t born = 0;
  std::size_t alive = 0;
  double max = 0.0;
};

struct MaxDisplacementSample {
  std::size_t n = 0;
  double M = 0.0;
  double K = 0.0;
  double centered = 0.0;  ///< M - K/theta*
  std::uint64_t environment_seed = 0;
  std::uint64_t branching_seed = 0;
  PruneLosses losses;
  /// Some particle went above K_j/theta* + detect_line (checked before pruning).
  bool line_crossed = false;
  /// The upper barrier would have emptied a generation; it was skipped there.
  bool barrier_skipped = false;
};

struct BrwOptions {
  /// Resource guard on the number of children of one generation before pruning.
  std::size_t max_particles = std::size_t{1} << 26;
  bool record_generations = false;
  std::optional<double> detect_line;
  int workers = 1;
};

struct BrwRun {
  MaxDisplacementSample sample;
  std::vector<GenerationStats> generations;
};

/// Particle simulation of generations 1..n of env (tilt attached). Deterministic in seed;
/// independent of options.workers.
BrwRun simulate_brw(const EnvironmentSequence& env, std::size_t n, const PruneConfig& prune, std::uint64_t seed,
                    const BrwOptions& options = {});

enum class MaxEngine {
  Exact,     ///< quenched-law recursion (Gaussian models)
  Particle,  ///< simulate_brw replicates
};

struct LogCorrectionOptions {
  MaxEngine engine = MaxEngine::Exact;
  LawGrid grid;
  std::size_t bootstrap = 200;
  int workers = 1;
};

/// Annealed median of M_n - K_n/theta* against log n.
struct LogCorrectionFit {
  std::vector<std::size_t> n_grid;
  std::vector<double> median;
  std::vector<double> median_stderr;
  LinearFit fit;  ///< median = intercept + slope log n; slope estimates -phi
  double slope = 0.0;
  double slope_stderr = 0.0;
  double bootstrap_stderr = 0.0;
  std::size_t replicates = 0;
  MaxEngine engine = MaxEngine::Exact;
  bool under_resolved = false;
};

/// Exact engine: `replicates` backward-coupled environment paths, each giving the exact
/// quenched law at every n; the annealed law is their average and the slope error comes
/// from a bootstrap over paths. Particle engine: `replicates` fresh (environment, branching)
/// samples per n with the given pruning.
LogCorrectionFit fit_log_correction(const EnvironmentModel& model, const std::vector<std::size_t>& n_grid,
                                    std::size_t replicates, const PruneConfig& prune, std::uint64_t seed,
                                    const LogCorrectionOptions& options = {});

struct QuenchedMedianTrace {
  std::size_t n = 0;
  std::vector<double> centered_median;  ///< per environment, m^Q_n - K_n/theta*
  std::vector<double> median_stderr;    ///< 0 for the exact engine
  double mean = 0.0;
  double spread = 0.0;  ///< standard deviation across environments
};

QuenchedMedianTrace quenched_median_trace(const EnvironmentModel& model, std::size_t n, std::size_t environments,
                                          std::size_t branching_replicates, const PruneConfig& prune,
                                          std::uint64_t seed, const LogCorrectionOptions& options = {});

struct BarrierCount {
  double count = 0.0;  ///< Y_n(beta); a weighted count when roulette is on
  std::size_t population = 0;
  std::uint64_t upper_kills = 0;
  bool roulette = false;
  double predicted_mean = 0.0;  ///< many-to-one estimate of E_L Y_n(beta)
  double predicted_stderr = 0.0;
};

struct BarrierCountOptions {
  std::uint64_t walk_replicates = 100000;
  /// 0: exact branching with a resource error past max_particles. Otherwise particles are
  /// thinned by an importance roulette to about this many per generation, which keeps the
  /// count unbiased in expectation.
  std::size_t roulette_population = 0;
  std::size_t max_particles = std::size_t{1} << 24;
};

/// Particles with theta* V(u) - K_n >= -beta theta* log n that stayed below (K_j + log n)/theta*.
BarrierCount count_barrier_particles(const EnvironmentSequence& env, std::size_t n, double beta, std::uint64_t seed,
                                     const BarrierCountOptions& options = {});

/// E_L[e^{-T_n} 1{T_n >= -beta theta* log n} 1{T_j <= log n, j <= n}] by tilted-walk Monte Carlo.
std::pair<double, double> barrier_count_mean(const EnvironmentSequence& env, std::size_t n, double beta,
                                             std::uint64_t replicates, std::uint64_t seed);

struct TrimmedGrowth {
  double rho_hat = 0.0;
  double stderr = 0.0;
  /// exp(E log m_A), the growth rate of the trimmed branching process in random environment.
  double rho_theory = 0.0;
  std::vector<double> mean_offspring;  ///< trimmed mean offspring per atom
  std::size_t extinct = 0;
  std::size_t replicates = 0;
};

/// Tree without jumps below -A and with at most A children (the highest) per parent.
/// Throws ConfigError when the trimmed process cannot grow.
TrimmedGrowth trimmed_growth_rate(const EnvironmentModel& model, int A, const std::vector<std::size_t>& n_grid,
                                  std::size_t replicates, std::uint64_t seed, int workers = 1);

struct FrontierRate {
  double y = 0.0;
  double rate = 0.0;
  double stderr = 0.0;
  double bound = 0.0;  ///< e^{-theta* y}
  bool pass = false;   ///< rate <= bound + 3 stderr
};

/// Annealed P(exists u: V(u) > K_|u|/theta* + y, |u| <= n): the exact quenched probability
/// per environment (Gaussian models), averaged over environments.
std::vector<FrontierRate> frontier_violation_rate(const EnvironmentModel& model, std::size_t n,
                                                  const std::vector<double>& y_grid, std::size_t environments,
                                                  std::uint64_t seed, const LawGrid& grid = {}, int workers = 1);

}  // namespace brwre
