#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "brwre/env.hpp"
#include "brwre/fit.hpp"
#include "brwre/stats.hpp"

namespace brwre {

/// Sampler for the increments theta X_j - kappa_j(theta) of the tilted walk T,
/// one entry per palette law.
class StepTable {
 public:
  StepTable(const std::vector<PointProcessLaw>& palette, double theta);
  /// Palette of an environment with a tilt attached.
  explicit StepTable(const EnvironmentSequence& env);

  double sample(std::size_t p, RandomStream& rng) const noexcept {
    const Entry& e = entries_[p];
    if (e.gaussian) return e.mean + e.sd * rng.normal();
    return sample_discrete(e, rng.uniform());
  }
  double mean(std::size_t p) const noexcept { return entries_[p].mean; }
  double variance(std::size_t p) const noexcept { return entries_[p].sd * entries_[p].sd; }
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  struct Entry {
    bool gaussian = true;
    double mean = 0.0;
    double sd = 0.0;
    std::vector<double> values;
    std::vector<double> cumulative;
  };
  static double sample_discrete(const Entry& e, double u) noexcept;
  std::vector<Entry> entries_;
};

struct WalkPath {
  std::size_t offset = 0;
  std::vector<double> values;  ///< T_0 = 0, ..., T_m
};

/// One path of T over generations offset+1 .. offset+m. Requires a tilt on env.
WalkPath sample_walk(const EnvironmentSequence& env, std::size_t offset, std::size_t m, std::uint64_t seed);

/// Exact E_L(T_{offset+m} - T_offset) = sum of theta kappa_j' - kappa_j over the segment.
double quenched_mean(const EnvironmentSequence& env, std::size_t offset, std::size_t m);

enum class BarrierSide { StayBelow, StayAbove };

/// A barrier level L_j, j = 1..n, the walk must respect on one side.
struct BarrierSpec {
  struct Constant {
    double level = 0.0;
  };
  /// L_j = x - min(j, n-j)^alpha.
  struct ExcursionCeiling {
    double x = 0.0;
    double alpha = 0.0;
  };
  /// L_k = -theta* r_{n,k} with r_{n,k} = k^{1/3} - delta log n for k <= n/2 and
  /// (n-k)^{1/3} + (phi - delta) log n afterwards.
  struct ProofShape {
    double delta = 0.0;
    double phi = 0.0;
    double theta_star = 1.0;
  };

  std::variant<Constant, ExcursionCeiling, ProofShape> shape = Constant{};
  BarrierSide side = BarrierSide::StayBelow;

  static BarrierSpec constant(double level, BarrierSide side);
  static BarrierSpec excursion_ceiling(double x, double alpha);
  static BarrierSpec proof_shape(double delta, double phi, double theta_star);

  /// Throws ConfigError for alpha outside [0, 1/2).
  void validate() const;
  double level(std::size_t j, std::size_t n) const;
  std::vector<double> levels(std::size_t n) const;  ///< index j = 0..n; entry 0 unused
};

/// start + (+/-)T_j checked against the barrier for j = 1..n; optional final window on start + T_n.
struct WalkEvent {
  std::optional<BarrierSpec> barrier;
  double start = 0.0;
  std::optional<double> final_lo;
  std::optional<double> final_hi;
  bool negate = false;
  /// Use the increments of generations offset+n, ..., offset+1 (time-reversed walk).
  bool reversed = false;
};

/// Monte Carlo P_L(event) on the fixed environment; deterministic in seed and independent of workers.
ProportionEstimate walk_event_probability(const EnvironmentSequence& env, std::size_t offset, std::size_t n,
                                          const WalkEvent& event, std::uint64_t replicates, std::uint64_t seed,
                                          int workers = 1);

/// Same event under the annealed law (a fresh environment per replicate).
ProportionEstimate annealed_event_probability(const EnvironmentModel& model, double theta, std::size_t n,
                                              const WalkEvent& event, std::uint64_t replicates,
                                              std::uint64_t seed, int workers = 1);

/// P_L(T_n >= x - y, T_j <= L_j for j <= n) with L from a stay-below barrier.
/// Requires 0 <= y <= x. Zero hits give estimate 0 and a one-sided upper bound.
ProportionEstimate excursion_probability(const EnvironmentSequence& env, std::size_t n, double x, double y,
                                         const BarrierSpec& barrier, std::uint64_t replicates,
                                         std::uint64_t seed, int workers = 1);

/// Probability for That_j = T_m - T_{m-j} (m = offset + n), negated when `negate`;
/// the barrier is applied to start + That_j. n = 0 gives 1.
ProportionEstimate reversed_persistence(const EnvironmentSequence& env, std::size_t n, std::size_t offset,
                                        double start, const BarrierSpec& barrier, bool negate,
                                        std::uint64_t replicates, std::uint64_t seed, int workers = 1);

/// How an offset x_n is chosen for each n of a grid.
struct OffsetRule {
  double value = 2.0;
  bool log_n = false;  ///< x_n = log n instead of the fixed value
  double at(std::size_t n) const;
};

/// Exponent fit pooled over environments: per-environment fits in quenched mode,
/// a single fit on the annealed probabilities otherwise.
struct PooledExponent {
  double slope = 0.0;
  double stderr = 0.0;
  std::vector<ExponentFit> per_environment;
  ExponentFit mean_fit;  ///< fit of the environment-averaged probabilities
  std::vector<std::size_t> n_grid;
  std::vector<std::vector<ProportionEstimate>> cells;  ///< [environment][n]
  std::size_t dropped_cells = 0;
  std::size_t failed_environments = 0;
  bool quenched = true;
};

struct ExponentExperiment {
  std::vector<std::size_t> n_grid;
  std::uint64_t replicates = 1'000'000;
  std::size_t environments = 5;
  bool quenched = true;
  std::uint64_t seed = 1;
  int workers = 1;
};

/// P(x_n + T_j >= 0, j <= n) across n; slope approximates -gamma(sigma_A / sigma_Q).
PooledExponent persistence_exponent(const EnvironmentModel& model, const ExponentExperiment& exp,
                                    const OffsetRule& offset);

/// Excursion probability with x = y = offset and ceiling exponent alpha, across n;
/// slope approximates -(2 gamma + 1/2).
PooledExponent excursion_exponent(const EnvironmentModel& model, const ExponentExperiment& exp,
                                  const OffsetRule& offset, double alpha);

/// Annealed P(T_n in [y, y + width]).
ProportionEstimate llt_window_probability(const EnvironmentModel& model, std::size_t n, double width, double y,
                                          std::uint64_t replicates, std::uint64_t seed, int workers = 1);

struct WindowSup {
  ProportionEstimate probability;
  double argmax_y = 0.0;
};

/// Annealed sup_y of the empirical P(T_n in [y, y + width]) from one sample of endpoints.
WindowSup llt_sup_window(const EnvironmentModel& model, std::size_t n, double width, std::uint64_t replicates,
                         std::uint64_t seed, int workers = 1);

struct LltDecay {
  std::vector<FitPoint> points;  ///< (n, sup-window probability, stderr)
  ExponentFit fit;
};

/// Slope of log sup_y P(T_n in [y, y + x_n]) on log n.
LltDecay llt_decay_exponent(const EnvironmentModel& model, const std::vector<std::size_t>& n_grid,
                               const OffsetRule& width, std::uint64_t replicates, std::uint64_t seed,
                               int workers = 1);

/// Kolmogorov distance between (T_n - E_L T_n)/sqrt(Var_L T_n) and N(0,1) on a fixed
/// environment, per n, with its log-log fit.
struct KolmogorovDecay {
  std::vector<std::size_t> n_grid;
  std::vector<double> distance;
  ExponentFit fit;
};
KolmogorovDecay kolmogorov_decay(const EnvironmentSequence& env, const std::vector<std::size_t>& n_grid,
                                 std::uint64_t replicates, std::uint64_t seed, int workers = 1);

}  // namespace brwre
