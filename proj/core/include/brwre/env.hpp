#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "brwre/rng.hpp"

namespace brwre {

/// b children, each displaced independently by N(drift, sigma^2).
struct GaussianBranching {
  int children = 2;
  double drift = 0.0;
  double sigma = 1.0;
};

/// One outcome of a finite-support point process: with probability `weight`
/// the parent has displacements.size() children at the listed offsets.
struct MixtureOutcome {
  double weight = 1.0;
  std::vector<double> displacements;
};

struct DiscreteMixture {
  std::vector<MixtureOutcome> outcomes;
};

/// Value, first and second derivative of a log-Laplace transform at one theta.
struct LogLaplace {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Reproduction law of one generation. Always produces at least one child.
class PointProcessLaw {
 public:
  static PointProcessLaw gaussian(int children, double drift, double sigma);
  static PointProcessLaw discrete(std::vector<MixtureOutcome> outcomes);

  bool is_gaussian() const noexcept { return std::holds_alternative<GaussianBranching>(law_); }
  const GaussianBranching& as_gaussian() const { return std::get<GaussianBranching>(law_); }
  const DiscreteMixture& as_discrete() const { return std::get<DiscreteMixture>(law_); }

  double mean_offspring() const noexcept;
  /// Probability that a realization has more than one child.
  double branching_probability() const noexcept;
  /// Smallest number of children any outcome of positive weight can produce.
  int min_children() const noexcept;
  /// Scale used to cap the theta search (largest |displacement|, or |a| + sigma).
  double displacement_scale() const noexcept;

  std::string describe() const;

 private:
  explicit PointProcessLaw(std::variant<GaussianBranching, DiscreteMixture> law) : law_(std::move(law)) {}
  std::variant<GaussianBranching, DiscreteMixture> law_;
};

/// kappa(theta) = log E sum_l e^{theta l}. Throws NumericError if not finite.
double log_laplace(const PointProcessLaw& law, double theta);

/// (kappa, kappa', kappa'') at theta, computed without overflow.
LogLaplace log_laplace_derivatives(const PointProcessLaw& law, double theta);

/// theta kappa'(theta) - kappa(theta), evaluated in a cancellation-free form.
double tilt_gap(const PointProcessLaw& law, double theta);

/// lim_{theta->inf} of tilt_gap: +inf for Gaussian laws, -log(expected number
/// of children at the maximal displacement) for discrete laws.
double tilt_gap_limit(const PointProcessLaw& law);

/// Law of one step of the spine after exponential tilting by theta.
class TiltedStepLaw {
 public:
  struct Gaussian {
    double mean;
    double sd;
  };
  struct Discrete {
    std::vector<double> values;
    std::vector<double> probabilities;
    std::vector<double> cumulative;
  };

  explicit TiltedStepLaw(Gaussian g) : law_(g) {}
  explicit TiltedStepLaw(Discrete d) : law_(std::move(d)) {}

  double sample(RandomStream& rng) const noexcept {
    if (const auto* g = std::get_if<Gaussian>(&law_)) return g->mean + g->sd * rng.normal();
    return sample_discrete(rng.uniform());
  }

  double mean() const noexcept;
  double variance() const noexcept;
  bool is_gaussian() const noexcept { return std::holds_alternative<Gaussian>(law_); }
  const Gaussian& as_gaussian() const { return std::get<Gaussian>(law_); }
  const Discrete& as_discrete() const { return std::get<Discrete>(law_); }

 private:
  double sample_discrete(double u) const noexcept;
  std::variant<Gaussian, Discrete> law_;
};

/// mu_theta: atom at l with mass E[#children at l] e^{theta l - kappa(theta)}.
TiltedStepLaw tilted_step_law(const PointProcessLaw& law, double theta);

struct ModelAtom {
  double probability = 1.0;
  PointProcessLaw law;
};

/// Finite-support i.i.d. distribution over reproduction laws.
class EnvironmentModel {
 public:
  explicit EnvironmentModel(std::vector<ModelAtom> atoms, std::string name = {});

  std::span<const ModelAtom> atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  const std::string& name() const noexcept { return name_; }
  /// Atom index for a uniform draw u in (0,1).
  std::size_t pick(double u) const noexcept;
  bool all_gaussian() const noexcept;

 private:
  std::vector<ModelAtom> atoms_;
  std::vector<double> cumulative_;
  std::string name_;
};

/// Per-generation quantities cached once a tilt is attached.
struct GenerationTilt {
  LogLaplace kappa;  ///< kappa_j(theta), kappa_j', kappa_j''
  TiltedStepLaw step;
};

/// A realized environment L_1..L_n. Generations are 0-based: law(j) is L_{j+1}.
class EnvironmentSequence {
 public:
  /// An explicit sequence of laws (each generation its own palette entry).
  static EnvironmentSequence from_laws(std::vector<PointProcessLaw> laws);
  /// Generations that index into a shared palette.
  EnvironmentSequence(std::shared_ptr<const std::vector<PointProcessLaw>> palette,
                      std::vector<std::uint32_t> index, std::uint64_t seed);

  std::size_t size() const noexcept { return index_.size(); }
  std::uint64_t seed() const noexcept { return seed_; }
  const PointProcessLaw& law(std::size_t j) const { return (*palette_)[index_.at(j)]; }
  std::uint32_t palette_index(std::size_t j) const { return index_.at(j); }
  std::span<const std::uint32_t> indices() const noexcept { return index_; }
  const std::vector<PointProcessLaw>& palette() const noexcept { return *palette_; }

  /// Compute kappa_j(theta), derivatives and tilted steps; fills K_j prefix sums.
  void attach_tilt(double theta);
  bool has_tilt() const noexcept { return theta_.has_value(); }
  double theta() const;

  /// Cached data for generation j (requires a tilt).
  const GenerationTilt& tilt(std::size_t j) const { return palette_tilt_.at(index_.at(j)); }
  const GenerationTilt& palette_tilt(std::size_t p) const { return palette_tilt_.at(p); }
  double kappa(std::size_t j) const { return tilt(j).kappa.value; }
  /// K_m = sum_{j<m} kappa_j; K(0) = 0, K(size()) = K_n.
  double K(std::size_t m) const { return prefix_.at(m); }
  std::span<const double> prefix() const noexcept { return prefix_; }

  /// Generations [first, first+count) as a new sequence sharing the palette.
  EnvironmentSequence segment(std::size_t first, std::size_t count) const;
  /// Generations in reverse order.
  EnvironmentSequence reversed() const;

 private:
  std::shared_ptr<const std::vector<PointProcessLaw>> palette_;
  std::vector<std::uint32_t> index_;
  std::uint64_t seed_ = 0;
  std::optional<double> theta_;
  std::vector<GenerationTilt> palette_tilt_;
  std::vector<double> prefix_;
};

/// n i.i.d. draws from the model; deterministic in (model, n, seed).
EnvironmentSequence sample_environment(const EnvironmentModel& model, std::size_t n, std::uint64_t seed);

/// Models used throughout the tests, benchmarks and acceptance suite.
namespace models {
/// b = 2, a = 0, sigma = 1, single atom.
EnvironmentModel dyadic_gaussian();
/// b = 2, a = 0, sigma^2 in {0.5, 1.5} equiprobably (sigma_A > 0).
EnvironmentModel canonical_random_variance();
/// b = 2, sigma = 1, drift in {-0.5, +0.5} equiprobably (sigma_A = 0).
EnvironmentModel drift_only_random();
}  // namespace models

}  // namespace brwre
