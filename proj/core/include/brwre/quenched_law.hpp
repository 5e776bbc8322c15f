#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "brwre/env.hpp"

namespace brwre {

/// Grid for the tail recursions: points lo, lo + h, ..., up to hi.
struct LawGrid {
  double h = 0.2;
  double lo = -60.0;
  /// Must exceed the diffusive reach of the tilted walk, about 3 sqrt(sigma_Q^2 n) / theta*.
  double hi = 200.0;
  /// Kernel support in standard deviations around its mean.
  double kernel_sd = 9.0;
  void validate() const;
};

/// A decreasing tail function R(x) = P(Y > x) sampled on a grid; R = 1 left of the
/// grid and 0 right of it.
struct TailFunction {
  double lo = 0.0;
  double h = 0.1;
  std::vector<double> values;

  double x(std::size_t i) const noexcept { return lo + h * static_cast<double>(i); }
  /// x with P(Y <= x) = p, by linear interpolation.
  double quantile(double p) const;
  double median() const { return quantile(0.5); }
  double mean() const;
  /// E|Y - E Y|.
  double mean_abs_deviation() const;
};

/// Prepends generations to a BRW whose subtree law is known.
///
/// The state is the tail R(x) = P(M - K/theta > x) of the centered maximum of the
/// BRW built so far. push_front(p) makes the palette law p the new first generation:
/// with b children displaced by l ~ N(a, sigma^2) and kappa = kappa_p(theta),
///   R_new(x) = 1 - (1 - q(x))^b,  q(x) = E R(x - l + kappa/theta).
/// The tail (not the CDF) is evolved so that its far right keeps full relative
/// precision; truncating it there would slow the front down.
class TailRecursion {
 public:
  /// Gaussian palettes only; throws ConfigError otherwise.
  TailRecursion(const std::vector<PointProcessLaw>& palette, double theta, const LawGrid& grid);

  /// Single particle at the origin: R(x) = 1{x < 0}.
  void reset();
  void push_front(std::size_t palette_index);
  /// Forces R(x) = 1 for x < x0 (absorbing: the event already happened).
  void set_absorbing(double x0) { absorbing_ = x0; has_absorbing_ = true; }

  std::size_t depth() const noexcept { return depth_; }
  /// Sum of kappa_p(theta) / theta over the generations pushed so far.
  double shift() const noexcept { return shift_; }
  const TailFunction& tail() const noexcept { return tail_; }
  double theta() const noexcept { return theta_; }

 private:
  struct Kernel {
    int children = 2;
    double mean = 0.0;  // a - kappa/theta
    double sd = 1.0;
    double kappa_over_theta = 0.0;
    std::ptrdiff_t t_min = 0;
    std::vector<double> weights;  // cell masses for offsets t_min .. t_min + size - 1
    std::vector<double> reversed;
  };
  void apply_absorbing();

  std::vector<Kernel> kernels_;
  LawGrid grid_;
  double theta_;
  TailFunction tail_;
  std::vector<double> scratch_;
  std::size_t depth_ = 0;
  double shift_ = 0.0;
  bool exact_step_ = true;
  bool has_absorbing_ = false;
  double absorbing_ = 0.0;
};

/// Centered law of M_n for a fixed Gaussian environment (generations 0..n-1 of env).
TailFunction quenched_max_law(const EnvironmentSequence& env, std::size_t n, const LawGrid& grid);

/// Backward coupling: applying draws D_1, D_2, ... as new first generations gives after k
/// steps the law of M_k for the environment (D_k, ..., D_1). One pass over the first
/// max(n_grid) entries of `draws` returns the laws at every n of the grid.
std::vector<TailFunction> coupled_max_laws(const EnvironmentSequence& draws, const std::vector<std::size_t>& n_grid,
                                           const LawGrid& grid);

/// P_L(some particle of generation k <= n sits above K_k/theta + y) for a Gaussian environment
/// with a tilt attached, by the backward recursion on the distance to the line.
double frontier_violation_probability(const EnvironmentSequence& env, std::size_t n, double y, const LawGrid& grid);

}  // namespace brwre
