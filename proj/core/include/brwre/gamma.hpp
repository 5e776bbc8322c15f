#pragma once

#include <cstdint>
#include <vector>

#include "brwre/fit.hpp"

namespace brwre {

struct GammaOptions {
  double beta = 0.0;
  std::vector<double> t_grid;
  double dt = 0.05;
  std::size_t n_w = 50;
  std::size_t n_b = 10000;
  std::uint64_t seed = 1;
  int workers = 1;
  /// Fraction of the smallest grid times left out of every fit.
  double drop_fraction = 0.2;
  /// Largest number of Euler steps one path may need.
  std::size_t max_steps = 100'000'000;
};

struct GammaEstimate {
  double beta = 0.0;
  double dt = 0.0;
  std::vector<double> t_grid;
  /// Per W replicate: -slope of log p_W(t) on log t, or NaN when that replicate had < 3 usable cells.
  std::vector<double> replicate_gamma;
  std::vector<ExponentFit> fits;  ///< fits of the replicates that succeeded, in replicate order
  /// Survival fraction averaged over W, per grid time, with its stderr across W.
  std::vector<double> mean_survival;
  std::vector<double> mean_survival_stderr;
  double gamma_hat = 0.0;
  double stderr = 0.0;
  std::size_t cells_total = 0;
  std::size_t cells_dropped = 0;
  std::size_t failed_replicates = 0;
  bool under_resolved = false;
  bool backward = false;
};

/// gamma(beta) from P(B_s + 1 >= beta W_s, s <= t | W) ~ t^{-gamma} on an Euler grid.
GammaEstimate estimate_gamma(const GammaOptions& opts);

/// Same pipeline with the barrier beta (W_t - W_{t-s}), s <= t; one barrier per grid time.
GammaEstimate estimate_gamma_backward(const GammaOptions& opts);

}  // namespace brwre
