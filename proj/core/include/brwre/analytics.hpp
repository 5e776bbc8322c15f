#pragma once

#include <vector>

#include "brwre/env.hpp"

namespace brwre {

/// Probability-weighted log-Laplace data of a model at one theta.
struct AnnealedLaplace {
  double kappa = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  std::vector<LogLaplace> per_atom;
};

struct AnnealedSummary {
  double theta_star = 0.0;
  double speed = 0.0;
  double sigma_q2 = 0.0;
  double sigma_a2 = 0.0;
  double gamma_hat = 0.0;
  double lambda = 0.0;
  double phi = 0.0;

  double beta() const;  ///< sigma_A / sigma_Q
};

struct SpeedInequality {
  double speed = 0.0;                ///< v
  double mean_atom_speed = 0.0;      ///< E(v_1)
  std::vector<double> atom_speeds;   ///< v of each atom run as a homogeneous BRW
  bool strict = false;
};

AnnealedLaplace annealed_log_laplace(const EnvironmentModel& model, double theta);

/// E(theta kappa_1'(theta) - kappa_1(theta)).
double annealed_tilt_gap(const EnvironmentModel& model, double theta);

/// Root of theta kappa'(theta) - kappa(theta) by bisection.
/// Throws NoInteriorMinimizer when the gap stays negative up to 700 / displacement scale.
double solve_theta_star(const EnvironmentModel& model);
double solve_theta_star(const PointProcessLaw& law);

/// Throws ConfigError when gamma_hat < 0, NumericError when sigma_Q^2 = 0.
AnnealedSummary annealed_summary(const EnvironmentModel& model, double gamma_hat);

/// Compares v with the mean of the atoms' own speeds.
SpeedInequality speed_inequality_report(const EnvironmentModel& model);

}  // namespace brwre
