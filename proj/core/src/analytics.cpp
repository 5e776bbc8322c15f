#include "brwre/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "brwre/errors.hpp"

namespace brwre {

namespace {

constexpr double kGapTolerance = 1e-12;

double theta_cap(double scale) { return scale > 0.0 ? 700.0 / scale : 700.0; }

// g is nondecreasing with g(0+) = -kappa(0) < 0 for a supercritical law.
double bisect_gap(const std::function<double(double)>& g, double scale, const std::string& what) {
  const double cap = theta_cap(scale);
  double lo = 0.0;
  double hi = std::min(cap, scale > 0.0 ? 1.0 / scale : 1.0);
  double g_hi = g(hi);
  while (g_hi < 0.0) {
    if (hi >= cap) {
      std::ostringstream os;
      os << "theta kappa'(theta) - kappa(theta) < 0 for all theta up to " << cap << " (" << what
         << "): no interior minimizer of kappa(theta)/theta";
      throw NoInteriorMinimizer(os.str());
    }
    lo = hi;
    hi = std::min(cap, 2.0 * hi);
    g_hi = g(hi);
  }
  if (std::abs(g_hi) < kGapTolerance) return hi;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = g(mid);
    if (std::abs(gm) < kGapTolerance) return mid;
    (gm < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double model_scale(const EnvironmentModel& model) {
  double s = 0.0;
  for (const auto& a : model.atoms()) s = std::max(s, a.law.displacement_scale());
  return s;
}

// The gap increases to its theta -> infinity limit; a limit <= 0 leaves no root.
void require_positive_limit(double limit, const std::string& what) {
  if (limit <= 0.0)
    throw NoInteriorMinimizer("theta kappa'(theta) - kappa(theta) increases to " + std::to_string(limit) + " (" + what +
                              "): no interior minimizer of kappa(theta)/theta");
}

}  // namespace

double AnnealedSummary::beta() const { return std::sqrt(sigma_a2 / sigma_q2); }

AnnealedLaplace annealed_log_laplace(const EnvironmentModel& model, double theta) {
  AnnealedLaplace out;
  std::size_t i = 0;
  for (const auto& a : model.atoms()) {
    LogLaplace k;
    try {
      k = log_laplace_derivatives(a.law, theta);
    } catch (const NumericError& e) {
      std::ostringstream os;
      os << "atom " << i << " of model '" << model.name() << "': " << e.what();
      throw NumericError(os.str());
    }
    out.kappa += a.probability * k.value;
    out.d1 += a.probability * k.d1;
    out.d2 += a.probability * k.d2;
    out.per_atom.push_back(k);
    ++i;
  }
  return out;
}

double annealed_tilt_gap(const EnvironmentModel& model, double theta) {
  double g = 0.0;
  for (const auto& a : model.atoms()) g += a.probability * tilt_gap(a.law, theta);
  return g;
}

double solve_theta_star(const EnvironmentModel& model) {
  double limit = 0.0;
  for (const auto& a : model.atoms()) limit += a.probability * tilt_gap_limit(a.law);
  require_positive_limit(limit, "model '" + model.name() + "'");
  return bisect_gap([&](double t) { return annealed_tilt_gap(model, t); }, model_scale(model),
                    "model '" + model.name() + "'");
}

double solve_theta_star(const PointProcessLaw& law) {
  require_positive_limit(tilt_gap_limit(law), law.describe());
  return bisect_gap([&](double t) { return tilt_gap(law, t); }, law.displacement_scale(), law.describe());
}

AnnealedSummary annealed_summary(const EnvironmentModel& model, double gamma_hat) {
  if (!(gamma_hat >= 0.0) || !std::isfinite(gamma_hat)) throw ConfigError("gamma_hat must be finite and >= 0");
  AnnealedSummary s;
  s.theta_star = solve_theta_star(model);
  const AnnealedLaplace k = annealed_log_laplace(model, s.theta_star);
  s.speed = k.d1;
  s.sigma_q2 = s.theta_star * s.theta_star * k.d2;
  if (!(s.sigma_q2 > 0.0))
    throw NumericError("sigma_Q^2 = 0: the tilted walk is degenerate for model '" + model.name() + "'");
  // theta* kappa_1' - kappa_1 per atom, in the cancellation-free form.
  double mean = 0.0;
  std::vector<double> gap;
  for (const auto& a : model.atoms()) {
    gap.push_back(tilt_gap(a.law, s.theta_star));
    mean += a.probability * gap.back();
  }
  double var = 0.0;
  for (std::size_t i = 0; i < gap.size(); ++i) var += model.atoms()[i].probability * (gap[i] - mean) * (gap[i] - mean);
  s.sigma_a2 = var;
  s.gamma_hat = gamma_hat;
  s.lambda = 2.0 * gamma_hat + 0.5;
  s.phi = s.lambda / s.theta_star;
  return s;
}

SpeedInequality speed_inequality_report(const EnvironmentModel& model) {
  SpeedInequality r;
  r.speed = annealed_summary(model, 0.5).speed;
  std::ostringstream failed;
  std::size_t i = 0;
  for (const auto& a : model.atoms()) {
    try {
      const double t = solve_theta_star(a.law);
      r.atom_speeds.push_back(log_laplace_derivatives(a.law, t).d1);
      r.mean_atom_speed += a.probability * r.atom_speeds.back();
    } catch (const NoInteriorMinimizer& e) {
      failed << " atom " << i << ": " << e.what() << ";";
    }
    ++i;
  }
  if (!failed.str().empty()) throw NoInteriorMinimizer("speed inequality undefined:" + failed.str());
  r.strict = r.speed - r.mean_atom_speed > 1e-10;
  return r;
}

}  // namespace brwre
