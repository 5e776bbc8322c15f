#include "brwre/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "brwre/errors.hpp"

namespace brwre {

LinearFit fit_linear(std::span<const double> x, std::span<const double> y, std::span<const double> sigma) {
  const std::size_t k = x.size();
  if (y.size() != k || (!sigma.empty() && sigma.size() != k)) throw ConfigError("fit_linear: size mismatch");
  if (k < 3) throw UnderResolvedError("fit needs at least 3 usable points");
  bool weighted = !sigma.empty();
  for (double s : sigma)
    if (!(s > 0.0) || !std::isfinite(s)) weighted = false;

  std::vector<double> w(k, 1.0);
  if (weighted)
    for (std::size_t i = 0; i < k; ++i) w[i] = 1.0 / (sigma[i] * sigma[i]);

  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
    syy += w[i] * (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw UnderResolvedError("fit abscissae are all equal");

  LinearFit f;
  f.points = k;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ssr += w[i] * r * r;
  }
  const double dof = static_cast<double>(k - 2);
  f.chi2_reduced = ssr / dof;
  f.r2 = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;

  // Weighted: stated errors, inflated when the scatter says they are too small.
  // Unweighted: residual scatter only.
  const double scale = weighted ? std::max(1.0, f.chi2_reduced) : f.chi2_reduced;
  f.slope_stderr = std::sqrt(scale / sxx);
  f.intercept_stderr = std::sqrt(scale * (1.0 / sw + mx * mx / sxx));
  const double floor = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f.slope));
  f.slope_stderr = std::max(f.slope_stderr, floor);
  return f;
}

ExponentFit fit_exponent(std::span<const FitPoint> points) {
  std::vector<double> x, y, s;
  std::size_t dropped = 0;
  bool any_zero_error = false;
  for (const auto& p : points) {
    if (!(p.estimate > 0.0) || !std::isfinite(p.estimate) || !(p.n > 0.0)) {
      ++dropped;
      continue;
    }
    x.push_back(std::log(p.n));
    y.push_back(std::log(p.estimate));
    s.push_back(p.stderr / p.estimate);
    if (!(p.stderr > 0.0)) any_zero_error = true;
  }
  if (x.size() < 3)
    throw UnderResolvedError("exponent fit has " + std::to_string(x.size()) + " usable points (" +
                             std::to_string(dropped) + " dropped), need 3");
  const LinearFit lf = fit_linear(x, y, any_zero_error ? std::span<const double>{} : std::span<const double>(s));
  ExponentFit f;
  f.slope = lf.slope;
  f.intercept = lf.intercept;
  f.slope_stderr = lf.slope_stderr;
  f.r2 = lf.r2;
  f.points = lf.points;
  f.dropped = dropped;
  return f;
}

}  // namespace brwre
