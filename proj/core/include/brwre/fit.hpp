#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace brwre {

/// One observation for an exponent fit: estimate at abscissa n.
struct FitPoint {
  double n = 0.0;
  double estimate = 0.0;
  double stderr = 0.0;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double intercept_stderr = 0.0;
  double r2 = 0.0;
  double chi2_reduced = 0.0;
  std::size_t points = 0;
};

/// Slope of log(estimate) against log(n).
struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
  std::size_t dropped = 0;
};

/// Weighted least squares of y on x with weights 1/sigma^2 (ordinary least squares
/// when sigma is empty or any sigma is 0). The slope stderr is inflated by
/// sqrt(chi2_reduced) when the scatter exceeds the stated errors.
/// Throws UnderResolvedError for fewer than 3 points.
LinearFit fit_linear(std::span<const double> x, std::span<const double> y, std::span<const double> sigma = {});

/// Drops non-positive or non-finite estimates, then fits log estimate vs log n
/// with relative errors stderr/estimate. Throws UnderResolvedError below 3 usable points.
ExponentFit fit_exponent(std::span<const FitPoint> points);

}  // namespace brwre
