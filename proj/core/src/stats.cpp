#include "brwre/stats.hpp"

#include <algorithm>
#include <stdexcept>

#include "brwre/errors.hpp"

namespace brwre {

void RunningStats::merge(const RunningStats& o) noexcept {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double n = static_cast<double>(n_ + o.n_);
  const double d = o.mean_ - mean_;
  mean_ += d * static_cast<double>(o.n_) / n;
  m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
  n_ += o.n_;
}

ProportionEstimate proportion(std::uint64_t hits, std::uint64_t trials) {
  ProportionEstimate p;
  p.hits = hits;
  p.trials = trials;
  if (trials == 0) return p;
  const double n = static_cast<double>(trials);
  p.estimate = static_cast<double>(hits) / n;
  p.stderr = std::sqrt(p.estimate * (1.0 - p.estimate) / n);
  if (hits == 0) {
    p.upper95 = 1.0 - std::pow(0.05, 1.0 / n);
  } else {
    p.upper95 = std::min(1.0, p.estimate + 1.6448536269514722 * p.stderr);
  }
  return p;
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double normal_ccdf(double x) noexcept { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw UnderResolvedError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double median_stderr(std::span<const double> values) {
  if (values.size() < 4) return INFINITY;
  std::vector<double> v(values.begin(), values.end());
  const double iqr = quantile(v, 0.75) - quantile(v, 0.25);
  // Gaussian calibration: IQR = 1.349 sd.
  const double sd = iqr / 1.3489795003921634;
  return std::sqrt(M_PI / 2.0) * sd / std::sqrt(static_cast<double>(values.size()));
}

MeanEstimate mean_estimate(std::span<const double> values) {
  RunningStats s;
  for (double x : values) s.add(x);
  return {s.mean(), s.stderr_of_mean(), values.size()};
}

}  // namespace brwre
