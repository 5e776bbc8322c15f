#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace brwre {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Welford mean / variance accumulator.
class RunningStats {
 public:
  void add(double x) noexcept {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  void merge(const RunningStats& o) noexcept;

  std::uint64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  /// Unbiased sample variance (0 for fewer than two values).
  double variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double stderr_of_mean() const noexcept {
    return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// A probability estimated from hits / trials.
struct ProportionEstimate {
  double estimate = 0.0;
  double stderr = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
  /// One-sided 95% upper bound; for zero hits this is 1 - 0.05^{1/trials}.
  double upper95 = 1.0;
};

ProportionEstimate proportion(std::uint64_t hits, std::uint64_t trials);

double normal_cdf(double x) noexcept;
double normal_ccdf(double x) noexcept;

/// Sample quantile with linear interpolation (type 7). Sorts a copy.
double quantile(std::vector<double> values, double q);
double median(std::vector<double> values);

/// Asymptotic standard error of the sample median, sqrt(pi/2) * sd / sqrt(n),
/// with sd estimated robustly from the interquartile range.
double median_stderr(std::span<const double> values);

/// Sample mean and its standard error.
struct MeanEstimate {
  double mean = 0.0;
  double stderr = 0.0;
  std::size_t count = 0;
};
MeanEstimate mean_estimate(std::span<const double> values);

}  // namespace brwre
