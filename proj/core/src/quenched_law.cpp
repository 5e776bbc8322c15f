#include "brwre/quenched_law.hpp"

#include <algorithm>
#include <cmath>

#include "brwre/errors.hpp"
#include "brwre/stats.hpp"

namespace brwre {

void LawGrid::validate() const {
  if (!(h > 0.0) || !(hi > lo) || !(kernel_sd > 0.0)) throw ConfigError("law grid needs h > 0, hi > lo, kernel_sd > 0");
  if ((hi - lo) / h > 5e7) throw ResourceError("law grid has more than 5e7 points");
}

double TailFunction::quantile(double p) const {
  // R is nonincreasing; find the first i with R(x_i) <= 1 - p.
  const double target = 1.0 - p;
  if (values.empty()) throw UnderResolvedError("empty tail function");
  if (values.front() <= target) throw UnderResolvedError("quantile lies left of the law grid; lower grid.lo");
  if (values.back() > target) throw UnderResolvedError("quantile lies right of the law grid; raise grid.hi");
  std::size_t i = 1;
  while (values[i] > target) ++i;
  const double r0 = values[i - 1], r1 = values[i];
  const double f = r0 == r1 ? 0.0 : (r0 - target) / (r0 - r1);
  return x(i - 1) + f * h;
}

double TailFunction::mean() const {
  // E Y = lo + int_lo^inf R(x) dx with R = 1 to the left of lo.
  CompensatedSum s;
  for (std::size_t i = 0; i < values.size(); ++i) s.add((i == 0 || i + 1 == values.size() ? 0.5 : 1.0) * values[i]);
  return lo + h * s.value();
}

double TailFunction::mean_abs_deviation() const {
  const double mu = mean();
  // int_{mu}^inf R + int_{-inf}^{mu} (1 - R), trapezoid with the cell containing mu split linearly.
  CompensatedSum s;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const double a = x(i), b = x(i + 1);
    const double ra = values[i], rb = values[i + 1];
    if (b <= mu) {
      s.add(0.5 * h * ((1.0 - ra) + (1.0 - rb)));
    } else if (a >= mu) {
      s.add(0.5 * h * (ra + rb));
    } else {
      const double rm = ra + (rb - ra) * (mu - a) / h;
      s.add(0.5 * (mu - a) * ((1.0 - ra) + (1.0 - rm)));
      s.add(0.5 * (b - mu) * (rm + rb));
    }
  }
  return s.value();
}

TailRecursion::TailRecursion(const std::vector<PointProcessLaw>& palette, double theta, const LawGrid& grid)
    : grid_(grid), theta_(theta) {
  grid_.validate();
  if (!(theta > 0.0)) throw ConfigError("tail recursion needs theta > 0");
  for (const auto& law : palette) {
    if (!law.is_gaussian())
      throw ConfigError("the exact quenched-law engine supports Gaussian branching laws only; use the particle engine");
    const auto& g = law.as_gaussian();
    Kernel k;
    k.children = g.children;
    k.kappa_over_theta = log_laplace(law, theta) / theta;
    k.mean = g.drift - k.kappa_over_theta;
    k.sd = g.sigma;
    const double h = grid_.h;
    k.t_min = static_cast<std::ptrdiff_t>(std::floor((k.mean - grid_.kernel_sd * k.sd) / h));
    const auto t_max = static_cast<std::ptrdiff_t>(std::ceil((k.mean + grid_.kernel_sd * k.sd) / h));
    // Point samples of the density, not cell masses: the sampled Gaussian keeps the
    // moment generating function of N(mean, sd^2) up to exp(-2 pi^2 sd^2 / h^2), and the
    // front speed is set by that function. Cell masses would add h^2/12 to the variance.
    double total = 0.0;
    for (std::ptrdiff_t t = k.t_min; t <= t_max; ++t) {
      const double z = (static_cast<double>(t) * h - k.mean) / k.sd;
      k.weights.push_back(std::exp(-0.5 * z * z));
      total += k.weights.back();
    }
    for (double& w : k.weights) w /= total;
    k.reversed.assign(k.weights.rbegin(), k.weights.rend());
    kernels_.push_back(std::move(k));
  }
  const auto points = static_cast<std::size_t>(std::floor((grid_.hi - grid_.lo) / grid_.h)) + 1;
  tail_.lo = grid_.lo;
  tail_.h = grid_.h;
  tail_.values.assign(points, 0.0);
  scratch_.assign(points, 0.0);
  reset();
}

void TailRecursion::reset() {
  for (std::size_t i = 0; i < tail_.values.size(); ++i) {
    const double x = tail_.x(i);
    tail_.values[i] = std::abs(x) < 1e-12 * grid_.h ? 0.5 : (x < 0.0 ? 1.0 : 0.0);
  }
  depth_ = 0;
  shift_ = 0.0;
  exact_step_ = true;
  apply_absorbing();
}

void TailRecursion::apply_absorbing() {
  if (!has_absorbing_) return;
  for (std::size_t i = 0; i < tail_.values.size() && tail_.x(i) < absorbing_; ++i) tail_.values[i] = 1.0;
}

void TailRecursion::push_front(std::size_t p) {
  const Kernel& k = kernels_.at(p);
  auto& r = tail_.values;
  const std::size_t size = r.size();
  const double b = static_cast<double>(k.children);
  auto finish = [b](double q) { return q >= 1.0 ? 1.0 : (q <= 0.0 ? 0.0 : -std::expm1(b * std::log1p(-q))); };

  if (exact_step_) {
    // State is the point mass at 0 (possibly clamped): q(x) = P(l' > x) in closed form.
    for (std::size_t i = 0; i < size; ++i) scratch_[i] = finish(normal_ccdf((tail_.x(i) - k.mean) / k.sd));
    exact_step_ = false;
  } else {
    // Saturated regions: all of the kernel support sees R = 1 (left) or R = 0 (right).
    std::size_t first = 0;
    while (first < size && r[first] == 1.0) ++first;
    std::ptrdiff_t last = static_cast<std::ptrdiff_t>(size) - 1;
    while (last >= 0 && r[static_cast<std::size_t>(last)] == 0.0) --last;
    const auto nw = static_cast<std::ptrdiff_t>(k.weights.size());
    const std::ptrdiff_t t_max = k.t_min + nw - 1;
    // q(x_i) = sum_t w_t R[i - t]; R[j] = 1 for j < first, 0 for j > last.
    const std::ptrdiff_t i_lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(first) + k.t_min);
    const std::ptrdiff_t i_hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(size) - 1, last + t_max);
    for (std::ptrdiff_t i = 0; i < std::min<std::ptrdiff_t>(i_lo, static_cast<std::ptrdiff_t>(size)); ++i)
      scratch_[static_cast<std::size_t>(i)] = 1.0;
    for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(i_hi + 1, 0); i < static_cast<std::ptrdiff_t>(size); ++i)
      scratch_[static_cast<std::size_t>(i)] = 0.0;
    for (std::ptrdiff_t i = i_lo; i <= i_hi; ++i) {
      double q = 0.0;
      double ones = 0.0;
      // Offsets t with i - t in [0, size) read the grid; i - t < 0 reads 1; i - t >= size reads 0.
      const std::ptrdiff_t t_grid_lo = std::max(k.t_min, i - static_cast<std::ptrdiff_t>(size) + 1);
      const std::ptrdiff_t t_grid_hi = std::min(t_max, i);
      for (std::ptrdiff_t t = t_max; t > t_grid_hi && t >= k.t_min; --t) ones += k.weights[static_cast<std::size_t>(t - k.t_min)];
      // Reversed weights make both operands run forward: t = t_max - s reads R[i - t_max + s].
      const double* w = k.reversed.data();
      const double* src = r.data() + (i - t_max);
      for (std::ptrdiff_t s = t_max - t_grid_hi; s <= t_max - t_grid_lo; ++s) q += w[s] * src[s];
      scratch_[static_cast<std::size_t>(i)] = finish(q + ones);
    }
  }
  std::swap(scratch_, r);
  ++depth_;
  shift_ += k.kappa_over_theta;
  apply_absorbing();
}

TailFunction quenched_max_law(const EnvironmentSequence& env, std::size_t n, const LawGrid& grid) {
  if (n > env.size()) throw ConfigError("quenched_max_law: n exceeds the environment length");
  TailRecursion rec(env.palette(), env.theta(), grid);
  for (std::size_t j = n; j-- > 0;) rec.push_front(env.palette_index(j));
  return rec.tail();
}

std::vector<TailFunction> coupled_max_laws(const EnvironmentSequence& draws, const std::vector<std::size_t>& n_grid,
                                           const LawGrid& grid) {
  if (n_grid.empty()) return {};
  if (!std::is_sorted(n_grid.begin(), n_grid.end()) || n_grid.front() < 1)
    throw ConfigError("coupled_max_laws: n grid must be sorted and >= 1");
  if (n_grid.back() > draws.size()) throw ConfigError("coupled_max_laws: n exceeds the number of draws");
  TailRecursion rec(draws.palette(), draws.theta(), grid);
  std::vector<TailFunction> out;
  std::size_t next = 0;
  for (std::size_t k = 0; k < n_grid.back(); ++k) {
    rec.push_front(draws.palette_index(k));
    while (next < n_grid.size() && n_grid[next] == k + 1) {
      out.push_back(rec.tail());
      ++next;
    }
  }
  return out;
}

double frontier_violation_probability(const EnvironmentSequence& env, std::size_t n, double y, const LawGrid& grid) {
  if (n > env.size()) throw ConfigError("frontier: n exceeds the environment length");
  if (!(y > 0.0)) throw ConfigError("frontier: y must be > 0");
  // u = K_k/theta + y - V is the distance below the line; a particle at u < 0 violates.
  // R_k(u) = P(violation among the descendants of a generation-k particle at distance u).
  // The value at u = y only sees distances within the walk's diffusive reach of y.
  double sd = 0.0;
  for (const auto& law : env.palette()) sd = std::max(sd, law.is_gaussian() ? law.as_gaussian().sigma : 0.0);
  LawGrid g = grid;
  g.lo = -2.0 * g.h;
  g.hi = y + 10.0 + 5.0 * sd * std::sqrt(static_cast<double>(n));
  TailRecursion rec(env.palette(), env.theta(), g);
  rec.set_absorbing(0.0);
  rec.reset();
  for (std::size_t j = n; j-- > 0;) rec.push_front(env.palette_index(j));
  // Evaluate at u = y by linear interpolation.
  const auto& t = rec.tail();
  const double pos = (y - t.lo) / t.h;
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= t.values.size()) return t.values.back();
  const double f = pos - static_cast<double>(i);
  return t.values[i] + f * (t.values[i + 1] - t.values[i]);
}

}  // namespace brwre
