#include "brwre/env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "brwre/errors.hpp"

namespace brwre {

namespace {

constexpr double kWeightTolerance = 1e-12;

void require_theta(double theta) {
  if (!std::isfinite(theta) || theta <= 0.0) {
    std::ostringstream os;
    os << "tilt parameter must be finite and > 0, got " << theta;
    throw ConfigError(os.str());
  }
}

// Pooled (weight, displacement) atoms of a discrete law plus its largest displacement.
struct Pooled {
  double d_max = -INFINITY;
  double log_z = 0.0;  // log sum w e^{theta (d - d_max)}
  double mean_offset = 0.0;  // sum p (d - d_max)
  double variance = 0.0;
};

Pooled pool(const DiscreteMixture& law, double theta) {
  Pooled out;
  for (const auto& o : law.outcomes)
    for (double d : o.displacements) out.d_max = std::max(out.d_max, d);
  double z = 0.0, m1 = 0.0;
  for (const auto& o : law.outcomes) {
    for (double d : o.displacements) {
      const double e = o.weight * std::exp(theta * (d - out.d_max));
      z += e;
      m1 += e * (d - out.d_max);
    }
  }
  const double mean = m1 / z;
  double m2 = 0.0;
  for (const auto& o : law.outcomes) {
    for (double d : o.displacements) {
      const double e = o.weight * std::exp(theta * (d - out.d_max));
      const double c = (d - out.d_max) - mean;
      m2 += e * c * c;
    }
  }
  out.log_z = std::log(z);
  out.mean_offset = mean;
  out.variance = m2 / z;
  return out;
}

}  // namespace

PointProcessLaw PointProcessLaw::gaussian(int children, double drift, double sigma) {
  if (children < 1) throw ConfigError("GaussianBranching needs at least one child");
  if (!std::isfinite(drift)) throw ConfigError("GaussianBranching drift must be finite");
  if (!std::isfinite(sigma) || sigma <= 0.0) throw ConfigError("GaussianBranching sigma must be > 0");
  return PointProcessLaw(GaussianBranching{children, drift, sigma});
}

PointProcessLaw PointProcessLaw::discrete(std::vector<MixtureOutcome> outcomes) {
  if (outcomes.empty()) throw ConfigError("DiscreteMixture needs at least one outcome");
  double total = 0.0;
  for (const auto& o : outcomes) {
    if (!(o.weight > 0.0 && o.weight <= 1.0))
      throw ConfigError("DiscreteMixture weights must lie in (0, 1]");
    if (o.displacements.empty())
      throw ConfigError("DiscreteMixture outcome without children violates non-extinction");
    for (double d : o.displacements)
      if (!std::isfinite(d)) throw ConfigError("DiscreteMixture displacement must be finite");
    total += o.weight;
  }
  if (std::abs(total - 1.0) > kWeightTolerance) {
    std::ostringstream os;
    os << "DiscreteMixture weights sum to " << total << ", not 1";
    throw ConfigError(os.str());
  }
  return PointProcessLaw(DiscreteMixture{std::move(outcomes)});
}

double PointProcessLaw::mean_offspring() const noexcept {
  if (is_gaussian()) return as_gaussian().children;
  double m = 0.0;
  for (const auto& o : as_discrete().outcomes) m += o.weight * static_cast<double>(o.displacements.size());
  return m;
}

double PointProcessLaw::branching_probability() const noexcept {
  if (is_gaussian()) return as_gaussian().children > 1 ? 1.0 : 0.0;
  double p = 0.0;
  for (const auto& o : as_discrete().outcomes)
    if (o.displacements.size() > 1) p += o.weight;
  return p;
}

int PointProcessLaw::min_children() const noexcept {
  if (is_gaussian()) return as_gaussian().children;
  std::size_t k = std::numeric_limits<std::size_t>::max();
  for (const auto& o : as_discrete().outcomes) k = std::min(k, o.displacements.size());
  return static_cast<int>(k);
}

double PointProcessLaw::displacement_scale() const noexcept {
  if (is_gaussian()) {
    const auto& g = as_gaussian();
    return std::abs(g.drift) + g.sigma;
  }
  double s = 0.0;
  for (const auto& o : as_discrete().outcomes)
    for (double d : o.displacements) s = std::max(s, std::abs(d));
  return s;
}

std::string PointProcessLaw::describe() const {
  std::ostringstream os;
  if (is_gaussian()) {
    const auto& g = as_gaussian();
    os << "Gaussian(b=" << g.children << ", a=" << g.drift << ", sigma=" << g.sigma << ")";
  } else {
    os << "Discrete{";
    bool first = true;
    for (const auto& o : as_discrete().outcomes) {
      os << (first ? "" : ", ") << "(" << o.weight << ", [";
      for (std::size_t i = 0; i < o.displacements.size(); ++i) os << (i ? "," : "") << o.displacements[i];
      os << "])";
      first = false;
    }
    os << "}";
  }
  return os.str();
}

LogLaplace log_laplace_derivatives(const PointProcessLaw& law, double theta) {
  require_theta(theta);
  LogLaplace out;
  if (law.is_gaussian()) {
    const auto& g = law.as_gaussian();
    const double s2 = g.sigma * g.sigma;
    out.value = std::log(static_cast<double>(g.children)) + theta * g.drift + 0.5 * theta * theta * s2;
    out.d1 = g.drift + theta * s2;
    out.d2 = s2;
  } else {
    const Pooled p = pool(law.as_discrete(), theta);
    out.value = theta * p.d_max + p.log_z;
    out.d1 = p.d_max + p.mean_offset;
    out.d2 = p.variance;
  }
  if (!std::isfinite(out.value) || !std::isfinite(out.d1) || !std::isfinite(out.d2)) {
    std::ostringstream os;
    os << "log-Laplace transform of " << law.describe() << " overflows at theta=" << theta;
    throw NumericError(os.str());
  }
  return out;
}

double log_laplace(const PointProcessLaw& law, double theta) {
  return log_laplace_derivatives(law, theta).value;
}

double tilt_gap(const PointProcessLaw& law, double theta) {
  require_theta(theta);
  if (law.is_gaussian()) {
    const auto& g = law.as_gaussian();
    return 0.5 * theta * theta * g.sigma * g.sigma - std::log(static_cast<double>(g.children));
  }
  const Pooled p = pool(law.as_discrete(), theta);
  const double gap = theta * p.mean_offset - p.log_z;
  if (!std::isfinite(gap)) throw NumericError("tilt gap of " + law.describe() + " is not finite");
  return gap;
}

double tilt_gap_limit(const PointProcessLaw& law) {
  if (law.is_gaussian()) return INFINITY;
  double d_max = -INFINITY;
  for (const auto& o : law.as_discrete().outcomes)
    for (double d : o.displacements) d_max = std::max(d_max, d);
  double at_max = 0.0;
  for (const auto& o : law.as_discrete().outcomes)
    for (double d : o.displacements)
      if (d == d_max) at_max += o.weight;
  return -std::log(at_max);
}

double TiltedStepLaw::mean() const noexcept {
  if (const auto* g = std::get_if<Gaussian>(&law_)) return g->mean;
  const auto& d = std::get<Discrete>(law_);
  double m = 0.0;
  for (std::size_t i = 0; i < d.values.size(); ++i) m += d.probabilities[i] * d.values[i];
  return m;
}

double TiltedStepLaw::variance() const noexcept {
  if (const auto* g = std::get_if<Gaussian>(&law_)) return g->sd * g->sd;
  const auto& d = std::get<Discrete>(law_);
  const double m = mean();
  double v = 0.0;
  for (std::size_t i = 0; i < d.values.size(); ++i) v += d.probabilities[i] * (d.values[i] - m) * (d.values[i] - m);
  return v;
}

double TiltedStepLaw::sample_discrete(double u) const noexcept {
  const auto& d = std::get<Discrete>(law_);
  const auto it = std::upper_bound(d.cumulative.begin(), d.cumulative.end(), u);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(it - d.cumulative.begin()), d.values.size() - 1);
  return d.values[i];
}

TiltedStepLaw tilted_step_law(const PointProcessLaw& law, double theta) {
  const LogLaplace k = log_laplace_derivatives(law, theta);
  if (law.is_gaussian()) {
    const auto& g = law.as_gaussian();
    return TiltedStepLaw(TiltedStepLaw::Gaussian{g.drift + theta * g.sigma * g.sigma, g.sigma});
  }
  TiltedStepLaw::Discrete out;
  for (const auto& o : law.as_discrete().outcomes) {
    for (double d : o.displacements) {
      out.values.push_back(d);
      out.probabilities.push_back(o.weight * std::exp(theta * d - k.value));
    }
  }
  // Renormalize away rounding so the cumulative table ends at exactly 1.
  const double total = std::accumulate(out.probabilities.begin(), out.probabilities.end(), 0.0);
  double c = 0.0;
  for (double& p : out.probabilities) {
    p /= total;
    c += p;
    out.cumulative.push_back(c);
  }
  out.cumulative.back() = 1.0;
  return TiltedStepLaw(std::move(out));
}

EnvironmentModel::EnvironmentModel(std::vector<ModelAtom> atoms, std::string name)
    : atoms_(std::move(atoms)), name_(std::move(name)) {
  if (atoms_.empty()) throw ConfigError("environment model needs at least one atom");
  double total = 0.0, branching = 0.0;
  for (const auto& a : atoms_) {
    if (!(a.probability > 0.0 && a.probability <= 1.0))
      throw ConfigError("environment atom probabilities must lie in (0, 1]");
    total += a.probability;
    branching += a.probability * a.law.branching_probability();
    cumulative_.push_back(total);
  }
  if (std::abs(total - 1.0) > kWeightTolerance) {
    std::ostringstream os;
    os << "environment atom probabilities sum to " << total << ", not 1";
    throw ConfigError(os.str());
  }
  if (!(branching > 0.0))
    throw ConfigError("environment model is not supercritical: no atom ever has more than one child");
  cumulative_.back() = 1.0;
}

std::size_t EnvironmentModel::pick(double u) const noexcept {
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), atoms_.size() - 1);
}

bool EnvironmentModel::all_gaussian() const noexcept {
  return std::all_of(atoms_.begin(), atoms_.end(), [](const ModelAtom& a) { return a.law.is_gaussian(); });
}

EnvironmentSequence::EnvironmentSequence(std::shared_ptr<const std::vector<PointProcessLaw>> palette,
                                         std::vector<std::uint32_t> index, std::uint64_t seed)
    : palette_(std::move(palette)), index_(std::move(index)), seed_(seed) {
  if (!palette_ || palette_->empty()) throw ConfigError("environment palette is empty");
  for (auto i : index_)
    if (i >= palette_->size()) throw ConfigError("environment index outside palette");
}

EnvironmentSequence EnvironmentSequence::from_laws(std::vector<PointProcessLaw> laws) {
  std::vector<std::uint32_t> index(laws.size());
  std::iota(index.begin(), index.end(), 0U);
  if (laws.empty()) throw ConfigError("environment sequence needs at least one generation");
  return EnvironmentSequence(std::make_shared<const std::vector<PointProcessLaw>>(std::move(laws)),
                             std::move(index), 0);
}

void EnvironmentSequence::attach_tilt(double theta) {
  require_theta(theta);
  std::vector<GenerationTilt> tilts;
  tilts.reserve(palette_->size());
  for (const auto& law : *palette_) tilts.push_back({log_laplace_derivatives(law, theta), tilted_step_law(law, theta)});
  palette_tilt_ = std::move(tilts);
  prefix_.assign(index_.size() + 1, 0.0);
  for (std::size_t j = 0; j < index_.size(); ++j) prefix_[j + 1] = prefix_[j] + palette_tilt_[index_[j]].kappa.value;
  theta_ = theta;
}

double EnvironmentSequence::theta() const {
  if (!theta_) throw ConfigError("environment has no tilt attached");
  return *theta_;
}

EnvironmentSequence EnvironmentSequence::segment(std::size_t first, std::size_t count) const {
  if (first + count > index_.size()) throw ConfigError("environment segment exceeds horizon");
  EnvironmentSequence out(palette_, std::vector<std::uint32_t>(index_.begin() + static_cast<std::ptrdiff_t>(first),
                                                               index_.begin() + static_cast<std::ptrdiff_t>(first + count)),
                          seed_);
  if (theta_) out.attach_tilt(*theta_);
  return out;
}

EnvironmentSequence EnvironmentSequence::reversed() const {
  EnvironmentSequence out(palette_, std::vector<std::uint32_t>(index_.rbegin(), index_.rend()), seed_);
  if (theta_) out.attach_tilt(*theta_);
  return out;
}

EnvironmentSequence sample_environment(const EnvironmentModel& model, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("environment horizon must be >= 1");
  auto palette = std::make_shared<std::vector<PointProcessLaw>>();
  palette->reserve(model.size());
  for (const auto& a : model.atoms()) palette->push_back(a.law);
  RandomStream rng = SeedTree(seed).stream(StreamDomain::Environment);
  std::vector<std::uint32_t> index(n);
  for (auto& i : index) i = static_cast<std::uint32_t>(model.pick(rng.uniform()));
  return EnvironmentSequence(std::move(palette), std::move(index), seed);
}

namespace models {

EnvironmentModel dyadic_gaussian() {
  return EnvironmentModel({{1.0, PointProcessLaw::gaussian(2, 0.0, 1.0)}}, "dyadic-gaussian");
}

EnvironmentModel canonical_random_variance() {
  return EnvironmentModel({{0.5, PointProcessLaw::gaussian(2, 0.0, std::sqrt(0.5))},
                           {0.5, PointProcessLaw::gaussian(2, 0.0, std::sqrt(1.5))}},
                          "canonical-random-variance");
}

EnvironmentModel drift_only_random() {
  return EnvironmentModel({{0.5, PointProcessLaw::gaussian(2, -0.5, 1.0)},
                           {0.5, PointProcessLaw::gaussian(2, 0.5, 1.0)}},
                          "drift-only-random");
}

}  // namespace models

}  // namespace brwre
