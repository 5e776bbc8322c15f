#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "brwre/brw.hpp"
#include "brwre/env.hpp"
#include "brwre/quenched_law.hpp"

namespace brwre {

/// Test functionals of a path (V(u_1), ..., V(u_n)).
struct PathFunctional {
  enum class Kind { One, StayBelow, EndpointIn, ExpEndpoint };

  Kind kind = Kind::One;
  /// StayBelow: V(u_j) <= barrier[j-1] for every j.
  std::vector<double> barrier;
  /// EndpointIn: lo <= V(u_n) <= hi.
  double lo = 0.0;
  double hi = 0.0;
  /// ExpEndpoint: exp(rate * V(u_n)).
  double rate = 0.0;

  static PathFunctional one() { return {}; }
  static PathFunctional stay_below(std::vector<double> barrier);
  static PathFunctional endpoint_in(double lo, double hi);
  static PathFunctional exp_endpoint(double rate);

  double operator()(const std::vector<double>& path) const;
  std::string describe() const;
};

/// A small discrete environment whose trees can be listed exhaustively.
struct EnumerableInstance {
  std::string label;
  EnvironmentSequence env;
  double theta = 1.0;
  PathFunctional f;

  std::size_t n() const noexcept { return env.size(); }
};

inline constexpr double kMaxRealizations = 1e7;

/// Number of distinct tree realizations of the instance; throws ConfigError if the
/// environment is not discrete, n > 4 or the count exceeds kMaxRealizations.
double realization_count(const EnvironmentSequence& env);

struct ManyToOneCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
};

/// lhs: sum over all tree realizations of their probability times sum over leaves of f.
/// rhs: sum over all tilted-walk paths of their probability times e^{-theta S_n + K_n} f.
ManyToOneCheck verify_many_to_one(const EnumerableInstance& instance);

/// theta* of the deterministic environment: root of sum_j (theta kappa_j' - kappa_j).
double environment_theta_star(const EnvironmentSequence& env);

/// The fixed catalogue of enumerable instances (both law families, theta in {0.5, 1, theta*}).
std::vector<EnumerableInstance> instance_catalogue();

struct FrontierCheck {
  double probability = 0.0;
  double bound = 0.0;
  bool holds = false;
};

/// Exact P_L(some particle u has V(u) > K_|u|(theta)/theta + y), theta = instance.theta.
FrontierCheck exact_frontier_probability(const EnumerableInstance& instance, double y);

/// E min of the children's displacements, averaged over the model's atoms.
double expected_min_displacement(const EnvironmentModel& model);

/// E of the largest of b standard normals.
double expected_max_std_normal(int b);

struct DekkingHostOptions {
  MaxEngine engine = MaxEngine::Exact;
  LawGrid grid;
  /// Particle engine only: branching replicates per environment and pruning.
  std::size_t branching_replicates = 200;
  PruneConfig prune{std::numeric_limits<double>::infinity(), 12.0, std::size_t{1} << 18};
  int workers = 0;
};

struct DekkingHostRow {
  std::size_t n = 0;
  double lhs = 0.0;
  double lhs_stderr = 0.0;
  double rhs = 0.0;
  double rhs_stderr = 0.0;
  double slack = 0.0;
  double slack_stderr = 0.0;
  bool pass = false;  ///< slack >= -3 stderr
};

struct DekkingHostReport {
  double C = 0.0;
  double speed = 0.0;
  std::vector<DekkingHostRow> rows;
};

/// E|M_n - E_L M_n| against |E M_{n+1} - E M_n - C| over `environments` environments.
/// Needs at least two children in every outcome of every atom.
DekkingHostReport dekking_host_check(const EnvironmentModel& model, const std::vector<std::size_t>& n_grid,
                                     std::size_t environments, std::uint64_t seed,
                                     const DekkingHostOptions& options = {});

}  // namespace brwre
