#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "brwre/brw.hpp"
#include "brwre/env.hpp"
#include "brwre/quenched_law.hpp"

namespace brwre {

enum class ExperimentKind { Analyze, Gamma, Ballot, Brw, Verify, Report };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_kind(const std::string& name);

struct AnalyzeSection {
  double gamma_hat = 0.5;
};

struct GammaSection {
  std::vector<double> beta{0.0};
  std::vector<double> t_grid;  ///< empty: 10, 20, 50, ..., 10^4
  double dt = 0.05;
  std::size_t n_w = 50;
  std::size_t n_b = 10000;
  double drop_fraction = 0.2;
  bool backward = false;
};

struct BallotSection {
  /// excursion | persistence | llt | kolmogorov
  std::string test = "excursion";
  std::vector<std::size_t> n_grid{64, 128, 256, 512, 1024, 2048};
  std::uint64_t replicates = 1'000'000;
  std::size_t environments = 5;
  bool quenched = true;
  double offset = 2.0;
  bool log_offset = false;
  double alpha = 0.0;
  std::optional<double> expect_slope;
  double tolerance = 0.0;
};

struct BrwSection {
  /// logCorrection | trace | frontier | trimmed | barrierCount | simulate
  std::string test = "logCorrection";
  std::vector<std::size_t> n_grid{128, 256, 512, 1024, 2048, 4096};
  std::size_t replicates = 400;
  MaxEngine engine = MaxEngine::Exact;
  LawGrid grid;
  /// Empty: PruneConfig::defaults(theta*, n) for the particle engine.
  std::optional<PruneConfig> prune;
  std::vector<double> y_grid{1.0, 2.0, 4.0};
  std::size_t environments = 1000;
  std::vector<int> trimmed_a{2, 4, 8};
  double beta = 1.0;
  std::size_t roulette_population = 0;
  std::uint64_t walk_replicates = 100'000;
  std::size_t bootstrap = 200;
  std::optional<double> expect_slope;
  double tolerance = 0.0;
};

struct VerifySection {
  bool catalogue = true;
  std::vector<double> frontier_y{0.5, 1.0, 2.0, 4.0};
  bool dekking_host = false;
  std::vector<std::size_t> dh_n_grid{8, 16, 32, 64};
  std::size_t dh_environments = 400;
  MaxEngine dh_engine = MaxEngine::Exact;
  std::size_t dh_branching_replicates = 200;
};

struct ReportSection {
  std::vector<std::string> inputs;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Analyze;
  std::optional<std::uint64_t> seed;
  int workers = 0;
  std::string out;
  nlohmann::json model_spec = "dyadic_gaussian";
  AnalyzeSection analyze;
  GammaSection gamma;
  BallotSection ballot;
  BrwSection brw;
  VerifySection verify;
  ReportSection report;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  EnvironmentModel model() const;
  /// Effective configuration, defaults filled in. Worker count and output path are
  /// left out: they do not affect results.
  nlohmann::json echo() const;
};

/// Parses a configuration document; unknown keys are rejected.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// A model from a name (dyadic_gaussian, canonical_random_variance, drift_only_random)
/// or an object {"atoms": [{"probability": p, "law": {...}}]}.
EnvironmentModel parse_model(const nlohmann::json& spec);
nlohmann::json model_to_json(const EnvironmentModel& model);

}  // namespace brwre
