#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace brwre {

inline constexpr const char* kReportSchema = "brwre-report/1";

/// One flat estimate grid, written as CSV with header
/// key_1,...,key_k,estimate,stderr,replicates,seed.
struct ResultTable {
  struct Row {
    std::vector<nlohmann::json> keys;
    double estimate = 0.0;
    double stderr = 0.0;
    std::uint64_t replicates = 0;
  };

  std::string name;
  std::vector<std::string> keys;
  std::vector<Row> rows;

  void add(std::vector<nlohmann::json> key_values, double estimate, double stderr, std::uint64_t replicates);
  std::string to_csv(std::uint64_t seed) const;
};

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Provenance {
  std::uint64_t seed = 0;
  std::string version;
  double wall_seconds = 0.0;
  int workers = 1;
};

struct SimulationReport {
  std::string kind;
  nlohmann::json config;
  nlohmann::json results = nlohmann::json::object();
  std::vector<ResultTable> tables;
  std::vector<Verdict> verdicts;
  bool under_resolved = false;
  Provenance provenance;

  /// Everything that depends only on (config, seed).
  nlohmann::json payload() const;
  /// payload() plus provenance.
  nlohmann::json to_json() const;
};

/// {"estimate": x, "stderr": s}
nlohmann::json estimate(double value, double stderr);
/// {"estimate": x, "exact": true}
nlohmann::json exact(double value);

/// Writes report.json and one <table>.csv per table into `dir` (created if needed).
void write_report(const SimulationReport& report, const std::filesystem::path& dir);

/// Reads a report.json; throws IoError on unreadable files and on schema mismatch.
nlohmann::json read_report(const std::filesystem::path& path);

/// Comparison table over stored reports: every run keyed by kind and seed, plus
/// lambda = 2 gamma + 1/2 and the slopes it predicts where the inputs allow.
SimulationReport aggregate_reports(const std::vector<nlohmann::json>& reports);

}  // namespace brwre
