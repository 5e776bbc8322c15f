#include "brwre/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "brwre/errors.hpp"

namespace brwre {

using nlohmann::json;

namespace {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_key(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number()) return format_number(v.get<double>());
  return v.dump();
}

json nan_safe(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

// Value and stderr of a stored {"estimate", "stderr"|"exact"} object.
std::pair<double, double> stored(const json& j) {
  const double v = j.at("estimate").is_null() ? NAN : j.at("estimate").get<double>();
  const double s = j.contains("stderr") && !j["stderr"].is_null() ? j["stderr"].get<double>() : 0.0;
  return {v, s};
}

}  // namespace

void ResultTable::add(std::vector<json> key_values, double est, double se, std::uint64_t replicates) {
  if (key_values.size() != keys.size()) throw ConfigError("table " + name + ": wrong number of key values");
  rows.push_back({std::move(key_values), est, se, replicates});
}

std::string ResultTable::to_csv(std::uint64_t seed) const {
  std::string out;
  for (const auto& k : keys) out += k + ",";
  out += "estimate,stderr,replicates,seed\n";
  for (const auto& r : rows) {
    for (const auto& k : r.keys) out += format_key(k) + ",";
    out += format_number(r.estimate) + "," + format_number(r.stderr) + "," + std::to_string(r.replicates) + "," +
           std::to_string(seed) + "\n";
  }
  return out;
}

json estimate(double value, double stderr) { return {{"estimate", nan_safe(value)}, {"stderr", nan_safe(stderr)}}; }

json exact(double value) { return {{"estimate", nan_safe(value)}, {"exact", true}}; }

json SimulationReport::payload() const {
  json j;
  j["schema"] = kReportSchema;
  j["kind"] = kind;
  j["config"] = config;
  j["results"] = results;
  json tabs = json::array();
  for (const auto& t : tables) {
    json rows = json::array();
    for (const auto& r : t.rows)
      rows.push_back({{"keys", r.keys}, {"estimate", nan_safe(r.estimate)}, {"stderr", nan_safe(r.stderr)},
                      {"replicates", r.replicates}});
    tabs.push_back({{"name", t.name}, {"keys", t.keys}, {"rows", rows}});
  }
  j["tables"] = tabs;
  json v = json::array();
  for (const auto& x : verdicts) v.push_back({{"name", x.name}, {"pass", x.pass}, {"detail", x.detail}});
  j["verdicts"] = v;
  j["underResolved"] = under_resolved;
  return j;
}

json SimulationReport::to_json() const {
  json j = payload();
  j["provenance"] = {{"seed", provenance.seed},
                     {"version", provenance.version},
                     {"wallSeconds", provenance.wall_seconds},
                     {"workers", provenance.workers}};
  return j;
}

void write_report(const SimulationReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  write_text(dir / "report.json", report.to_json().dump(2) + "\n");
  for (const auto& t : report.tables) write_text(dir / (t.name + ".csv"), t.to_csv(report.provenance.seed));
}

json read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open report " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError("report " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!j.contains("schema") || j["schema"] != kReportSchema)
    throw IoError("report " + path.string() + " has schema " + (j.contains("schema") ? j["schema"].dump() : "none") +
                  ", expected " + kReportSchema);
  return j;
}

SimulationReport aggregate_reports(const std::vector<json>& reports) {
  SimulationReport out;
  out.kind = "report";
  ResultTable runs{"aggregate", {"kind", "run_seed", "quantity"}, {}};
  ResultTable lambda{"lambda", {"run_seed", "beta"}, {}};
  ResultTable compare{"comparison", {"kind", "run_seed", "gamma_seed", "quantity"}, {}};

  struct Gamma {
    std::uint64_t seed;
    double beta, value, stderr;
  };
  std::vector<Gamma> gammas;
  for (const auto& r : reports) {
    if (r.value("schema", "") != kReportSchema) throw IoError("aggregate: schema mismatch in an input report");
    const std::string kind = r.at("kind");
    const std::uint64_t seed = r.at("config").value("seed", std::uint64_t{0});
    const json& res = r.at("results");
    for (const auto& [name, val] : res.items()) {
      if (!val.is_object() || !val.contains("estimate")) continue;
      const auto [v, s] = stored(val);
      runs.add({kind, seed, name}, v, s, 0);
    }
    if (kind == "gamma" && res.contains("perBeta")) {
      for (const auto& g : res["perBeta"]) {
        const auto [v, s] = stored(g.at("gamma"));
        gammas.push_back({seed, g.at("beta").get<double>(), v, s});
        lambda.add({seed, g.at("beta").get<double>()}, 2.0 * v + 0.5, 2.0 * s, g.value("replicates", std::uint64_t{0}));
      }
    }
  }
  // Slopes predicted by lambda: the excursion exponent is -lambda, the log correction -lambda/theta*.
  for (const auto& r : reports) {
    const std::string kind = r.at("kind");
    const json& res = r.at("results");
    if (!res.contains("betaRatio") || !res.contains("slope")) continue;
    const double ratio = stored(res["betaRatio"]).first;
    const Gamma* best = nullptr;
    for (const auto& g : gammas)
      if (!best || std::abs(g.beta - ratio) < std::abs(best->beta - ratio)) best = &g;
    if (!best) continue;
    const auto [slope, slope_se] = stored(res["slope"]);
    double scale = 1.0;
    if (kind == "brw") {
      if (!res.contains("thetaStar")) continue;
      scale = 1.0 / stored(res["thetaStar"]).first;
    }
    const double predicted = -(2.0 * best->value + 0.5) * scale;
    const double predicted_se = 2.0 * best->stderr * scale;
    const std::uint64_t seed = r.at("config").value("seed", std::uint64_t{0});
    compare.add({kind, seed, best->seed, "slope"}, slope, slope_se, 0);
    compare.add({kind, seed, best->seed, "predicted"}, predicted, predicted_se, 0);
    compare.add({kind, seed, best->seed, "difference"}, slope - predicted, std::hypot(slope_se, predicted_se), 0);
  }
  out.results["runs"] = reports.size();
  out.tables = {runs, lambda, compare};
  return out;
}

}  // namespace brwre
