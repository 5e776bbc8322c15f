// brwre: command line front end.
//
//   brwre <analyze|gamma|ballot|brw|verify|report> [--config FILE] [--seed N]
//         [--workers N] [--out DIR]
//
// Flags override the matching config keys. Without --out the report is printed
// as JSON on stdout; with it, report.json and the CSV tables go to DIR and a
// short summary is printed instead.

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "brwre/config.hpp"
#include "brwre/errors.hpp"
#include "brwre/run.hpp"

namespace {

void print_summary(const brwre::SimulationReport& r, const std::string& out) {
  std::printf("%s: wrote %s/report.json (%zu tables)\n", r.kind.c_str(), out.c_str(), r.tables.size());
  for (const auto& [k, v] : r.results.items())
    if (v.is_object() && v.contains("estimate")) std::printf("  %-22s %s\n", k.c_str(), v.dump().c_str());
  for (const auto& v : r.verdicts) std::printf("  [%s] %s: %s\n", v.pass ? "pass" : "FAIL", v.name.c_str(), v.detail.c_str());
  if (r.under_resolved) std::printf("  under-resolved: some cells were dropped\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Branching random walks in random environment: estimators and checks"};
  app.require_subcommand(1);
  std::string config_path, out;
  std::uint64_t seed = 0;
  int workers = -1;
  app.set_version_flag("--version", std::string(brwre::version()));
  for (const char* kind : {"analyze", "gamma", "ballot", "brw", "verify", "report"}) {
    auto* sub = app.add_subcommand(kind, std::string("run a ") + kind + " experiment");
    sub->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--workers", workers, "worker threads, 0 = automatic (overrides the config)");
    sub->add_option("--out", out, "output directory for report.json and CSV tables");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(brwre::ExitCode::Config);
  }
  const std::string kind = app.get_subcommands().front()->get_name();
  try {
    brwre::ExperimentConfig cfg = config_path.empty() ? brwre::parse_config(nlohmann::json::object())
                                                      : brwre::load_config(config_path);
    cfg.kind = brwre::parse_kind(kind);
    const auto* sub = app.get_subcommands().front();
    if (sub->count("--seed")) cfg.seed = seed;
    if (sub->count("--workers")) cfg.workers = workers;
    if (sub->count("--out")) cfg.out = out;
    const auto report = brwre::run(cfg);
    if (cfg.out.empty()) {
      std::cout << report.to_json().dump(2) << "\n";
    } else {
      brwre::write_report(report, cfg.out);
      print_summary(report, cfg.out);
    }
    return static_cast<int>(report.under_resolved ? brwre::ExitCode::UnderResolved : brwre::ExitCode::Ok);
  } catch (const brwre::Error& e) {
    std::fprintf(stderr, "brwre %s: %s\n", kind.c_str(), e.what());
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "brwre %s: %s\n", kind.c_str(), e.what());
    return static_cast<int>(brwre::ExitCode::Config);
  }
}
