#include "brwre/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "brwre/errors.hpp"

namespace brwre {

using nlohmann::json;

namespace {

// Reads keys from one JSON object and rejects the ones nobody asked for.
class Section {
 public:
  Section(const json& doc, std::string name) : name_(std::move(name)) {
    if (doc.is_null()) return;
    if (!doc.is_object()) throw ConfigError("section '" + name_ + "' must be an object");
    doc_ = &doc;
  }

  template <class T>
  void read(const char* key, T& value) {
    seen_.insert(key);
    if (!doc_ || !doc_->contains(key)) return;
    try {
      value = (*doc_)[key].get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(name_ + "." + key + ": " + e.what());
    }
  }

  template <class T>
  void read(const char* key, std::optional<T>& value) {
    seen_.insert(key);
    if (!doc_ || !doc_->contains(key)) return;
    T v{};
    read(key, v);
    value = v;
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return doc_ && doc_->contains(key) ? &(*doc_)[key] : nullptr;
  }

  void finish() const {
    if (!doc_) return;
    for (const auto& [k, v] : doc_->items())
      if (!seen_.count(k)) throw ConfigError("unknown key '" + k + "' in section '" + name_ + "'");
  }

 private:
  const json* doc_ = nullptr;
  std::string name_;
  std::set<std::string> seen_;
};

MaxEngine parse_engine(const std::string& s) {
  if (s == "exact") return MaxEngine::Exact;
  if (s == "particle") return MaxEngine::Particle;
  throw ConfigError("engine must be 'exact' or 'particle', got '" + s + "'");
}

std::string engine_name(MaxEngine e) { return e == MaxEngine::Exact ? "exact" : "particle"; }

template <class T>
void require_sorted(const std::vector<T>& v, const std::string& what) {
  if (v.empty()) throw ConfigError(what + " must not be empty");
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i - 1] < v[i])) throw ConfigError(what + " must be strictly increasing");
}

void require_positive(double v, const std::string& what) {
  if (!(v > 0.0)) throw ConfigError(what + " must be > 0");
}

void require_budget(std::uint64_t v, const std::string& what) {
  if (v < 1) throw ConfigError(what + " must be >= 1");
}

std::vector<double> default_t_grid() {
  std::vector<double> t;
  for (double decade = 10.0; decade < 1e4; decade *= 10.0)
    for (double m : {1.0, 2.0, 5.0}) t.push_back(m * decade);
  t.push_back(1e4);
  return t;
}

PointProcessLaw parse_law(const json& j) {
  if (!j.is_object() || !j.contains("type")) throw ConfigError("a law needs a \"type\" of gaussian or discrete");
  const std::string type = j["type"].get<std::string>();
  Section s(j, "law");
  std::string ignored;
  s.read("type", ignored);
  if (type == "gaussian") {
    int b = 2;
    double a = 0.0, sigma = 1.0;
    s.read("children", b);
    s.read("drift", a);
    s.read("sigma", sigma);
    s.finish();
    return PointProcessLaw::gaussian(b, a, sigma);
  }
  if (type == "discrete") {
    std::vector<MixtureOutcome> outcomes;
    if (const json* o = s.child("outcomes")) {
      for (const auto& item : *o) {
        MixtureOutcome m;
        Section os(item, "outcome");
        os.read("weight", m.weight);
        os.read("displacements", m.displacements);
        os.finish();
        outcomes.push_back(std::move(m));
      }
    }
    s.finish();
    return PointProcessLaw::discrete(std::move(outcomes));
  }
  throw ConfigError("unknown law type '" + type + "'");
}

json law_to_json(const PointProcessLaw& law) {
  if (law.is_gaussian()) {
    const auto& g = law.as_gaussian();
    return {{"type", "gaussian"}, {"children", g.children}, {"drift", g.drift}, {"sigma", g.sigma}};
  }
  json outcomes = json::array();
  for (const auto& o : law.as_discrete().outcomes)
    outcomes.push_back({{"weight", o.weight}, {"displacements", o.displacements}});
  return {{"type", "discrete"}, {"outcomes", outcomes}};
}

json prune_to_json(const PruneConfig& p) {
  json j;
  if (std::isfinite(p.upper_offset)) j["upperBarrierOffset"] = p.upper_offset;
  if (std::isfinite(p.lower_width)) j["lowerTrimWidth"] = p.lower_width;
  if (p.hard_cap != std::numeric_limits<std::size_t>::max()) j["hardCap"] = p.hard_cap;
  return j.is_null() ? json::object() : j;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Analyze:
      return "analyze";
    case ExperimentKind::Gamma:
      return "gamma";
    case ExperimentKind::Ballot:
      return "ballot";
    case ExperimentKind::Brw:
      return "brw";
    case ExperimentKind::Verify:
      return "verify";
    case ExperimentKind::Report:
      return "report";
  }
  return "?";
}

ExperimentKind parse_kind(const std::string& name) {
  for (auto k : {ExperimentKind::Analyze, ExperimentKind::Gamma, ExperimentKind::Ballot, ExperimentKind::Brw,
                 ExperimentKind::Verify, ExperimentKind::Report})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown experiment kind '" + name + "' (analyze|gamma|ballot|brw|verify|report)");
}

EnvironmentModel parse_model(const json& spec) {
  if (spec.is_string()) {
    const std::string name = spec.get<std::string>();
    if (name == "dyadic_gaussian") return models::dyadic_gaussian();
    if (name == "canonical_random_variance") return models::canonical_random_variance();
    if (name == "drift_only_random") return models::drift_only_random();
    throw ConfigError("unknown model '" + name + "' (dyadic_gaussian|canonical_random_variance|drift_only_random)");
  }
  Section s(spec, "model");
  std::string name;
  s.read("name", name);
  std::vector<ModelAtom> atoms;
  if (const json* a = s.child("atoms")) {
    for (const auto& item : *a) {
      Section as(item, "atom");
      double p = 1.0;
      as.read("probability", p);
      const json* law = as.child("law");
      if (!law) throw ConfigError("model atom needs a \"law\"");
      as.finish();
      atoms.push_back({p, parse_law(*law)});
    }
  }
  s.finish();
  if (atoms.empty()) throw ConfigError("model needs at least one atom");
  return EnvironmentModel(std::move(atoms), name);
}

json model_to_json(const EnvironmentModel& model) {
  json atoms = json::array();
  for (const auto& a : model.atoms()) atoms.push_back({{"probability", a.probability}, {"law", law_to_json(a.law)}});
  return {{"name", model.name()}, {"atoms", atoms}};
}

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig c;
  Section top(doc, "config");
  std::string kind = "analyze";
  top.read("kind", kind);
  c.kind = parse_kind(kind);
  top.read("seed", c.seed);
  top.read("workers", c.workers);
  top.read("out", c.out);
  if (const json* m = top.child("model")) c.model_spec = *m;

  if (const json* j = top.child("analyze")) {
    Section s(*j, "analyze");
    s.read("gammaHat", c.analyze.gamma_hat);
    s.finish();
  }
  if (const json* j = top.child("gamma")) {
    Section s(*j, "gamma");
    s.read("beta", c.gamma.beta);
    s.read("tGrid", c.gamma.t_grid);
    s.read("dt", c.gamma.dt);
    s.read("nW", c.gamma.n_w);
    s.read("nB", c.gamma.n_b);
    s.read("dropFraction", c.gamma.drop_fraction);
    s.read("backward", c.gamma.backward);
    s.finish();
  }
  if (const json* j = top.child("ballot")) {
    Section s(*j, "ballot");
    s.read("test", c.ballot.test);
    s.read("nGrid", c.ballot.n_grid);
    s.read("replicates", c.ballot.replicates);
    s.read("environments", c.ballot.environments);
    s.read("quenched", c.ballot.quenched);
    s.read("offset", c.ballot.offset);
    s.read("logOffset", c.ballot.log_offset);
    s.read("alpha", c.ballot.alpha);
    s.read("expectSlope", c.ballot.expect_slope);
    s.read("tolerance", c.ballot.tolerance);
    s.finish();
  }
  if (const json* j = top.child("brw")) {
    Section s(*j, "brw");
    s.read("test", c.brw.test);
    s.read("nGrid", c.brw.n_grid);
    s.read("replicates", c.brw.replicates);
    std::string engine = engine_name(c.brw.engine);
    s.read("engine", engine);
    c.brw.engine = parse_engine(engine);
    if (const json* g = s.child("grid")) {
      Section gs(*g, "brw.grid");
      gs.read("h", c.brw.grid.h);
      gs.read("lo", c.brw.grid.lo);
      gs.read("hi", c.brw.grid.hi);
      gs.read("kernelSd", c.brw.grid.kernel_sd);
      gs.finish();
    }
    if (const json* p = s.child("prune")) {
      PruneConfig pc;
      Section ps(*p, "brw.prune");
      ps.read("upperBarrierOffset", pc.upper_offset);
      ps.read("lowerTrimWidth", pc.lower_width);
      ps.read("hardCap", pc.hard_cap);
      ps.finish();
      c.brw.prune = pc;
    }
    s.read("yGrid", c.brw.y_grid);
    s.read("environments", c.brw.environments);
    s.read("A", c.brw.trimmed_a);
    s.read("beta", c.brw.beta);
    s.read("roulettePopulation", c.brw.roulette_population);
    s.read("walkReplicates", c.brw.walk_replicates);
    s.read("bootstrap", c.brw.bootstrap);
    s.read("expectSlope", c.brw.expect_slope);
    s.read("tolerance", c.brw.tolerance);
    s.finish();
  }
  if (const json* j = top.child("verify")) {
    Section s(*j, "verify");
    s.read("catalogue", c.verify.catalogue);
    s.read("frontierY", c.verify.frontier_y);
    s.read("dekkingHost", c.verify.dekking_host);
    s.read("dhNGrid", c.verify.dh_n_grid);
    s.read("dhEnvironments", c.verify.dh_environments);
    std::string engine = engine_name(c.verify.dh_engine);
    s.read("dhEngine", engine);
    c.verify.dh_engine = parse_engine(engine);
    s.read("dhBranchingReplicates", c.verify.dh_branching_replicates);
    s.finish();
  }
  if (const json* j = top.child("report")) {
    Section s(*j, "report");
    s.read("inputs", c.report.inputs);
    s.finish();
  }
  top.finish();
  if (c.gamma.t_grid.empty()) c.gamma.t_grid = default_t_grid();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

void ExperimentConfig::validate() const {
  if (!seed) throw ConfigError("no seed: set \"seed\" in the config file or pass --seed");
  if (workers < 0) throw ConfigError("workers must be >= 0 (0 = automatic)");
  switch (kind) {
    case ExperimentKind::Analyze:
      if (!(analyze.gamma_hat >= 0.0)) throw ConfigError("analyze.gammaHat must be >= 0");
      break;
    case ExperimentKind::Gamma:
      require_sorted(gamma.beta, "gamma.beta");
      if (gamma.beta.front() < 0.0) throw ConfigError("gamma.beta values must be >= 0");
      require_sorted(gamma.t_grid, "gamma.tGrid");
      require_positive(gamma.t_grid.front(), "gamma.tGrid values");
      require_positive(gamma.dt, "gamma.dt");
      require_budget(gamma.n_w, "gamma.nW");
      require_budget(gamma.n_b, "gamma.nB");
      break;
    case ExperimentKind::Ballot:
      if (ballot.test != "excursion" && ballot.test != "persistence" && ballot.test != "llt" && ballot.test != "kolmogorov")
        throw ConfigError("ballot.test must be excursion|persistence|llt|kolmogorov");
      require_sorted(ballot.n_grid, "ballot.nGrid");
      require_budget(ballot.replicates, "ballot.replicates");
      require_budget(ballot.environments, "ballot.environments");
      break;
    case ExperimentKind::Brw:
      if (brw.test != "logCorrection" && brw.test != "trace" && brw.test != "frontier" && brw.test != "trimmed" &&
          brw.test != "barrierCount" && brw.test != "simulate")
        throw ConfigError("brw.test must be logCorrection|trace|frontier|trimmed|barrierCount|simulate");
      require_sorted(brw.n_grid, "brw.nGrid");
      require_budget(brw.replicates, "brw.replicates");
      require_budget(brw.environments, "brw.environments");
      require_sorted(brw.y_grid, "brw.yGrid");
      require_sorted(brw.trimmed_a, "brw.A");
      brw.grid.validate();
      if (brw.prune) brw.prune->validate();
      break;
    case ExperimentKind::Verify:
      if (!verify.frontier_y.empty()) require_sorted(verify.frontier_y, "verify.frontierY");
      require_sorted(verify.dh_n_grid, "verify.dhNGrid");
      require_budget(verify.dh_environments, "verify.dhEnvironments");
      break;
    case ExperimentKind::Report:
      break;
  }
}

EnvironmentModel ExperimentConfig::model() const { return parse_model(model_spec); }

json ExperimentConfig::echo() const {
  json j;
  j["kind"] = to_string(kind);
  j["seed"] = seed ? json(*seed) : json(nullptr);
  switch (kind) {
    case ExperimentKind::Analyze:
      j["model"] = model_to_json(model());
      j["analyze"] = {{"gammaHat", analyze.gamma_hat}};
      break;
    case ExperimentKind::Gamma:
      j["gamma"] = {{"beta", gamma.beta}, {"tGrid", gamma.t_grid}, {"dt", gamma.dt}, {"nW", gamma.n_w},
                    {"nB", gamma.n_b}, {"dropFraction", gamma.drop_fraction}, {"backward", gamma.backward}};
      break;
    case ExperimentKind::Ballot: {
      j["model"] = model_to_json(model());
      json b = {{"test", ballot.test}, {"nGrid", ballot.n_grid}, {"replicates", ballot.replicates},
                {"environments", ballot.environments}, {"quenched", ballot.quenched}, {"offset", ballot.offset},
                {"logOffset", ballot.log_offset}, {"alpha", ballot.alpha}};
      if (ballot.expect_slope) {
        b["expectSlope"] = *ballot.expect_slope;
        b["tolerance"] = ballot.tolerance;
      }
      j["ballot"] = b;
      break;
    }
    case ExperimentKind::Brw: {
      j["model"] = model_to_json(model());
      json b = {{"test", brw.test},
                {"nGrid", brw.n_grid},
                {"replicates", brw.replicates},
                {"engine", engine_name(brw.engine)},
                {"grid", {{"h", brw.grid.h}, {"lo", brw.grid.lo}, {"hi", brw.grid.hi}, {"kernelSd", brw.grid.kernel_sd}}},
                {"yGrid", brw.y_grid},
                {"environments", brw.environments},
                {"A", brw.trimmed_a},
                {"beta", brw.beta},
                {"roulettePopulation", brw.roulette_population},
                {"walkReplicates", brw.walk_replicates},
                {"bootstrap", brw.bootstrap}};
      if (brw.prune) b["prune"] = prune_to_json(*brw.prune);
      if (brw.expect_slope) {
        b["expectSlope"] = *brw.expect_slope;
        b["tolerance"] = brw.tolerance;
      }
      j["brw"] = b;
      break;
    }
    case ExperimentKind::Verify:
      j["model"] = model_to_json(model());
      j["verify"] = {{"catalogue", verify.catalogue},
                     {"frontierY", verify.frontier_y},
                     {"dekkingHost", verify.dekking_host},
                     {"dhNGrid", verify.dh_n_grid},
                     {"dhEnvironments", verify.dh_environments},
                     {"dhEngine", engine_name(verify.dh_engine)},
                     {"dhBranchingReplicates", verify.dh_branching_replicates}};
      break;
    case ExperimentKind::Report:
      j["report"] = {{"inputs", report.inputs}};
      break;
  }
  return j;
}

}  // namespace brwre
