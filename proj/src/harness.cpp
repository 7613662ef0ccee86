#include "svoter/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <map>
#include <sstream>

#include "svoter/errors.hpp"
#include "svoter/io.hpp"
#include "svoter/parallel.hpp"

namespace svoter::harness {

namespace {

using nlohmann::json;

enum class Type { Real, PositiveReal, Count, Reals, Counts, Text };

struct Field {
  std::string key;
  Type type;
};

const std::map<std::string, std::vector<Field>>& schema() {
  static const std::map<std::string, std::vector<Field>> s = {
      {"duality",
       {{"n", Type::Count}, {"alpha", Type::PositiveReal}, {"trials_per_log", Type::Count},
        {"horizon_scale", Type::PositiveReal}}},
      {"consensus",
       {{"n", Type::Count}, {"alphas", Type::Reals}, {"kernel", Type::Text},
        {"symmetry_replicas", Type::Count}, {"ladder_n", Type::Counts},
        {"ladder_alpha", Type::PositiveReal}, {"ladder_replicas", Type::Count},
        {"ladder_kernel", Type::Text}}},
      {"martingale",
       {{"n", Type::Count}, {"alphas", Type::Reals}, {"time_fraction", Type::PositiveReal},
        {"kernel", Type::Text}}},
      {"extremes",
       {{"n", Type::Count}, {"alpha", Type::PositiveReal}, {"beta", Type::Real},
        {"significance", Type::PositiveReal}}},
      {"excursion",
       {{"alpha", Type::PositiveReal}, {"depth", Type::Count}, {"m", Type::Count},
        {"a_size", Type::Count}, {"lambdas", Type::Reals}, {"decay_m", Type::Count},
        {"decay_n", Type::Counts}, {"decay_excursions", Type::Count}}},
      {"stationary",
       {{"alpha", Type::PositiveReal}, {"depth", Type::Count}, {"m", Type::Count},
        {"n", Type::Count}, {"significance", Type::PositiveReal}, {"occupation_n", Type::Count},
        {"occupation_horizon", Type::PositiveReal}, {"occupation_batches", Type::Count},
        {"outside_m", Type::Count}, {"outside_n", Type::Counts}, {"outside_t", Type::PositiveReal},
        {"outside_replicas", Type::Count}}},
      {"coupling",
       {{"alpha", Type::PositiveReal}, {"depth", Type::Count}, {"n", Type::Count},
        {"t_values", Type::Reals}, {"tv_points", Type::Count}, {"adjoint_trials", Type::Count},
        {"meeting_n", Type::Count}, {"meeting_T", Type::PositiveReal},
        {"meeting_replicas", Type::Count}}},
      {"entrance",
       {{"alpha", Type::PositiveReal}, {"depth", Type::Count}, {"m_small", Type::Count},
        {"m_large", Type::Count}, {"t_values", Type::Reals}, {"semigroup_pairs", Type::Reals},
        {"tail_t", Type::Reals}, {"tail_n", Type::Counts}, {"decomposition_n", Type::Count},
        {"decomposition_t", Type::PositiveReal}, {"decomposition_nodes", Type::Count},
        {"decomposition_replicas", Type::Count}}},
      {"coalescence-scaling",
       {{"alpha", Type::PositiveReal}, {"depth", Type::Count}, {"m_list", Type::Counts},
        {"n_trunc", Type::Counts}, {"chernoff_m", Type::Count}, {"chernoff_n_trunc", Type::Count},
        {"chernoff_points", Type::Count}, {"chernoff_replicas", Type::Count}}},
      {"coming-down", {{"alpha", Type::PositiveReal}, {"depth", Type::Count}, {"n_trunc", Type::Counts}}},
      {"lineage-convergence",
       {{"alpha", Type::PositiveReal}, {"ladder", Type::Counts}, {"k_sites", Type::Count},
        {"t", Type::PositiveReal}, {"depth", Type::Count}, {"lineages", Type::Counts}}},
  };
  return s;
}

void check_field(const json& params, const Field& f, std::vector<std::string>& errors) {
  if (!params.contains(f.key)) {
    errors.push_back("missing field '" + f.key + "'");
    return;
  }
  const json& v = params.at(f.key);
  auto bad = [&](const std::string& what) { errors.push_back("field '" + f.key + "' " + what); };
  switch (f.type) {
    case Type::Real:
      if (!v.is_number()) bad("must be a number");
      break;
    case Type::PositiveReal:
      if (!v.is_number() || !(v.get<double>() > 0.0)) bad("must be a positive number");
      break;
    case Type::Count:
      if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) bad("must be a positive integer");
      break;
    case Type::Reals:
      if (!v.is_array() || v.empty()) {
        bad("must be a non-empty array of numbers");
        break;
      }
      for (const auto& e : v) {
        if (!e.is_number()) {
          bad("must contain only numbers");
          break;
        }
      }
      break;
    case Type::Counts:
      if (!v.is_array() || v.empty()) {
        bad("must be a non-empty array of positive integers");
        break;
      }
      for (const auto& e : v) {
        if (!e.is_number_integer() || e.get<std::int64_t>() <= 0) {
          bad("must contain only positive integers");
          break;
        }
      }
      break;
    case Type::Text:
      if (!v.is_string()) bad("must be a string");
      break;
  }
}

std::vector<std::string> collect_errors(const ExperimentConfig& cfg) {
  std::vector<std::string> errors;
  const auto it = schema().find(cfg.suite);
  if (it == schema().end()) {
    errors.push_back("unknown suite '" + cfg.suite + "'");
    return errors;
  }
  if (cfg.replicas == 0) errors.push_back("field 'replicas' must be a positive integer");
  if (cfg.threads < 0) errors.push_back("field 'threads' must be >= 0");
  if (!cfg.params.is_object()) {
    errors.push_back("field 'params' must be an object");
    return errors;
  }
  for (const auto& f : it->second) check_field(cfg.params, f, errors);
  for (const auto& [key, value] : cfg.params.items()) {
    const bool known = std::any_of(it->second.begin(), it->second.end(),
                                   [&](const Field& f) { return f.key == key; });
    if (!known) errors.push_back("unknown field '" + key + "'");
  }
  auto alpha_ok = [&](const char* key) {
    if (cfg.params.contains(key) && cfg.params[key].is_number()) {
      const double a = cfg.params[key].get<double>();
      if (!(a > 0.0 && a < 1.0)) errors.push_back(std::string("field '") + key + "' must lie in (0,1)");
    }
  };
  alpha_ok("alpha");
  alpha_ok("ladder_alpha");
  if (cfg.params.contains("alphas") && cfg.params["alphas"].is_array()) {
    for (const auto& a : cfg.params["alphas"]) {
      if (a.is_number() && !(a.get<double>() > 0.0 && a.get<double>() < 1.0)) {
        errors.push_back("field 'alphas' entries must lie in (0,1)");
        break;
      }
    }
  }
  for (const char* key : {"kernel", "ladder_kernel"}) {
    if (cfg.params.contains(key) && cfg.params[key].is_string()) {
      const auto k = cfg.params[key].get<std::string>();
      if (k != "alias" && k != "active") {
        errors.push_back(std::string("field '") + key + "' must be \"alias\" or \"active\"");
      }
    }
  }
  if (cfg.params.contains("semigroup_pairs") && cfg.params["semigroup_pairs"].is_array() &&
      cfg.params["semigroup_pairs"].size() % 2 != 0) {
    errors.push_back("field 'semigroup_pairs' must hold (t, s) pairs");
  }
  return errors;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "duality",  "consensus", "martingale",          "stationary",  "excursion",          "entrance",
      "coupling", "coalescence-scaling", "coming-down", "extremes", "lineage-convergence"};
  return names;
}

double ExperimentConfig::real(const std::string& key) const { return params.at(key).get<double>(); }
std::uint64_t ExperimentConfig::count(const std::string& key) const {
  return params.at(key).get<std::uint64_t>();
}
std::string ExperimentConfig::text(const std::string& key) const {
  return params.at(key).get<std::string>();
}
std::vector<double> ExperimentConfig::reals(const std::string& key) const {
  return params.at(key).get<std::vector<double>>();
}
std::vector<std::uint64_t> ExperimentConfig::counts(const std::string& key) const {
  return params.at(key).get<std::vector<std::uint64_t>>();
}

json ExperimentConfig::echo() const {
  return {{"suite", suite},
          {"master_seed", master_seed},
          {"replicas", replicas},
          {"output_dir", output_dir.string()},
          {"threads", threads},
          {"params", params}};
}

ExperimentConfig parse_config(const json& j) {
  std::vector<std::string> errors;
  ExperimentConfig cfg;
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  if (j.contains("suite") && j["suite"].is_string()) {
    cfg.suite = j["suite"].get<std::string>();
  } else {
    errors.push_back("missing string field 'suite'");
  }
  if (j.contains("master_seed")) {
    if (j["master_seed"].is_number_unsigned()) {
      cfg.master_seed = j["master_seed"].get<std::uint64_t>();
    } else {
      errors.push_back("field 'master_seed' must be an unsigned integer");
    }
  }
  if (j.contains("replicas")) {
    if (j["replicas"].is_number_integer() && j["replicas"].get<std::int64_t>() > 0) {
      cfg.replicas = j["replicas"].get<std::uint64_t>();
    } else {
      errors.push_back("field 'replicas' must be a positive integer");
    }
  } else {
    errors.push_back("missing field 'replicas'");
  }
  if (j.contains("output_dir")) {
    if (j["output_dir"].is_string()) {
      cfg.output_dir = j["output_dir"].get<std::string>();
    } else {
      errors.push_back("field 'output_dir' must be a string");
    }
  }
  if (j.contains("threads")) {
    if (j["threads"].is_number_integer() && j["threads"].get<std::int64_t>() >= 0) {
      cfg.threads = j["threads"].get<int>();
    } else {
      errors.push_back("field 'threads' must be a non-negative integer");
    }
  }
  if (j.contains("params")) cfg.params = j["params"];
  if (!cfg.suite.empty() && errors.empty()) {
    auto more = collect_errors(cfg);
    errors.insert(errors.end(), more.begin(), more.end());
  } else if (!cfg.suite.empty() && schema().count(cfg.suite)) {
    cfg.replicas = std::max<std::uint64_t>(cfg.replicas, 1);
    auto more = collect_errors(cfg);
    for (auto& e : more) {
      if (e.find("'replicas'") == std::string::npos) errors.push_back(e);
    }
  }
  if (!errors.empty()) {
    std::ostringstream msg;
    msg << "invalid configuration (" << errors.size() << " problem" << (errors.size() > 1 ? "s" : "") << "):";
    for (const auto& e : errors) msg << "\n  - " << e;
    throw ConfigError(msg.str());
  }
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  const auto errors = collect_errors(cfg);
  if (errors.empty()) return;
  std::ostringstream msg;
  msg << "invalid configuration (" << errors.size() << " problem" << (errors.size() > 1 ? "s" : "") << "):";
  for (const auto& e : errors) msg << "\n  - " << e;
  throw ConfigError(msg.str());
}

json default_config(const std::string& suite) {
  json p;
  std::uint64_t replicas = 0;
  if (suite == "duality") {
    replicas = 1000;
    p = {{"n", 16}, {"alpha", 0.5}, {"trials_per_log", 10}, {"horizon_scale", 1.0}};
  } else if (suite == "consensus") {
    replicas = 100000;
    p = {{"n", 32},
         {"alphas", {0.3, 0.5, 0.8}},
         {"kernel", "alias"},
         {"symmetry_replicas", 1000},
         {"ladder_n", {64, 128, 256}},
         {"ladder_alpha", 0.5},
         {"ladder_replicas", 200},
         {"ladder_kernel", "alias"}};
  } else if (suite == "martingale") {
    replicas = 100000;
    p = {{"n", 32}, {"alphas", {0.3, 0.5, 0.8}}, {"time_fraction", 0.25}, {"kernel", "alias"}};
  } else if (suite == "extremes") {
    replicas = 10000;
    p = {{"n", 100000}, {"alpha", 0.5}, {"beta", 0.25}, {"significance", 0.01}};
  } else if (suite == "excursion") {
    replicas = 10000;
    p = {{"alpha", 0.5},  {"depth", 4096},         {"m", 64},        {"a_size", 8},
         {"lambdas", {0.5, 1.0, 2.0}}, {"decay_m", 2048}, {"decay_n", {8, 16, 32, 64}},
         {"decay_excursions", 20000}};
  } else if (suite == "stationary") {
    replicas = 10000;
    p = {{"alpha", 0.5},          {"depth", 4096},         {"m", 64},
         {"n", 8},                {"significance", 0.01},  {"occupation_n", 16},
         {"occupation_horizon", 1e4}, {"occupation_batches", 100}, {"outside_m", 64},
         {"outside_n", {4, 8, 16}}, {"outside_t", 1.0},     {"outside_replicas", 4000}};
  } else if (suite == "coupling") {
    replicas = 100000;
    p = {{"alpha", 0.5}, {"depth", 4096},    {"n", 12},         {"t_values", {0.25, 1.0, 4.0}},
         {"tv_points", 20}, {"adjoint_trials", 100}, {"meeting_n", 64}, {"meeting_T", 1.0},
         {"meeting_replicas", 100000}};
  } else if (suite == "entrance") {
    replicas = 100000;
    p = {{"alpha", 0.5},
         {"depth", 4096},
         {"m_small", 256},
         {"m_large", 512},
         {"t_values", {0.5, 1.0}},
         {"semigroup_pairs", {0.5, 0.5, 1.0, 1.0}},
         {"tail_t", {0.5, 1.0, 2.0}},
         {"tail_n", {16, 32, 64}},
         {"decomposition_n", 12},
         {"decomposition_t", 1.0},
         {"decomposition_nodes", 16},
         {"decomposition_replicas", 20000}};
  } else if (suite == "coalescence-scaling") {
    replicas = 10000;
    p = {{"alpha", 0.5},        {"depth", 4096},           {"m_list", {4, 8, 16, 32, 64}},
         {"n_trunc", {512, 256}}, {"chernoff_m", 16},        {"chernoff_n_trunc", 512},
         {"chernoff_points", 20}, {"chernoff_replicas", 10000}};
  } else if (suite == "coming-down") {
    replicas = 20000;
    p = {{"alpha", 0.5}, {"depth", 4096}, {"n_trunc", {256, 512}}};
  } else if (suite == "lineage-convergence") {
    replicas = 20000;
    p = {{"alpha", 0.5}, {"ladder", {100, 1000, 10000}}, {"k_sites", 8}, {"t", 1.0},
         {"depth", 256}, {"lineages", {1, 2, 3}}};
  } else {
    throw ConfigError("unknown suite '" + suite + "'");
  }
  return {{"suite", suite}, {"master_seed", kDefaultMasterSeed}, {"replicas", replicas},
          {"output_dir", "out"}, {"params", p}};
}

Metric Metric::make(std::string name, int criterion, double value, double std_error, bool exact,
                    double target, double tolerance, Kind kind, std::string note) {
  Metric m;
  m.name = std::move(name);
  m.criterion = criterion;
  m.value = value;
  m.std_error = std_error;
  m.exact = exact;
  m.target = target;
  m.tolerance = tolerance;
  m.kind = kind;
  m.note = std::move(note);
  switch (kind) {
    case Kind::Within:
      m.pass = std::fabs(value - target) <= tolerance;
      break;
    case Kind::AtMost:
      m.pass = value <= target + tolerance;
      break;
    case Kind::AtLeast:
      m.pass = value >= target - tolerance;
      break;
    case Kind::Diagnostic:
      m.pass = true;
      break;
  }
  if (std::isnan(value) && kind != Kind::Diagnostic) m.pass = false;
  return m;
}

json Metric::to_json() const {
  static const char* kinds[] = {"within", "at_most", "at_least", "diagnostic"};
  auto num = [](double x) -> json {
    if (std::isfinite(x)) return x;
    return io::format_shortest(x);
  };
  json j = {{"name", name},           {"criterion", criterion}, {"value", num(value)},
            {"stderr", num(std_error)}, {"exact", exact},         {"target", num(target)},
            {"tolerance", num(tolerance)}, {"kind", kinds[static_cast<int>(kind)]}, {"pass", pass}};
  if (!note.empty()) j["note"] = note;
  return j;
}

bool Report::all_pass() const {
  for (const auto& m : metrics) {
    if (!m.pass) return false;
  }
  return true;
}

std::optional<bool> Report::criterion_pass(int criterion) const {
  std::optional<bool> out;
  for (const auto& m : metrics) {
    if (m.criterion != criterion) continue;
    out = out.value_or(true) && m.pass;
  }
  return out;
}

json Report::to_json() const {
  json ms = json::array();
  for (const auto& m : metrics) ms.push_back(m.to_json());
  return {{"suite", suite},         {"version", version},   {"config", config},
          {"pass", all_pass()},     {"metrics", ms},        {"wall_clock_seconds", wall_seconds},
          {"outputs", outputs}};
}

unsigned worker_threads(const ExperimentConfig& cfg) {
  if (cfg.threads > 0) return static_cast<unsigned>(cfg.threads);
  if (const char* env = std::getenv("SVOTER_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return resolve_threads(0);
}

Report run_suite_impl(const ExperimentConfig& cfg);  // suites.cpp

Report run_suite(const ExperimentConfig& cfg) {
  validate(cfg);
  std::filesystem::create_directories(cfg.output_dir);
  const auto start = std::chrono::steady_clock::now();
  Report report = run_suite_impl(cfg);
  report.suite = cfg.suite;
  report.config = cfg.echo();
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto summary = cfg.output_dir / (cfg.suite + ".json");
  report.outputs.push_back(summary.string());
  io::write_json(summary, report.to_json());
  return report;
}

}  // namespace svoter::harness
