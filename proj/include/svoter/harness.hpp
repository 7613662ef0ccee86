#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace svoter::harness {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr std::uint64_t kDefaultMasterSeed = 20261016;

const std::vector<std::string>& suite_names();

/// Validated experiment configuration. Common fields are typed; the
/// suite-specific parameters stay in `params` and are read through the
/// accessors below after validation.
struct ExperimentConfig {
  std::string suite;
  std::uint64_t master_seed = kDefaultMasterSeed;
  std::uint64_t replicas = 0;
  std::filesystem::path output_dir = "out";
  int threads = 0;  ///< 0: SVOTER_THREADS or hardware concurrency
  nlohmann::json params = nlohmann::json::object();

  double real(const std::string& key) const;
  std::uint64_t count(const std::string& key) const;
  std::string text(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<std::uint64_t> counts(const std::string& key) const;

  nlohmann::json echo() const;
};

/// Parses and validates; every problem found is collected and reported in
/// one ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
/// Default configuration of a suite (the acceptance settings).
nlohmann::json default_config(const std::string& suite);
/// Re-validates a config after command-line overrides.
void validate(const ExperimentConfig& cfg);

enum class Kind {
  Within,      ///< |value - target| <= tolerance
  AtMost,      ///< value <= target + tolerance
  AtLeast,     ///< value >= target - tolerance
  Diagnostic,  ///< reported, never gates
};

struct Metric {
  std::string name;
  int criterion = 0;  ///< acceptance criterion number, 0 for supporting properties
  double value = 0.0;
  double std_error = 0.0;
  bool exact = false;  ///< value carries no Monte Carlo error
  double target = 0.0;
  double tolerance = 0.0;
  Kind kind = Kind::Within;
  bool pass = true;
  std::string note;

  static Metric make(std::string name, int criterion, double value, double std_error, bool exact,
                     double target, double tolerance, Kind kind, std::string note = {});
  nlohmann::json to_json() const;
};

struct Report {
  std::string suite;
  nlohmann::json config;
  std::vector<Metric> metrics;
  double wall_seconds = 0.0;
  std::string version = kVersion;
  std::vector<std::string> outputs;

  void add(Metric m) { metrics.push_back(std::move(m)); }
  bool all_pass() const;
  /// Pass state restricted to one criterion; nullopt if it has no metrics.
  std::optional<bool> criterion_pass(int criterion) const;
  nlohmann::json to_json() const;
};

/// Runs a validated configuration, writes `<out>/<suite>.csv` (and any
/// auxiliary CSVs) plus `<out>/<suite>.json`, and returns the report.
Report run_suite(const ExperimentConfig& cfg);

/// k-lineage convergence ladder (also reachable via run_suite).
Report lineage_convergence_experiment(const ExperimentConfig& cfg);

unsigned worker_threads(const ExperimentConfig& cfg);

}  // namespace svoter::harness
