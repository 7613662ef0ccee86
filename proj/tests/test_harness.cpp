#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "svoter/errors.hpp"
#include "svoter/harness.hpp"

using namespace svoter;
using namespace svoter::harness;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("svoter-test-" + name);
  fs::remove_all(p);
  return p;
}

std::string config_error(const nlohmann::json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("every default configuration parses") {
  for (const auto& suite : suite_names()) {
    CAPTURE(suite);
    const auto cfg = parse_config(default_config(suite));
    CHECK(cfg.suite == suite);
    CHECK(cfg.replicas > 0);
    CHECK(cfg.master_seed == kDefaultMasterSeed);
  }
}

TEST_CASE("all configuration problems are reported together") {
  auto j = default_config("consensus");
  j["replicas"] = 0;
  j["params"]["alphas"] = {0.5, 1.5};
  j["params"]["kernel"] = "fast";
  j["params"].erase("n");
  j["params"]["alpah"] = 0.5;
  const auto msg = config_error(j);
  CHECK(msg.find("(5 problems)") != std::string::npos);
  CHECK(msg.find("'replicas'") != std::string::npos);
  CHECK(msg.find("'alphas'") != std::string::npos);
  CHECK(msg.find("'kernel'") != std::string::npos);
  CHECK(msg.find("missing field 'n'") != std::string::npos);
  CHECK(msg.find("unknown field 'alpah'") != std::string::npos);
}

TEST_CASE("structural configuration errors") {
  CHECK(config_error(nlohmann::json::array()).find("JSON object") != std::string::npos);
  CHECK(config_error({{"replicas", 5}}).find("'suite'") != std::string::npos);
  CHECK(config_error({{"suite", "nope"}, {"replicas", 5}}).find("unknown suite") != std::string::npos);
  auto j = default_config("duality");
  j["threads"] = -1;
  j["master_seed"] = "seven";
  const auto msg = config_error(j);
  CHECK(msg.find("'threads'") != std::string::npos);
  CHECK(msg.find("'master_seed'") != std::string::npos);
  auto e = default_config("entrance");
  e["params"]["semigroup_pairs"] = {0.5, 0.5, 1.0};
  CHECK(config_error(e).find("(t, s) pairs") != std::string::npos);
}

TEST_CASE("rejected configurations create no output") {
  const auto out = scratch("rejected");
  auto j = default_config("duality");
  j["output_dir"] = out.string();
  j["replicas"] = 0;
  CHECK_THROWS_AS(parse_config(j), ConfigError);

  auto cfg = parse_config(default_config("duality"));
  cfg.output_dir = out;
  cfg.replicas = 0;
  CHECK_THROWS_AS(run_suite(cfg), ConfigError);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("runs are byte identical across repeats and thread counts") {
  auto base = parse_config(default_config("duality"));
  base.replicas = 40;
  std::vector<std::string> csvs;
  for (int threads : {1, 1, 3}) {
    auto cfg = base;
    cfg.threads = threads;
    cfg.output_dir = scratch("repro-" + std::to_string(csvs.size()));
    const auto report = run_suite(cfg);
    CHECK(report.suite == "duality");
    CHECK(report.criterion_pass(1).value_or(false));
    CHECK(fs::exists(cfg.output_dir / "duality.json"));
    csvs.push_back(slurp(cfg.output_dir / "duality.csv"));
    fs::remove_all(cfg.output_dir);
  }
  CHECK_FALSE(csvs[0].empty());
  CHECK(csvs[0] == csvs[1]);
  CHECK(csvs[0] == csvs[2]);
}

TEST_CASE("metric pass states") {
  CHECK(Metric::make("a", 0, 1.0, 0.1, false, 1.2, 0.4, Kind::Within).pass);
  CHECK_FALSE(Metric::make("a", 0, 1.0, 0.1, false, 1.5, 0.4, Kind::Within).pass);
  CHECK(Metric::make("a", 0, 1.3, 0.0, true, 1.0, 0.5, Kind::AtMost).pass);
  CHECK_FALSE(Metric::make("a", 0, 1.6, 0.0, true, 1.0, 0.5, Kind::AtMost).pass);
  CHECK(Metric::make("a", 0, 0.7, 0.0, true, 1.0, 0.5, Kind::AtLeast).pass);
  CHECK_FALSE(Metric::make("a", 0, 0.4, 0.0, true, 1.0, 0.5, Kind::AtLeast).pass);
  CHECK(Metric::make("a", 0, 1e9, 0.0, true, 0.0, 0.0, Kind::Diagnostic).pass);
  CHECK_FALSE(Metric::make("a", 0, std::nan(""), 0.0, true, 0.0, 1.0, Kind::AtMost).pass);

  Report r;
  r.add(Metric::make("x", 3, 0.0, 0.0, true, 0.0, 0.0, Kind::Within));
  r.add(Metric::make("y", 3, 1.0, 0.0, true, 0.0, 0.0, Kind::Within));
  r.add(Metric::make("z", 4, 1.0, 0.0, true, 0.0, 0.0, Kind::Diagnostic));
  CHECK(r.criterion_pass(3) == false);
  CHECK(r.criterion_pass(4) == true);
  CHECK_FALSE(r.criterion_pass(9).has_value());
  CHECK_FALSE(r.all_pass());
  const auto j = r.to_json();
  CHECK(j["metrics"].size() == 3);
  CHECK(j["metrics"][0].contains("stderr"));
}

TEST_CASE("config accessors and echo") {
  const auto cfg = parse_config(default_config("consensus"));
  CHECK(cfg.count("n") == 32);
  CHECK(cfg.reals("alphas").size() == 3);
  CHECK(cfg.text("kernel") == "alias");
  CHECK(cfg.echo()["suite"] == "consensus");
  CHECK_THROWS(cfg.real("missing"));
}

TEST_CASE("thread count resolution") {
  auto cfg = parse_config(default_config("duality"));
  cfg.threads = 3;
  CHECK(worker_threads(cfg) == 3u);
  cfg.threads = 0;
  CHECK(worker_threads(cfg) >= 1u);
}
