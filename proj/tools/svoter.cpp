// Command-line entry point: svoter <suite> --config <path> [overrides].

#include <iostream>

#include <CLI11.hpp>

#include "svoter/errors.hpp"
#include "svoter/harness.hpp"
#include "svoter/io.hpp"

namespace h = svoter::harness;

int main(int argc, char** argv) {
  CLI::App app{"Stubborn voter model experiments"};
  app.set_version_flag("--version", std::string(h::kVersion));
  std::string suite, config_path, out_dir;
  std::uint64_t seed = 0, replicas = 0;
  int threads = -1;
  bool print_default = false;
  app.add_option("suite", suite, "Experiment suite")->required()->check(CLI::IsMember(h::suite_names()));
  app.add_option("--config", config_path, "JSON configuration (defaults to the built-in acceptance settings)");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed override");
  auto* rep_opt = app.add_option("--replicas", replicas, "Replica count override");
  auto* out_opt = app.add_option("--out", out_dir, "Output directory override");
  app.add_option("--threads", threads, "Worker threads (default: SVOTER_THREADS or all cores)");
  app.add_flag("--print-default-config", print_default, "Print the default configuration and exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (print_default) {
      std::cout << h::default_config(suite).dump(2) << '\n';
      return 0;
    }
    nlohmann::json j = config_path.empty() ? h::default_config(suite) : svoter::io::read_json(config_path);
    if (!j.contains("suite")) j["suite"] = suite;
    if (j["suite"] != suite) {
      throw svoter::ConfigError("config file is for suite '" + j["suite"].dump() + "', not '" + suite + "'");
    }
    if (*seed_opt) j["master_seed"] = seed;
    if (*rep_opt) j["replicas"] = replicas;
    if (*out_opt) j["output_dir"] = out_dir;
    if (threads >= 0) j["threads"] = threads;
    const auto cfg = h::parse_config(j);
    const auto report = h::run_suite(cfg);
    for (const auto& m : report.metrics) {
      std::cout << (m.kind == h::Kind::Diagnostic ? "INFO" : m.pass ? "PASS" : "FAIL") << "  "
                << (m.criterion > 0 ? "[" + std::to_string(m.criterion) + "] " : "") << m.name << " = "
                << svoter::io::format_shortest(m.value);
      if (!m.exact) std::cout << " (se " << svoter::io::format_shortest(m.std_error) << ")";
      if (m.kind != h::Kind::Diagnostic) {
        std::cout << ", target " << svoter::io::format_shortest(m.target) << " tol "
                  << svoter::io::format_shortest(m.tolerance);
      }
      std::cout << '\n';
    }
    std::cout << report.suite << ": " << (report.all_pass() ? "PASS" : "FAIL") << " in "
              << report.wall_seconds << " s\n";
    return report.all_pass() ? 0 : 1;
  } catch (const svoter::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
