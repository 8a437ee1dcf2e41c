// wleach: run, sweep and reproduce Watchdog-LEACH experiments.
//
// Exit codes: 0 ok, 1 usage or I/O error, 2 config error, 3 internal
// invariant violated.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wleach/config.hpp"
#include "wleach/experiments.hpp"
#include "wleach/simulation.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kConfig = 2, kInvariant = 3 };

std::vector<std::string> split_values(const std::string& s) {
  std::vector<std::string> out;
  // Ranges like 0..5 expand to every integer in between.
  if (auto dots = s.find(".."); dots != std::string::npos) {
    const long lo = std::stol(s.substr(0, dots));
    const long hi = std::stol(s.substr(dots + 2));
    for (long v = lo; v <= hi; ++v) out.push_back(std::to_string(v));
    return out;
  }
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

wleach::SimConfig load(const std::string& path, std::optional<std::uint64_t> seed) {
  auto cfg = wleach::load_config(path);
  if (seed) cfg.seed = *seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Watchdog-LEACH wireless sensor network simulator"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string format = "csv";
  bool quiet = false;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--format", format, "Stdout format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--quiet", quiet, "Print nothing on success");
  };

  std::string config_path;
  auto* run = app.add_subcommand("run", "Simulate the configured rounds");
  run->add_option("config", config_path, "Config file (JSON)")->required();
  common(run);

  std::string axis;
  std::string values;
  bool serial = false;
  auto* sweep = app.add_subcommand("sweep", "One run per axis value, with analytic columns");
  sweep->add_option("config", config_path, "Config file (JSON)")->required();
  sweep->add_option("--axis", axis, "nwnc, noa or protocol")->required();
  sweep->add_option("--values", values, "Comma list or lo..hi range")->required();
  sweep->add_flag("--serial", serial, "Run rows one after another");
  common(sweep);

  auto* paper = app.add_subcommand("reproduce-paper", "Analytic energy table and figure series");
  common(paper);

  auto* check = app.add_subcommand("validate", "Parse and validate a config");
  check->add_option("config", config_path, "Config file (JSON)")->required();
  common(check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*run) {
      const auto cfg = load(config_path, seed);
      wleach::RunResult r = out_dir.empty() ? wleach::run_collect(cfg, false)
                                            : wleach::run_to_dir(cfg, out_dir);
      if (!quiet) std::cout << (format == "json" ? wleach::to_json(r.summary) : r.metrics_csv);
    } else if (*sweep) {
      const auto cfg = load(config_path, seed);
      const auto rows = wleach::sweep(cfg, wleach::sweep_axis_from_string(axis),
                                      split_values(values), !serial);
      const std::string csv = wleach::sweep_csv(rows);
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream(std::filesystem::path(out_dir) / "sweep.csv") << csv;
      }
      if (!quiet) std::cout << (format == "json" ? wleach::sweep_json(rows) : csv);
    } else if (*paper) {
      const auto r = wleach::reproduce_paper();
      wleach::write_paper_outputs(r, out_dir.empty() ? "paper_out" : out_dir);
      if (!quiet) {
        std::cout << wleach::table3_csv(r.table3);
        std::printf("overhead_percent_per_watchdog=%.4f\n", r.overhead_percent_per_watchdog);
      }
      return r.all_pass ? kOk : kInvariant;
    } else if (*check) {
      const auto cfg = load(config_path, seed);
      if (!quiet) std::cout << (format == "json" ? wleach::to_json(cfg) : "ok\n");
    }
  } catch (const wleach::ConfigError& e) {
    std::cerr << "config error [" << e.key() << "]: " << e.what() << '\n';
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::logic_error& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return kInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}
