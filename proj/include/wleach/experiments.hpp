#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wleach/config.hpp"
#include "wleach/energy.hpp"
#include "wleach/simulation.hpp"

namespace wleach {

/// Per-round inputs of the analytic formulas for a configured network.
ScenarioParams scenario_from(const SimConfig& cfg);

struct RunResult {
  RunSummary summary;
  std::string metrics_csv;
  std::string events;
};

/// Runs every configured round, keeping the CSV and event log in memory.
RunResult run_collect(const SimConfig& cfg, bool keep_events = true);
/// Same, then writes metrics.csv, events.log and summary.json under `dir`.
RunResult run_to_dir(const SimConfig& cfg, const std::filesystem::path& dir);

enum class SweepAxis { Nwnc, Noa, Protocol };

/// Throws std::invalid_argument for anything but nwnc, noa or protocol.
SweepAxis sweep_axis_from_string(const std::string& s);
std::string_view to_string(SweepAxis a) noexcept;

struct SweepRow {
  std::string axis;
  std::string value;
  std::optional<double> simulated_j;
  double analytic_j = 0.0;
  std::optional<double> simulated_overhead_percent;
  double analytic_overhead_percent = 0.0;
};

/// One independent simulation per value (run concurrently when `parallel`).
/// The noa axis is analytic only. Overheads are relative to the first row;
/// analytic ones compare per-cluster energies (watchdog energy for noa).
std::vector<SweepRow> sweep(const SimConfig& base, SweepAxis axis,
                            const std::vector<std::string>& values, bool parallel = true);
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string sweep_json(const std::vector<SweepRow>& rows);

struct Table3Row {
  std::string name;
  double paper_value_j;
  double computed_j;
  double abs_error_j;
  bool pass;  // within 1 uJ
};

struct Fig4Point {
  std::uint32_t nwnc;
  double network_energy_j;
  double cluster_energy_j;
  double overhead_percent;
};

struct Fig5Point {
  std::uint32_t noa;
  double watchdog_energy_j;
  double ch_total_j;
};

struct PaperReproduction {
  std::vector<Table3Row> table3;
  std::vector<Fig4Point> fig4;  // nwnc 0..5
  std::vector<Fig5Point> fig5;  // noa 0..ncs
  double marginal_cost_per_watchdog_j = 0.0;
  double overhead_percent_per_watchdog = 0.0;
  bool all_pass = false;
};

PaperReproduction reproduce_paper(const ScenarioParams& p = {}, const RadioCostModel& model = {});
/// Writes table3.csv, fig4.csv, fig5.csv and summary.json.
void write_paper_outputs(const PaperReproduction& r, const std::filesystem::path& dir,
                         std::uint32_t rounds = 1000);

std::string table3_csv(const std::vector<Table3Row>& rows);
std::string fig4_csv(const std::vector<Fig4Point>& pts);
std::string fig5_csv(const std::vector<Fig5Point>& pts);

}  // namespace wleach
