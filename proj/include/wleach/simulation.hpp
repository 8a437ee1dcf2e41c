#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "wleach/config.hpp"
#include "wleach/detection.hpp"
#include "wleach/leach.hpp"
#include "wleach/radio.hpp"
#include "wleach/rng.hpp"
#include "wleach/topology.hpp"
#include "wleach/watchdog.hpp"

namespace wleach {

/// One row of metrics.csv. Per-role means cover the round up to (not
/// including) the blacklist broadcast; energy_total_j includes it.
struct RoundMetrics {
  std::uint32_t round = 0;
  double energy_ch_mean_j = 0.0;
  double energy_watchdog_mean_j = 0.0;
  double energy_sensor_mean_j = 0.0;
  double energy_total_j = 0.0;
  std::uint32_t alerts = 0;
  std::uint32_t true_positives = 0;
  std::uint32_t false_positives = 0;
  std::uint32_t blacklist_size = 0;
  std::uint32_t alive_nodes = 0;
  std::uint32_t orphaned_nodes = 0;
  std::uint32_t clusters = 0;
  std::uint32_t zero_watchdog_clusters = 0;
  std::uint32_t watchdogs = 0;
  std::uint64_t collisions = 0;
  // Role populations behind the means (not in the CSV).
  std::uint32_t ch_count = 0;
  std::uint32_t sensor_count = 0;
};

std::string metrics_csv_header();
std::string to_csv_row(const RoundMetrics& m);

/// An alert as it reached the base station.
struct BsAlert {
  std::uint32_t round;
  msg::Alert alert;
  bool accepted;
  bool true_positive;
};

struct ScenarioOutcome {
  AttackKind kind;
  std::vector<NodeId> attackers;
  std::uint32_t start_round;
  /// Attackers named by an accepted alert with one of the expected rules.
  std::uint32_t attackers_detected = 0;
  std::optional<std::uint32_t> latency_rounds;  // to the first such alert
  std::uint32_t attackers_blacklisted = 0;
};

struct RunSummary {
  std::uint64_t seed = 0;
  Protocol protocol = Protocol::WatchdogLeach;
  std::uint32_t nodes = 0;
  std::uint32_t rounds = 0;
  Position bs;
  double total_energy_j = 0.0;
  double mean_round_energy_j = 0.0;
  std::uint64_t alerts = 0;
  std::uint64_t true_positives = 0;
  std::uint64_t false_positives = 0;
  std::uint64_t collisions = 0;
  std::uint32_t empty_rounds = 0;
  std::uint32_t zero_watchdog_clusters = 0;
  std::uint32_t alive_nodes = 0;
  std::vector<NodeId> blacklist;
  std::vector<ScenarioOutcome> scenarios;
  /// Fraction of attackers of each kind detected with an expected rule.
  std::map<std::string, double> detection_rate;
};

std::string to_json(const RunSummary& s);

/// Deterministic Watchdog-LEACH world. Construction deploys the nodes and
/// installs the attacks; every step() plays one full round.
class Simulation {
 public:
  /// `events`, if given, receives one line per radio or protocol event.
  explicit Simulation(SimConfig cfg, std::ostream* events = nullptr);
  ~Simulation();
  Simulation(Simulation&&) noexcept;
  Simulation& operator=(Simulation&&) noexcept;

  const RoundMetrics& step();
  /// Plays the remaining configured rounds; returns the summary.
  RunSummary run();

  const SimConfig& config() const noexcept;
  const Topology& topology() const noexcept;
  const std::vector<RoundMetrics>& metrics() const noexcept;
  const std::vector<BsAlert>& bs_alerts() const noexcept;
  const BlacklistState& blacklist() const noexcept;
  /// Attack scenarios with attackers resolved.
  const std::vector<AttackScenario>& scenarios() const noexcept;
  /// Clusters of the last round played.
  const std::vector<ClusterView>& clusters() const noexcept;
  /// Watchdogs of the last round played.
  const std::set<NodeId>& watchdogs() const noexcept;
  const Rng& rng() const noexcept;
  RunSummary summary() const;
  std::uint32_t rounds_played() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace wleach
