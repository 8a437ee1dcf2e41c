#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "wleach/attacks.hpp"
#include "wleach/core.hpp"
#include "wleach/energy.hpp"

namespace wleach {

class Rng;

enum class Role : std::uint8_t { Sensor, ClusterHead, Watchdog, Orphan };

std::string_view to_string(Role r) noexcept;

struct NodeState {
  NodeId id = 0;
  Position pos;
  bool alive = true;
  double initial_energy = 0.0;
  EnergyLedger ledger;
  Role role = Role::Orphan;
  bool in_g = true;
  bool blacklisted = false;
  BehaviorProfile behavior;
  /// Centre of the node's synthetic readings.
  double base_value = 0.0;
};

struct Area {
  double width = 200.0;
  double height = 200.0;
};

struct DeployParams {
  std::uint32_t nodes = 1000;
  Area area;
  /// Empty: place the base station so the mean node distance is `bs_mean_distance`.
  std::optional<Position> bs;
  double bs_mean_distance = 100.0;
  double initial_energy = 20.0;
};

struct Topology {
  std::vector<NodeState> nodes;
  Position bs;
  Area area;

  std::size_t size() const noexcept { return nodes.size(); }
  NodeState& operator[](NodeId id) { return nodes.at(id); }
  const NodeState& operator[](NodeId id) const { return nodes.at(id); }
};

/// Draws x, y and a base reading for each node in id order (three draws per
/// node). Throws std::invalid_argument for zero nodes or a degenerate area.
Topology deploy(const DeployParams& params, Rng& rng);

double mean_distance(const std::vector<NodeState>& nodes, Position p);

/// Base station on the vertical line through the area centre, above the
/// centre, at the height where the mean node distance equals `target`
/// (bisection). If even the centre is farther than `target` on average, the
/// centre is returned.
Position place_base_station(const std::vector<NodeState>& nodes, Area area, double target);

}  // namespace wleach
