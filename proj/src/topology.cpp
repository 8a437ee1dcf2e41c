#include "wleach/topology.hpp"

#include <stdexcept>

#include "wleach/rng.hpp"

namespace wleach {

std::string_view to_string(Role r) noexcept {
  switch (r) {
    case Role::Sensor: return "sensor";
    case Role::ClusterHead: return "ch";
    case Role::Watchdog: return "watchdog";
    case Role::Orphan: return "orphan";
  }
  return "?";
}

Topology deploy(const DeployParams& params, Rng& rng) {
  if (params.nodes == 0) throw std::invalid_argument("deploy: node count must be >= 1");
  if (!(params.area.width > 0.0) || !(params.area.height > 0.0)) {
    throw std::invalid_argument("deploy: area dimensions must be positive");
  }
  Topology t;
  t.area = params.area;
  t.nodes.reserve(params.nodes);
  for (NodeId id = 0; id < params.nodes; ++id) {
    NodeState n;
    n.id = id;
    n.pos.x = rng.uniform(0.0, params.area.width);
    n.pos.y = rng.uniform(0.0, params.area.height);
    n.base_value = rng.uniform(10.0, 30.0);
    n.initial_energy = params.initial_energy;
    t.nodes.push_back(n);
  }
  t.bs = params.bs ? *params.bs
                   : place_base_station(t.nodes, params.area, params.bs_mean_distance);
  return t;
}

double mean_distance(const std::vector<NodeState>& nodes, Position p) {
  if (nodes.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& n : nodes) sum += distance(n.pos, p);
  return sum / static_cast<double>(nodes.size());
}

Position place_base_station(const std::vector<NodeState>& nodes, Area area, double target) {
  const Position centre{area.width / 2.0, area.height / 2.0};
  if (mean_distance(nodes, centre) >= target) return centre;
  // Mean distance grows without bound along the ray, and by at most 1 m per m.
  double lo = 0.0;
  double hi = target + area.width + area.height;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mean_distance(nodes, {centre.x, centre.y + mid}) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {centre.x, centre.y + 0.5 * (lo + hi)};
}

}  // namespace wleach
