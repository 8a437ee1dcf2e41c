#include "wleach/radio.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wleach/topology.hpp"

namespace wleach {

namespace {

constexpr double kMinD2 = 1e-6;

double footprint(const Transmission& tx, const RadioModel& radio) {
  return tx.power == PowerClass::LongRange ? radio.range : radio.reach(tx.power_multiplier);
}

}  // namespace

double RadioModel::reach(double power_multiplier) const noexcept {
  return range * std::sqrt(power_multiplier);
}

double RadioModel::rx_power(double power_multiplier, double d) noexcept {
  return power_multiplier / std::max(d * d, kMinD2);
}

double RadioModel::implied_power(double p_rx, double d) noexcept {
  return p_rx * std::max(d * d, kMinD2);
}

NeighborIndex::NeighborIndex(const Topology& topo, double radius) : radius_(radius) {
  const auto n = topo.nodes.size();
  lists_.assign(n, {});
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (distance(topo.nodes[a].pos, topo.nodes[b].pos) <= radius) {
        lists_[a].push_back(static_cast<NodeId>(b));
        lists_[b].push_back(static_cast<NodeId>(a));
      }
    }
  }
  for (auto& l : lists_) std::sort(l.begin(), l.end());
}

std::vector<NodeId> broadcast(const Transmission& tx, const Topology& topo,
                              const RadioModel& radio, const NeighborIndex* index) {
  const auto& sender = topo[tx.sender];
  if (!sender.alive) throw std::logic_error("broadcast from dead node");
  const double reach = footprint(tx, radio);
  std::vector<NodeId> out;
  auto consider = [&](NodeId id) {
    if (id == tx.sender) return;
    const auto& n = topo.nodes[id];
    if (n.alive && distance(sender.pos, n.pos) <= reach) out.push_back(id);
  };
  if (index && index->radius() >= reach) {
    for (NodeId id : index->of(tx.sender)) consider(id);
  } else {
    for (NodeId id = 0; id < topo.nodes.size(); ++id) consider(id);
  }
  return out;
}

TickOutcome resolve_tick(const std::vector<Transmission>& txs, const Topology& topo,
                         const RadioModel& radio, const TuneFn& tune,
                         const NeighborIndex* index) {
  // (receiver, tx index) for every arrival on the receiver's channel.
  std::vector<std::pair<NodeId, std::size_t>> arrivals;
  for (std::size_t i = 0; i < txs.size(); ++i) {
    const auto& tx = txs[i];
    for (NodeId r : broadcast(tx, topo, radio, index)) {
      const auto ch = tune(r);
      if (!ch) continue;
      if (tx.noise || tx.channel == *ch) arrivals.emplace_back(r, i);
    }
  }
  std::sort(arrivals.begin(), arrivals.end());

  TickOutcome out;
  for (std::size_t a = 0; a < arrivals.size();) {
    std::size_t b = a;
    while (b < arrivals.size() && arrivals[b].first == arrivals[a].first) ++b;
    const NodeId r = arrivals[a].first;
    if (b - a == 1) {
      const auto& tx = txs[arrivals[a].second];
      if (!tx.noise) {
        const double d = distance(topo[tx.sender].pos, topo[r].pos);
        const double mult = tx.power == PowerClass::LongRange ? 1.0 : tx.power_multiplier;
        out.deliveries.push_back({r, arrivals[a].second, RadioModel::rx_power(mult, d), d});
      }
    } else {
      CollisionEvent ev{r, txs[arrivals[a].second].tick, static_cast<std::uint32_t>(b - a - 1), {}};
      for (std::size_t k = a; k < b; ++k) ev.senders.push_back(txs[arrivals[k].second].sender);
      std::sort(ev.senders.begin(), ev.senders.end());
      out.collisions.push_back(std::move(ev));
    }
    a = b;
  }
  return out;
}

}  // namespace wleach
