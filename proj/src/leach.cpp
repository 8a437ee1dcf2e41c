#include "wleach/leach.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "wleach/radio.hpp"
#include "wleach/rng.hpp"
#include "wleach/topology.hpp"

namespace wleach {

double ch_threshold(double p, std::uint32_t round, bool in_g) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("ch_threshold: p must be in (0, 1]");
  if (!in_g) return 0.0;
  const std::uint32_t period = election_period(p);
  const double t = p / (1.0 - p * static_cast<double>(round % period));
  // p * (period - 1) < 1 always, so t is finite; rounding can push it past 1.
  return std::min(t, 1.0);
}

std::uint32_t election_period(double p) {
  const auto period = static_cast<std::uint32_t>(std::floor(1.0 / p));
  return period == 0 ? 1 : period;
}

ElectionState::ElectionState(double p, std::size_t nodes) : p_ch(p), last_elected(nodes) {}

bool ElectionState::in_g(NodeId id, std::uint32_t round) const {
  // G is refilled at the start of every epoch of election_period rounds.
  const auto& last = last_elected.at(id);
  const std::uint32_t period = election_period(p_ch);
  return !last || *last / period < round / period;
}

std::vector<NodeId> elect_cluster_heads(Topology& topo, ElectionState& state,
                                        std::uint32_t round, Rng& rng) {
  std::vector<NodeId> chs;
  for (auto& n : topo.nodes) {
    n.in_g = state.in_g(n.id, round);
    if (!n.alive) continue;
    const double draw = rng.uniform();
    if (n.blacklisted) continue;
    bool elected = draw < ch_threshold(state.p_ch, round, n.in_g);
    if (n.behavior.active(round)) elected = is_ch_attack(*n.behavior.kind);
    if (elected) {
      chs.push_back(n.id);
      state.last_elected[n.id] = round;
      n.in_g = false;
    }
  }
  return chs;
}

std::optional<Tick> ClusterView::slot_of(NodeId id) const {
  auto it = slots.find(id);
  if (it == slots.end()) return std::nullopt;
  return it->second;
}

ClusterView make_cluster(NodeId ch, std::vector<NodeId> members, std::size_t capacity,
                         std::vector<NodeId>* overflow) {
  ClusterView v;
  v.ch = ch;
  if (members.size() > capacity) {
    if (overflow) overflow->insert(overflow->end(), members.begin() + capacity, members.end());
    members.resize(capacity);
  }
  v.members = std::move(members);
  for (std::size_t i = 0; i < v.members.size(); ++i) v.slots[v.members[i]] = i;
  return v;
}

std::optional<NodeId> choose_cluster_head(const std::vector<AdvHeard>& heard) {
  std::optional<AdvHeard> best;
  for (const auto& h : heard) {
    if (!best || h.rx_power > best->rx_power ||
        (h.rx_power == best->rx_power && h.ch < best->ch)) {
      best = h;
    }
  }
  if (!best) return std::nullopt;
  return best->ch;
}

Clustering form_clusters(const std::vector<NodeId>& chs, const Topology& topo,
                         const RadioModel& radio, std::size_t capacity,
                         const std::function<double(NodeId)>& adv_multiplier) {
  std::vector<NodeId> heads;
  for (NodeId ch : chs) {
    if (topo[ch].alive && !topo[ch].blacklisted) heads.push_back(ch);
  }
  std::sort(heads.begin(), heads.end());

  std::map<NodeId, std::vector<NodeId>> joined;
  for (NodeId ch : heads) joined[ch];
  Clustering out;
  for (const auto& n : topo.nodes) {
    if (!n.alive || n.blacklisted) continue;
    if (std::binary_search(heads.begin(), heads.end(), n.id)) continue;
    std::vector<AdvHeard> heard;
    for (NodeId ch : heads) {
      const double mult = adv_multiplier ? adv_multiplier(ch) : 1.0;
      const double d = distance(topo[ch].pos, n.pos);
      if (d <= radio.reach(mult)) heard.push_back({ch, RadioModel::rx_power(mult, d)});
    }
    if (auto ch = choose_cluster_head(heard)) {
      joined[*ch].push_back(n.id);
    } else {
      out.orphans.push_back(n.id);
    }
  }
  for (auto& [ch, members] : joined) {
    out.clusters.push_back(make_cluster(ch, std::move(members), capacity, &out.orphans));
  }
  std::sort(out.orphans.begin(), out.orphans.end());
  return out;
}

std::optional<double> aggregate(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace wleach
