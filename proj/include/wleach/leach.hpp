#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "wleach/core.hpp"

namespace wleach {

class Rng;
struct Topology;
struct RadioModel;

/// Formula threshold. Throws std::invalid_argument unless 0 < p <= 1.
double ch_threshold(double p, std::uint32_t round, bool in_g);

/// floor(1/p), at least 1.
std::uint32_t election_period(double p);

struct ElectionState {
  double p_ch = 0.1;
  /// Round each node last served as CH; nullopt if never.
  std::vector<std::optional<std::uint32_t>> last_elected;

  ElectionState() = default;
  ElectionState(double p, std::size_t nodes);

  /// A node is in G when it has not been CH yet in the current epoch of
  /// floor(1/p) rounds.
  bool in_g(NodeId id, std::uint32_t round) const;
};

/// One draw per alive node in id order, whether or not it is eligible.
/// Eligible = alive, not blacklisted, in G. Active CH-kind attackers always
/// elect themselves; active member-kind attackers always decline. Elected
/// nodes leave G. Updates `in_g` on the topology.
std::vector<NodeId> elect_cluster_heads(Topology& topo, ElectionState& state,
                                        std::uint32_t round, Rng& rng);

struct ClusterView {
  NodeId ch = 0;
  std::vector<NodeId> members;  // slot order
  std::map<NodeId, Tick> slots; // member -> offset in the frame

  std::optional<Tick> slot_of(NodeId id) const;
  bool has_member(NodeId id) const { return slots.count(id) != 0; }
};

/// Builds a view whose slots are the member positions, keeping at most
/// `capacity` members; the rest are returned through `overflow`.
ClusterView make_cluster(NodeId ch, std::vector<NodeId> members, std::size_t capacity,
                         std::vector<NodeId>* overflow = nullptr);

struct AdvHeard {
  NodeId ch;
  double rx_power;
};

/// Strongest advertisement wins; ties go to the lower CH id.
std::optional<NodeId> choose_cluster_head(const std::vector<AdvHeard>& heard);

struct Clustering {
  std::vector<ClusterView> clusters;  // CH id order
  std::vector<NodeId> orphans;
};

/// Geometric clustering: every alive, non-blacklisted, non-CH node joins the
/// strongest CH whose advertisement reaches it. Blacklisted CHs are skipped.
/// `adv_multiplier(ch)` gives each CH's advertising power.
Clustering form_clusters(const std::vector<NodeId>& chs, const Topology& topo,
                         const RadioModel& radio, std::size_t capacity,
                         const std::function<double(NodeId)>& adv_multiplier = {});

/// Mean of the values, or nullopt for an empty list (no Aggregate is sent).
std::optional<double> aggregate(const std::vector<double>& values);

}  // namespace wleach
