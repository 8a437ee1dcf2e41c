#include "wleach/attacks.hpp"

#include <stdexcept>
#include <string>

#include "wleach/rng.hpp"
#include "wleach/topology.hpp"

namespace wleach {

std::string_view to_string(AttackKind k) noexcept {
  switch (k) {
    case AttackKind::HelloFlood: return "hello-flood";
    case AttackKind::MessageDelay: return "message-delay";
    case AttackKind::MessageRepetition: return "message-repetition";
    case AttackKind::Jamming: return "jamming";
    case AttackKind::BlackHole: return "black-hole";
    case AttackKind::SelectiveForwarding: return "selective-forwarding";
    case AttackKind::Negligence: return "negligence";
    case AttackKind::Exhaustion: return "exhaustion";
    case AttackKind::IntegrityTamper: return "integrity-tamper";
    case AttackKind::PhysicalTamper: return "physical-tamper";
    case AttackKind::LyingWatchdog: return "lying-watchdog";
  }
  return "?";
}

std::optional<AttackKind> attack_from_string(std::string_view s) noexcept {
  for (AttackKind k : kAllAttackKinds) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

bool is_ch_attack(AttackKind k) noexcept {
  switch (k) {
    case AttackKind::HelloFlood:
    case AttackKind::BlackHole:
    case AttackKind::SelectiveForwarding:
    case AttackKind::MessageDelay:
    case AttackKind::IntegrityTamper:
      return true;
    default:
      return false;
  }
}

std::vector<RuleId> expected_rules(AttackKind k) {
  switch (k) {
    case AttackKind::HelloFlood: return {RuleId::RadioRange};
    case AttackKind::MessageDelay: return {RuleId::Interval, RuleId::Delay};
    case AttackKind::MessageRepetition: return {RuleId::Repetition};
    case AttackKind::Jamming: return {RuleId::Jamming};
    case AttackKind::BlackHole:
    case AttackKind::SelectiveForwarding:
      return {RuleId::Delay, RuleId::Retransmission};
    case AttackKind::Negligence:
    case AttackKind::Exhaustion:
      return {RuleId::Interval};
    case AttackKind::IntegrityTamper: return {RuleId::Integrity};
    case AttackKind::PhysicalTamper: return {RuleId::Alarm};
    case AttackKind::LyingWatchdog: return {RuleId::IntruderWatchdog};
  }
  return {};
}

GroundTruth ground_truth(const AttackScenario& scenario) {
  GroundTruth gt;
  for (NodeId a : scenario.attackers) {
    for (RuleId r : expected_rules(scenario.kind)) gt.emplace(a, r);
  }
  return gt;
}

void validate(const AttackScenario& s) {
  const std::string name(to_string(s.kind));
  if (s.start_round < 1) throw std::invalid_argument(name + ": start_round must be >= 1");
  if (s.attackers.empty() && s.count == 0) {
    throw std::invalid_argument(name + ": needs attackers or a positive count");
  }
  for (NodeId a : s.attackers) {
    if (a == kBaseStationId) throw std::invalid_argument(name + ": the base station cannot be attacked");
  }
  const auto& p = s.params;
  if (!(p.power_multiplier >= 1.0)) throw std::invalid_argument(name + ": power_multiplier must be >= 1");
  if (!(p.drop_probability >= 0.0 && p.drop_probability <= 1.0)) {
    throw std::invalid_argument(name + ": drop_probability must be in [0, 1]");
  }
  if (!(p.jam_probability >= 0.0 && p.jam_probability <= 1.0)) {
    throw std::invalid_argument(name + ": jam_probability must be in [0, 1]");
  }
  if (p.exhaustion_multiplier < 2) {
    throw std::invalid_argument(name + ": exhaustion_multiplier must be >= 2");
  }
  if (s.params.repeat_count == 1) {
    throw std::invalid_argument(name + ": repeat_count must be >= 2 (or 0 for the default)");
  }
}

void inject(std::vector<AttackScenario>& scenarios, Topology& topo, Rng& rng) {
  for (auto& s : scenarios) {
    validate(s);
    const std::string name(to_string(s.kind));
    if (s.attackers.empty()) {
      std::vector<NodeId> pool;
      for (const auto& n : topo.nodes) {
        if (n.behavior.honest()) pool.push_back(n.id);
      }
      if (pool.size() < s.count) throw std::invalid_argument(name + ": not enough honest nodes");
      for (std::uint32_t i = 0; i < s.count; ++i) {
        const auto k = rng.below(pool.size());
        s.attackers.push_back(pool[k]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
      }
    }
    for (NodeId a : s.attackers) {
      if (a >= topo.size()) {
        throw std::invalid_argument(name + ": attacker " + std::to_string(a) + " is not a node");
      }
      auto& b = topo[a].behavior;
      if (!b.honest()) {
        throw std::invalid_argument(name + ": node " + std::to_string(a) + " already attacks");
      }
      b.kind = s.kind;
      b.start_round = s.start_round;
      b.params = s.params;
    }
  }
}

}  // namespace wleach
