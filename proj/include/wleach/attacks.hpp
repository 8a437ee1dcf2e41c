#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

#include "wleach/core.hpp"

namespace wleach {

class Rng;
struct Topology;

enum class AttackKind : std::uint8_t {
  HelloFlood,
  MessageDelay,
  MessageRepetition,
  Jamming,
  BlackHole,
  SelectiveForwarding,
  Negligence,
  Exhaustion,
  IntegrityTamper,
  PhysicalTamper,
  LyingWatchdog,
};

inline constexpr std::array<AttackKind, 11> kAllAttackKinds = {
    AttackKind::HelloFlood,      AttackKind::MessageDelay,        AttackKind::MessageRepetition,
    AttackKind::Jamming,         AttackKind::BlackHole,           AttackKind::SelectiveForwarding,
    AttackKind::Negligence,      AttackKind::Exhaustion,          AttackKind::IntegrityTamper,
    AttackKind::PhysicalTamper,  AttackKind::LyingWatchdog,
};

/// Kebab-case names as used in config files ("black-hole", ...).
std::string_view to_string(AttackKind k) noexcept;
std::optional<AttackKind> attack_from_string(std::string_view s) noexcept;

/// Kinds that act as cluster heads (they self-elect from start_round on).
/// The rest act as ordinary members and decline election.
bool is_ch_attack(AttackKind k) noexcept;

/// Rules expected to catch each kind.
std::vector<RuleId> expected_rules(AttackKind k);

/// Zero means "derive from the rule config" for delay_ticks and repeat_count.
struct AttackParams {
  double power_multiplier = 4.0;
  std::uint32_t delay_ticks = 0;      // default: 2 x delay timeout
  std::uint32_t repeat_count = 0;     // total copies; default: repetition limit + 2
  double drop_probability = 0.5;
  std::uint32_t exhaustion_multiplier = 3;
  double jam_probability = 0.3;
  double payload_offset = 5.0;
  friend bool operator==(const AttackParams&, const AttackParams&) = default;
};

struct AttackScenario {
  AttackKind kind = AttackKind::BlackHole;
  std::vector<NodeId> attackers;  // explicit ids, or empty with count > 0
  std::uint32_t count = 0;
  std::uint32_t start_round = 1;
  AttackParams params;
  friend bool operator==(const AttackScenario&, const AttackScenario&) = default;
};

/// Attack behaviour attached to a node. Honest nodes have no kind.
struct BehaviorProfile {
  std::optional<AttackKind> kind;
  std::uint32_t start_round = 0;
  AttackParams params;

  bool honest() const noexcept { return !kind; }
  bool active(std::uint32_t round) const noexcept { return kind && round >= start_round; }
  bool is(AttackKind k, std::uint32_t round) const noexcept {
    return active(round) && *kind == k;
  }
};

using GroundTruth = std::set<std::pair<NodeId, RuleId>>;

/// Expected (suspect, rule) pairs. The scenario must have explicit attackers
/// (run inject first to resolve counts).
GroundTruth ground_truth(const AttackScenario& scenario);

/// Installs behaviour profiles. Scenarios with a count draw their attackers
/// uniformly among still-honest nodes, in scenario order; the resolved ids
/// are written back into `scenarios`. Throws std::invalid_argument for
/// start_round < 1, base-station or unknown targets, a node attacked twice,
/// or out-of-range parameters.
void inject(std::vector<AttackScenario>& scenarios, Topology& topo, Rng& rng);

void validate(const AttackScenario& s);

}  // namespace wleach
