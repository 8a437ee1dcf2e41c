#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>

namespace wleach {

/// Sensor ids are dense 0..N-1; the base station and broadcast addresses sit
/// outside that range.
using NodeId = std::uint32_t;
inline constexpr NodeId kBaseStationId = std::numeric_limits<NodeId>::max();
inline constexpr NodeId kBroadcastId = kBaseStationId - 1;

/// One tick is one transmission slot.
using Tick = std::uint64_t;

struct Position {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Position&, const Position&) = default;
};

double distance(Position a, Position b) noexcept;

enum class Phase : std::uint8_t { Setup, WatchdogSelect, Steady, BlacklistBroadcast };

std::string_view to_string(Phase p) noexcept;

/// Round/phase/tick bookkeeping. Phases must be entered in declaration order,
/// once per round; ticks never go backwards inside a round.
class Clock {
 public:
  std::uint32_t round() const noexcept { return round_; }
  Phase phase() const noexcept { return phase_; }
  Tick tick() const noexcept { return tick_; }
  bool started() const noexcept { return started_; }

  /// Returns the current tick and moves past it.
  Tick take() noexcept { return tick_++; }
  void skip(Tick n) noexcept { tick_ += n; }

  /// Throws std::logic_error when `p` is not strictly after the current phase.
  void enter(Phase p);

  /// Starts the next round (the first call starts round 0) in Setup at tick 0.
  void next_round() noexcept;

 private:
  std::uint32_t round_ = 0;
  Phase phase_ = Phase::Setup;
  Tick tick_ = 0;
  bool started_ = false;
};

enum class RuleId : std::uint8_t {
  Interval,
  Retransmission,
  Integrity,
  Delay,
  Repetition,
  Jamming,
  RadioRange,
  Alarm,
  IntruderWatchdog,
};

inline constexpr std::array<RuleId, 9> kAllRules = {
    RuleId::Interval,   RuleId::Retransmission, RuleId::Integrity,
    RuleId::Delay,      RuleId::Repetition,     RuleId::Jamming,
    RuleId::RadioRange, RuleId::Alarm,          RuleId::IntruderWatchdog,
};

std::string_view to_string(RuleId r) noexcept;
std::optional<RuleId> rule_from_string(std::string_view s) noexcept;

}  // namespace wleach
