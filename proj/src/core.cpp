#include "wleach/core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wleach {

double distance(Position a, Position b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

std::string_view to_string(Phase p) noexcept {
  switch (p) {
    case Phase::Setup: return "setup";
    case Phase::WatchdogSelect: return "watchdog-select";
    case Phase::Steady: return "steady";
    case Phase::BlacklistBroadcast: return "blacklist-broadcast";
  }
  return "?";
}

void Clock::enter(Phase p) {
  if (static_cast<int>(p) <= static_cast<int>(phase_)) {
    throw std::logic_error("phase " + std::string(to_string(p)) + " entered after " +
                           std::string(to_string(phase_)));
  }
  phase_ = p;
}

void Clock::next_round() noexcept {
  if (started_) ++round_;
  started_ = true;
  phase_ = Phase::Setup;
  tick_ = 0;
}

std::string_view to_string(RuleId r) noexcept {
  switch (r) {
    case RuleId::Interval: return "interval";
    case RuleId::Retransmission: return "retransmission";
    case RuleId::Integrity: return "integrity";
    case RuleId::Delay: return "delay";
    case RuleId::Repetition: return "repetition";
    case RuleId::Jamming: return "jamming";
    case RuleId::RadioRange: return "radio-range";
    case RuleId::Alarm: return "alarm";
    case RuleId::IntruderWatchdog: return "intruder-watchdog";
  }
  return "?";
}

std::optional<RuleId> rule_from_string(std::string_view s) noexcept {
  for (RuleId r : kAllRules) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

}  // namespace wleach
