#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>

#include "wleach/core.hpp"
#include "wleach/radio.hpp"

namespace wleach {

class Rng;

/// One die roll with `m` sides; true on a 1. Consumes exactly one draw.
/// Throws std::invalid_argument for m < 1.
bool roll_watchdog(std::uint32_t m, Rng& rng);

/// Probability that exactly `alpha` of `n` rollers activate with an m-sided
/// die: C(n, alpha) (m-1)^(n-alpha) / m^n, evaluated in log space.
/// Throws std::invalid_argument for alpha > n or m < 1.
double watchdog_count_pmf(std::uint32_t alpha, std::uint32_t n, std::uint32_t m);

/// A transmission as heard by a watchdog.
struct Captured {
  Transmission tx;
  Tick rx_tick = 0;
  double rx_power = 0.0;
  double distance = 0.0;
  /// Set for foreign advertisements kept only because of their power.
  bool power_note = false;
};

/// Bounded, age-limited history of overheard traffic.
class CaptureBuffer {
 public:
  explicit CaptureBuffer(std::size_t capacity = 64, Tick max_age = 64)
      : capacity_(capacity), max_age_(max_age) {}

  void push(Captured c);
  /// Drops entries older than max_age relative to `now`.
  void evict(Tick now);
  void clear() noexcept { entries_.clear(); }

  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  Tick max_age() const noexcept { return max_age_; }
  const std::deque<Captured>& entries() const noexcept { return entries_; }
  std::uint64_t evicted() const noexcept { return evicted_; }

 private:
  std::size_t capacity_;
  Tick max_age_;
  std::deque<Captured> entries_;
  std::uint64_t evicted_ = 0;
};

/// Filters a delivered transmission into the buffer. Traffic belonging to
/// cluster `own_ch` (sent by the CH or one of `is_member`) is kept; a foreign
/// advertisement is kept, flagged as a power note, only if its implied power
/// exceeds `power_threshold`. Returns whether anything was stored.
template <typename IsMember>
bool capture(CaptureBuffer& buf, const Captured& c, NodeId own_ch, IsMember is_member,
             double power_threshold) {
  const NodeId s = c.tx.sender;
  if (s == own_ch || is_member(s)) {
    buf.push(c);
    return true;
  }
  if (c.tx.kind() == MessageKind::Adv &&
      RadioModel::implied_power(c.rx_power, c.distance) > power_threshold) {
    Captured note = c;
    note.power_note = true;
    buf.push(std::move(note));
    return true;
  }
  return false;
}

}  // namespace wleach
