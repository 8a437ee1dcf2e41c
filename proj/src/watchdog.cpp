#include "wleach/watchdog.hpp"

#include <cmath>
#include <stdexcept>

#include "wleach/rng.hpp"

namespace wleach {

bool roll_watchdog(std::uint32_t m, Rng& rng) {
  if (m < 1) throw std::invalid_argument("roll_watchdog: m must be >= 1");
  return rng.below(m) == 0;
}

double watchdog_count_pmf(std::uint32_t alpha, std::uint32_t n, std::uint32_t m) {
  if (m < 1) throw std::invalid_argument("watchdog_count_pmf: m must be >= 1");
  if (alpha > n) throw std::invalid_argument("watchdog_count_pmf: alpha exceeds n");
  if (m == 1) return alpha == n ? 1.0 : 0.0;
  const double a = alpha;
  const double nn = n;
  const double log_binom = std::lgamma(nn + 1) - std::lgamma(a + 1) - std::lgamma(nn - a + 1);
  const double log_p = log_binom + (nn - a) * std::log(m - 1.0) - nn * std::log(double(m));
  return std::exp(log_p);
}

void CaptureBuffer::push(Captured c) {
  evict(c.rx_tick);
  if (capacity_ == 0) return;
  if (entries_.size() == capacity_) {
    entries_.pop_front();
    ++evicted_;
  }
  entries_.push_back(std::move(c));
}

void CaptureBuffer::evict(Tick now) {
  while (!entries_.empty() && now > entries_.front().rx_tick + max_age_) {
    entries_.pop_front();
    ++evicted_;
  }
}

}  // namespace wleach
