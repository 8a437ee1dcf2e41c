#include "wleach/detection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace wleach {

void RuleConfig::validate() const {
  auto require = [](bool ok, const char* field) {
    if (!ok) throw std::invalid_argument(std::string("rules.") + field + " out of range");
  };
  require(baseline >= 0.0, "baseline");
  require(weight > 0.0 && weight < 1.0, "weight");
  require(alert_threshold >= 1, "alert_threshold");
  require(interval_min > 0 && interval_min <= interval_max, "interval_min");
  require(delay_timeout > 0, "delay_timeout");
  require(repetition_limit >= 1, "repetition_limit");
  require(power_threshold > 0.0, "power_threshold");
  require(integrity_tolerance > 0.0, "integrity_tolerance");
  require(buffer_capacity >= 1, "buffer_capacity");
}

FailureRecord fresh_record(NodeId suspect, RuleId rule, const RuleConfig& cfg) {
  FailureRecord r;
  r.suspect = suspect;
  r.rule = rule;
  r.cumulative = cfg.baseline;
  return r;
}

DetectResult detect(FailureRecord record, double round_failure, const RuleConfig& cfg, Tick now) {
  if (round_failure > record.cumulative) {
    if (record.indications == 0) record.first_time = now;
    record.last_time = now;
    ++record.sum;
    ++record.indications;
    return {true, record};
  }
  record.cumulative = (1.0 - cfg.weight) * record.cumulative + cfg.weight * round_failure;
  return {false, record};
}

std::optional<msg::Alert> maybe_alert(FailureRecord& record, const RuleConfig& cfg,
                                      NodeId watchdog) {
  if (record.sum <= cfg.alert_threshold) return std::nullopt;
  msg::Alert a{watchdog, record.suspect, record.rule, record.last_time, record.sum};
  record.sum = 0;
  return a;
}

namespace {

bool collided_at(const WindowContext& ctx, Tick t) {
  return std::any_of(ctx.collisions.begin(), ctx.collisions.end(),
                     [t](const CollisionEvent& e) { return e.tick == t; });
}

void evaluate_steady(const std::vector<const Captured*>& heard, const ClusterView& cluster,
                     const WindowContext& ctx, MonitorMemory& memory, const RuleConfig& cfg,
                     FailureCounts& out) {
  const NodeId ch = cluster.ch;
  const Tick k = cluster.members.size();
  auto watched = [&](NodeId s) {
    return s != ctx.self && ctx.monitored.count(s) && !ctx.blacklisted.count(s);
  };
  auto bump = [&](NodeId s, RuleId r, std::uint32_t n = 1) {
    if (watched(s)) out[{s, r}] += n;
  };

  // Zero entries for everything this window evaluates.
  for (NodeId s : ctx.monitored) {
    if (!watched(s)) continue;
    const bool is_ch = s == ch;
    out[{s, RuleId::Repetition}];
    out[{s, RuleId::Jamming}];
    out[{s, RuleId::RadioRange}];
    if (is_ch) {
      out[{s, RuleId::Retransmission}];
      out[{s, RuleId::Delay}];
      out[{s, RuleId::Integrity}];
    } else if (!ctx.co_watchdogs.count(s)) {
      out[{s, RuleId::Interval}];
    }
  }

  std::map<NodeId, std::vector<Tick>> data_ticks;
  std::map<NodeId, double> slot_value;  // value heard in the member's own slot
  std::map<std::tuple<NodeId, std::uint64_t>, std::uint32_t> copies;
  const msg::Aggregate* agg = nullptr;
  Tick agg_tick = 0;
  bool member_data_to_ch = false;

  for (const Captured* c : heard) {
    const auto& tx = c->tx;
    if (tx.power == PowerClass::Local &&
        RadioModel::implied_power(c->rx_power, c->distance) > cfg.power_threshold) {
      bump(tx.sender, RuleId::RadioRange);
    }
    if (const auto* d = std::get_if<msg::Data>(&tx.payload)) {
      if (tx.sender == ch || !cluster.has_member(tx.sender)) continue;
      data_ticks[tx.sender].push_back(c->rx_tick);
      ++copies[{tx.sender, d->seq}];
      if (d->ch == ch) member_data_to_ch = true;
      if (c->rx_tick - ctx.start == *cluster.slot_of(tx.sender)) slot_value[tx.sender] = d->value;
    } else if (const auto* a = std::get_if<msg::Aggregate>(&tx.payload)) {
      if (tx.sender == ch && !agg) {
        agg = a;
        agg_tick = c->rx_tick;
      }
    } else if (const auto* al = std::get_if<msg::AlarmLocal>(&tx.payload)) {
      memory.alarmed.insert(al->src);
    }
  }

  // Interval: gaps between consecutive Data, and a silent slot.
  for (NodeId m : cluster.members) {
    if (!watched(m) || ctx.co_watchdogs.count(m)) continue;
    const Tick slot_tick = ctx.start + *cluster.slot_of(m);
    auto& ticks = data_ticks[m];
    std::sort(ticks.begin(), ticks.end());
    std::uint32_t failures = 0;
    auto last = memory.last_data.find(m);
    std::optional<Tick> prev;
    if (last != memory.last_data.end()) prev = last->second;
    for (Tick t : ticks) {
      if (prev) {
        const Tick gap = t - *prev;
        if (gap < cfg.interval_min || gap > cfg.interval_max) ++failures;
      }
      prev = t;
    }
    const bool heard_in_slot = std::find(ticks.begin(), ticks.end(), slot_tick) != ticks.end();
    if (!heard_in_slot) {
      if (collided_at(ctx, slot_tick)) {
        // Lost to a collision: not the member's fault, and the gap is unknown.
        if (ticks.empty()) {
          memory.last_data.erase(m);
          prev.reset();
        }
      } else {
        ++failures;
      }
    }
    if (prev) memory.last_data[m] = *prev;
    bump(m, RuleId::Interval, failures);
  }

  // Repetition.
  for (const auto& [key, n] : copies) {
    if (n > cfg.repetition_limit) bump(std::get<0>(key), RuleId::Repetition, n - cfg.repetition_limit);
  }

  // Jamming: collisions blamed on whoever was not entitled to the tick.
  std::map<NodeId, std::uint32_t> blamed;
  for (const auto& ev : ctx.collisions) {
    const Tick off = ev.tick - ctx.start;
    for (NodeId s : ev.senders) {
      if (s == ch) continue;
      if (off < k && cluster.members[off] == s) continue;
      if (!cluster.has_member(s)) continue;
      ++blamed[s];
    }
  }
  for (const auto& [s, n] : blamed) {
    if (n > cfg.collision_baseline) bump(s, RuleId::Jamming, n - cfg.collision_baseline);
  }

  if (k > 0) {
    const Tick last_slot = ctx.start + k - 1;
    // Retransmission: data went in, nothing came out.
    if (member_data_to_ch && !agg) {
      const bool excused = std::any_of(ctx.collisions.begin(), ctx.collisions.end(),
                                       [&](const CollisionEvent& e) { return e.tick > last_slot; });
      if (!excused) bump(ch, RuleId::Retransmission);
    }
    if (agg) {
      if (agg_tick > last_slot + cfg.delay_timeout) bump(ch, RuleId::Delay);
      // Integrity: recompute only when every contributor was heard in its slot.
      std::vector<double> values;
      bool complete = !agg->contributors.empty();
      for (NodeId m : agg->contributors) {
        auto it = slot_value.find(m);
        if (it == slot_value.end()) {
          complete = false;
          break;
        }
        values.push_back(it->second);
      }
      if (complete) {
        const double mean = *aggregate(values);
        if (std::abs(agg->value - mean) > cfg.integrity_tolerance * std::max(1.0, std::abs(mean))) {
          bump(ch, RuleId::Integrity);
        }
      }
    }
  }
}

void evaluate_setup(const std::vector<const Captured*>& heard, const WindowContext& ctx,
                    MonitorMemory& memory, const RuleConfig& cfg, FailureCounts& out) {
  auto watched = [&](NodeId s) { return s != ctx.self && !ctx.blacklisted.count(s); };
  std::map<std::pair<NodeId, MessageKind>, std::uint32_t> copies;
  for (const Captured* c : heard) {
    const auto& tx = c->tx;
    if (!watched(tx.sender)) continue;
    out[{tx.sender, RuleId::RadioRange}];
    out[{tx.sender, RuleId::Repetition}];
    if (tx.power == PowerClass::Local &&
        RadioModel::implied_power(c->rx_power, c->distance) > cfg.power_threshold) {
      ++out[{tx.sender, RuleId::RadioRange}];
    }
    if (c->power_note) continue;
    ++copies[{tx.sender, tx.kind()}];
    if (const auto* al = std::get_if<msg::AlarmLocal>(&tx.payload)) memory.alarmed.insert(al->src);
  }
  for (const auto& [key, n] : copies) {
    if (n > cfg.repetition_limit) out[{key.first, RuleId::Repetition}] += n - cfg.repetition_limit;
  }
}

}  // namespace

FailureCounts evaluate_rules(const CaptureBuffer& buffer, const ClusterView* cluster,
                             const WindowContext& ctx, MonitorMemory& memory,
                             const RuleConfig& cfg) {
  std::vector<const Captured*> heard;
  for (const auto& c : buffer.entries()) {
    if (c.rx_tick >= ctx.start && c.rx_tick < ctx.end) heard.push_back(&c);
  }
  FailureCounts out;
  if (ctx.kind == WindowKind::Steady) {
    if (!cluster) throw std::invalid_argument("evaluate_rules: steady window needs a cluster");
    evaluate_steady(heard, *cluster, ctx, memory, cfg, out);
  } else {
    evaluate_setup(heard, ctx, memory, cfg, out);
  }
  for (NodeId s : memory.alarmed) {
    if (s != ctx.self && !ctx.blacklisted.count(s)) out[{s, RuleId::Alarm}] = 1;
  }
  return out;
}

std::optional<msg::Alert> cross_check(const msg::Alert& alert, NodeId self,
                                      const SessionView& view, const RecordStore& records,
                                      Tick now) {
  if (alert.watchdog == self || alert.attack_id == RuleId::IntruderWatchdog) return std::nullopt;
  const NodeId s = alert.suspect;
  if (!view.audible.count(s)) return std::nullopt;
  if (!view.evaluated.count({s, alert.attack_id})) return std::nullopt;
  if (auto it = view.failures.find(s); it != view.failures.end() && it->second > 0) {
    return std::nullopt;
  }
  for (RuleId r : kAllRules) {
    auto it = records.find({s, r});
    if (it != records.end() && it->second.indications > 0) return std::nullopt;
  }
  return msg::Alert{self, alert.watchdog, RuleId::IntruderWatchdog, now, 1};
}

BlacklistUpdate bs_update_blacklist(const std::vector<msg::Alert>& alerts, BlacklistState& state,
                                    const BlacklistPolicy& policy) {
  BlacklistUpdate up;
  std::map<NodeId, std::uint32_t> own;
  std::map<NodeId, std::uint32_t> countered;
  for (const auto& a : alerts) {
    ++own[a.watchdog];
    if (a.attack_id == RuleId::IntruderWatchdog) ++countered[a.suspect];
  }
  std::set<NodeId> liars;
  if (policy.discard_liar_alerts) {
    for (const auto& [w, n] : countered) {
      if (n > own[w]) liars.insert(w);
    }
  }
  for (const auto& a : alerts) {
    if (state.ids.count(a.watchdog) || liars.count(a.watchdog)) {
      up.discarded.push_back(a);
      continue;
    }
    up.accepted.push_back(a);
    auto& who = state.corroborators[a.suspect];
    who.insert(a.watchdog);
    if (who.size() >= policy.quorum && state.ids.insert(a.suspect).second) {
      up.added.push_back(a.suspect);
    }
  }
  return up;
}

}  // namespace wleach
