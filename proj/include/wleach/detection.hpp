#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "wleach/core.hpp"
#include "wleach/leach.hpp"
#include "wleach/message.hpp"
#include "wleach/radio.hpp"
#include "wleach/watchdog.hpp"

namespace wleach {

struct RuleConfig {
  /// Initial cumulative value: the tolerated failures per window.
  double baseline = 0.5;
  double weight = 0.5;                // EWMA weight of the newest window
  std::uint32_t alert_threshold = 1;  // alert when sum > threshold
  Tick interval_min = 62;             // allowed gap between a member's Data
  Tick interval_max = 66;
  Tick delay_timeout = 2;             // ticks after the last slot
  std::uint32_t repetition_limit = 1; // copies of one (src, seq)
  std::uint32_t collision_baseline = 0;
  double power_threshold = 2.0;       // implied power, honest = 1
  double integrity_tolerance = 1e-9;  // relative
  std::size_t buffer_capacity = 64;

  /// Throws std::invalid_argument naming the field.
  void validate() const;
};

/// Detection state for one (suspect, rule) at one watchdog.
struct FailureRecord {
  NodeId suspect = 0;
  RuleId rule = RuleId::Interval;
  Tick first_time = 0;
  Tick last_time = 0;
  std::uint32_t sum = 0;
  double cumulative = 0.0;
  /// Indications over the whole run; sum is reset by alerting, this is not.
  std::uint32_t indications = 0;
  friend bool operator==(const FailureRecord&, const FailureRecord&) = default;
};

using FailureKey = std::pair<NodeId, RuleId>;
using FailureCounts = std::map<FailureKey, std::uint32_t>;
using RecordStore = std::map<FailureKey, FailureRecord>;

FailureRecord fresh_record(NodeId suspect, RuleId rule, const RuleConfig& cfg);

struct DetectResult {
  bool indicated;
  FailureRecord record;
};

/// One step of the cumulative-failure comparison. An indication (round
/// failure strictly above the cumulative value) bumps sum and leaves the
/// cumulative value alone; otherwise the cumulative value absorbs the window
/// as (1-w) c + w f.
DetectResult detect(FailureRecord record, double round_failure, const RuleConfig& cfg, Tick now);

/// Alert when sum exceeds the threshold; sum restarts from zero afterwards.
std::optional<msg::Alert> maybe_alert(FailureRecord& record, const RuleConfig& cfg,
                                      NodeId watchdog);

enum class WindowKind : std::uint8_t { SetupAdv, SetupJoin, SetupSched, Steady };

/// What the watchdog needs to know besides the captured traffic.
struct WindowContext {
  WindowKind kind = WindowKind::Steady;
  NodeId self = 0;
  Tick start = 0;  // first tick of the window
  Tick end = 0;    // one past the last tick
  /// Suspects this watchdog can hear (CH and in-range members for a steady
  /// window; ignored for setup windows, where every captured sender counts).
  std::set<NodeId> monitored;
  /// Other watchdogs of the cluster: their slots are expected to be silent.
  std::set<NodeId> co_watchdogs;
  std::set<NodeId> blacklisted;
  std::vector<CollisionEvent> collisions;  // at this watchdog, inside the window
};

/// State carried between windows of one watchdog.
struct MonitorMemory {
  std::map<NodeId, Tick> last_data;  // tick of each member's last Data
  std::set<NodeId> alarmed;          // persistent tamper alarms
};

/// Failure counts per (suspect, rule) for the window, including zero counts
/// for every pair that was evaluated. `cluster` is required for steady windows.
FailureCounts evaluate_rules(const CaptureBuffer& buffer, const ClusterView* cluster,
                             const WindowContext& ctx, MonitorMemory& memory,
                             const RuleConfig& cfg);

/// What one watchdog saw during one monitoring session (a setup phase or a
/// steady phase).
struct SessionView {
  std::set<NodeId> audible;                   // senders decoded at least once
  std::set<FailureKey> evaluated;
  std::map<NodeId, std::uint64_t> failures;   // any rule, per suspect
};

/// Counter-alert from an overhearing co-watchdog when its own view
/// contradicts `alert`: it heard the suspect, evaluated the alleged rule,
/// saw no failure of any kind from the suspect, and never indicated it.
std::optional<msg::Alert> cross_check(const msg::Alert& alert, NodeId self,
                                      const SessionView& view, const RecordStore& records,
                                      Tick now);

struct BlacklistPolicy {
  std::uint32_t quorum = 1;  // distinct alerting watchdogs per suspect
  /// Drop a watchdog's alerts when counter-alerts naming it outnumber them.
  bool discard_liar_alerts = true;
};

struct BlacklistState {
  std::set<NodeId> ids;
  std::map<NodeId, std::set<NodeId>> corroborators;
};

struct BlacklistUpdate {
  std::vector<NodeId> added;
  std::vector<msg::Alert> accepted;
  std::vector<msg::Alert> discarded;
};

/// Applies one round of alerts received at the BS. Alerts from watchdogs
/// that are already blacklisted are discarded.
BlacklistUpdate bs_update_blacklist(const std::vector<msg::Alert>& alerts, BlacklistState& state,
                                    const BlacklistPolicy& policy);

}  // namespace wleach
