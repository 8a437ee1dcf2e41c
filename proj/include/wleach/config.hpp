#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wleach/attacks.hpp"
#include "wleach/detection.hpp"
#include "wleach/energy.hpp"
#include "wleach/topology.hpp"

namespace wleach {

enum class Protocol : std::uint8_t { Leach, WatchdogLeach };

std::string_view to_string(Protocol p) noexcept;

struct FrameConfig {
  std::uint32_t ticks = 64;       // one steady cycle
  std::uint32_t tail_ticks = 16;  // reserved for out-of-schedule traffic
};

struct WatchdogConfig {
  /// Sides of the selection die; nullopt = cluster size (members + CH).
  std::optional<std::uint32_t> dice_m;
  /// Honest watchdogs forced into every cluster that contains an attacker.
  std::uint32_t min_per_attacked_cluster = 0;
  /// Replace the dice by exactly this many watchdogs per cluster.
  std::optional<std::uint32_t> fixed_count;
};

struct SimConfig {
  std::uint64_t seed = 1;
  Protocol protocol = Protocol::WatchdogLeach;
  std::uint32_t nodes = 1000;
  std::uint32_t clusters_expected = 100;
  Area area;
  std::optional<Position> bs_position;  // nullopt = auto, mean distance 100 m
  std::uint32_t rounds = 1000;
  std::uint32_t steady_cycles = 10;
  double radio_range = 60.0;
  CostMode energy_mode = CostMode::PaperTable;
  double initial_energy = 20.0;
  FrameConfig frame;
  RuleConfig rules;
  BlacklistPolicy blacklist;
  WatchdogConfig watchdog;
  std::vector<AttackScenario> attacks;

  double p_ch() const noexcept { return double(clusters_expected) / double(nodes); }
  /// Members that fit in one frame: the aggregate, a maximally delayed
  /// aggregate and the tail all have to fit behind the slots.
  std::uint32_t member_capacity() const noexcept;
};

/// Base of all configuration failures; key() names the offending key path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error(what), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class ConfigSyntaxError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class UnknownKeyError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class ConstraintError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Parses the JSON config grammar (docs/config.md). Empty or
/// whitespace-only text yields the defaults.
SimConfig parse_config(const std::string& text);
/// Throws ConfigError (key "<file>") when the file cannot be read.
SimConfig load_config(const std::string& path);
/// Throws ConstraintError.
void validate(const SimConfig& cfg);
/// Canonical JSON; parse_config(to_json(c)) == c field by field.
std::string to_json(const SimConfig& cfg);

}  // namespace wleach
