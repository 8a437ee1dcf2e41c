#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "wleach/core.hpp"

namespace wleach {

enum class SizeClass : std::uint8_t { Signal, Data };

enum class MessageKind : std::uint8_t {
  Adv,
  JoinReq,
  Sched,
  Data,
  Aggregate,
  Alert,
  Blacklist,
  AlarmLocal,
};

std::string_view to_string(MessageKind k) noexcept;
std::string_view to_string(SizeClass c) noexcept;

namespace msg {

struct Adv {
  NodeId ch;
};

struct JoinReq {
  NodeId src;
  NodeId ch;
};

/// TDMA schedule: member ids in slot order (slot i belongs to members[i]).
struct Sched {
  NodeId ch;
  std::vector<NodeId> members;
};

struct Data {
  NodeId src;
  NodeId ch;
  double value;
  std::uint64_t seq;
};

/// Mean of the members' readings for one steady cycle. `contributors` lists
/// the members whose Data went into `value`, in slot order.
struct Aggregate {
  NodeId ch;
  double value;
  std::vector<NodeId> contributors;
  std::uint32_t cycle;
};

struct Alert {
  NodeId watchdog;
  NodeId suspect;
  RuleId attack_id;
  Tick time;
  std::uint32_t sum;
  friend bool operator==(const Alert&, const Alert&) = default;
};

struct Blacklist {
  std::vector<NodeId> ids;
};

struct AlarmLocal {
  NodeId src;
};

}  // namespace msg

using Message = std::variant<msg::Adv, msg::JoinReq, msg::Sched, msg::Data, msg::Aggregate,
                             msg::Alert, msg::Blacklist, msg::AlarmLocal>;

inline MessageKind kind_of(const Message& m) noexcept {
  return static_cast<MessageKind>(m.index());
}

/// Adv, JoinReq and AlarmLocal are 64-bit signals; everything else, Sched
/// included, is a 2000-bit data packet.
SizeClass size_class_of(MessageKind k) noexcept;

}  // namespace wleach
