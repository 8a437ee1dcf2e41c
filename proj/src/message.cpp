#include "wleach/message.hpp"

namespace wleach {

std::string_view to_string(MessageKind k) noexcept {
  switch (k) {
    case MessageKind::Adv: return "adv";
    case MessageKind::JoinReq: return "join-req";
    case MessageKind::Sched: return "sched";
    case MessageKind::Data: return "data";
    case MessageKind::Aggregate: return "aggregate";
    case MessageKind::Alert: return "alert";
    case MessageKind::Blacklist: return "blacklist";
    case MessageKind::AlarmLocal: return "alarm";
  }
  return "?";
}

std::string_view to_string(SizeClass c) noexcept {
  return c == SizeClass::Data ? "data" : "signal";
}

SizeClass size_class_of(MessageKind k) noexcept {
  switch (k) {
    case MessageKind::Adv:
    case MessageKind::JoinReq:
    case MessageKind::AlarmLocal:
      return SizeClass::Signal;
    default:
      return SizeClass::Data;
  }
}

}  // namespace wleach
