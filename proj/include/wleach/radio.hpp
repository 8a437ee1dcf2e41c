#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "wleach/core.hpp"
#include "wleach/message.hpp"

namespace wleach {

struct Topology;

enum class PowerClass : std::uint8_t { Local, LongRange };

/// Radio channel. Setup traffic shares the common channel; each cluster uses
/// its own code (the CH id) in the steady phase, so clusters never collide
/// with each other. Wideband noise hits every channel.
using Channel = std::uint32_t;
inline constexpr Channel kCommonChannel = std::numeric_limits<Channel>::max();

struct Transmission {
  NodeId sender = 0;
  Message payload;
  PowerClass power = PowerClass::Local;
  Tick tick = 0;
  double power_multiplier = 1.0;
  Channel channel = kCommonChannel;
  NodeId dest = kBroadcastId;
  /// Jamming energy: occupies the medium on all channels, carries nothing.
  bool noise = false;

  MessageKind kind() const noexcept { return kind_of(payload); }
  SizeClass size_class() const noexcept { return size_class_of(kind()); }
};

/// Disk propagation with a d^-2 received-power estimate.
struct RadioModel {
  double range = 60.0;

  double reach(double power_multiplier) const noexcept;
  /// Received power relative to an honest local transmitter at 1 m.
  static double rx_power(double power_multiplier, double d) noexcept;
  /// P_rx * d^2: the transmit power a receiver can reconstruct.
  static double implied_power(double p_rx, double d) noexcept;
};

/// Per-node neighbour lists within a fixed radius, in id order.
class NeighborIndex {
 public:
  NeighborIndex() = default;
  NeighborIndex(const Topology& topo, double radius);

  double radius() const noexcept { return radius_; }
  const std::vector<NodeId>& of(NodeId id) const { return lists_.at(id); }

 private:
  double radius_ = 0.0;
  std::vector<std::vector<NodeId>> lists_;
};

/// Alive nodes, other than the sender, inside the transmission's footprint.
/// Local transmissions reach range*sqrt(multiplier); LongRange ones reach the
/// BS and are overheard out to the normal range. Dead senders throw
/// std::logic_error. `index` may be null; if given, its radius must cover
/// the footprint.
std::vector<NodeId> broadcast(const Transmission& tx, const Topology& topo,
                              const RadioModel& radio, const NeighborIndex* index = nullptr);

struct Reception {
  NodeId receiver;
  std::size_t tx;  // index into the tick's transmissions
  double rx_power;
  double distance;
};

/// `count` is concurrent arrivals minus one.
struct CollisionEvent {
  NodeId receiver;
  Tick tick;
  std::uint32_t count;
  std::vector<NodeId> senders;
};

struct TickOutcome {
  std::vector<Reception> deliveries;
  std::vector<CollisionEvent> collisions;
};

/// Channel a node is tuned to this tick, or nullopt when its radio is off.
using TuneFn = std::function<std::optional<Channel>(NodeId)>;

/// Resolves one tick of concurrent transmissions. A node tuned to channel c
/// hears every transmission on c plus all noise that reaches it; one arrival
/// is delivered (noise is never delivered), two or more collide and nothing
/// is delivered. Deliveries and collisions come out in receiver id order.
TickOutcome resolve_tick(const std::vector<Transmission>& txs, const Topology& topo,
                         const RadioModel& radio, const TuneFn& tune,
                         const NeighborIndex* index = nullptr);

}  // namespace wleach
