#include "wleach/simulation.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace wleach {

namespace {

enum class Step : std::uint8_t { Adv, Join, Sched, SetupReport, Steady, SteadyReport };

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string id_list(const std::vector<NodeId>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(ids[i]);
  }
  return s;
}

/// A watchdog's monitoring assignment for one setup or steady phase.
struct Session {
  NodeId self = 0;
  ClusterView cluster;
  std::set<NodeId> co_watchdogs;
  std::set<NodeId> monitored;
  CaptureBuffer buffer;
  std::vector<CollisionEvent> window_collisions;
  SessionView view;
  std::vector<msg::Alert> pending;

  bool in_cluster(NodeId id) const { return id == cluster.ch || cluster.has_member(id); }

  void restart() {
    buffer.clear();
    window_collisions.clear();
    view = {};
    pending.clear();
  }
};

/// Per-node detection state that outlives sessions.
struct Detector {
  RecordStore records;
  MonitorMemory memory;

  bool suspicious(NodeId s) const {
    for (RuleId r : kAllRules) {
      auto it = records.find({s, r});
      if (it != records.end() && it->second.indications > 0) return true;
    }
    return false;
  }
};

}  // namespace

std::string metrics_csv_header() {
  return "round,energy_ch_mean_j,energy_watchdog_mean_j,energy_sensor_mean_j,energy_total_j,"
         "alerts,true_positives,false_positives,blacklist_size,alive_nodes,orphaned_nodes,"
         "clusters,zero_watchdog_clusters,watchdogs,collisions\n";
}

std::string to_csv_row(const RoundMetrics& m) {
  std::ostringstream o;
  o << m.round << ',' << short_num(m.energy_ch_mean_j) << ',' << short_num(m.energy_watchdog_mean_j)
    << ',' << short_num(m.energy_sensor_mean_j) << ',' << short_num(m.energy_total_j) << ','
    << m.alerts << ',' << m.true_positives << ',' << m.false_positives << ',' << m.blacklist_size
    << ',' << m.alive_nodes << ',' << m.orphaned_nodes << ',' << m.clusters << ','
    << m.zero_watchdog_clusters << ',' << m.watchdogs << ',' << m.collisions << '\n';
  return o.str();
}

struct Simulation::Impl {
  SimConfig cfg;
  std::ostream* events;
  Rng rng;
  Topology topo;
  RadioModel radio;
  RadioCostModel cost;
  NeighborIndex index;
  ElectionState election;
  Clock clock;
  BlacklistState bl;
  std::vector<AttackScenario> scenarios;
  std::set<NodeId> attackers;
  std::vector<RoundMetrics> metrics;
  std::vector<BsAlert> alerts;
  std::map<NodeId, Detector> detectors;
  std::map<NodeId, Session> sessions;
  std::vector<ClusterView> clusters;
  std::map<NodeId, NodeId> cluster_of;
  std::set<NodeId> ch_set;
  std::set<NodeId> watchdog_set;
  std::set<NodeId> alarm_sent;
  std::vector<std::uint64_t> seq;
  std::uint32_t empty_rounds = 0;
  std::uint32_t zero_wd_total = 0;
  std::uint64_t total_collisions = 0;

  // Round scratch.
  Step step = Step::Adv;
  std::vector<std::optional<Channel>> tuned;
  std::map<NodeId, std::vector<AdvHeard>> heard_adv;
  std::map<NodeId, std::vector<NodeId>> joiners;
  std::set<NodeId> sched_received;
  std::map<NodeId, std::map<Tick, std::pair<NodeId, double>>> collected;
  std::map<NodeId, msg::Data> last_sent;
  std::vector<std::pair<NodeId, msg::Alert>> overheard;
  std::vector<msg::Alert> round_alerts;
  std::uint64_t round_collisions = 0;
  std::uint32_t zero_wd_round = 0;
  Tick window_start = 0;

  Impl(SimConfig c, std::ostream* ev)
      : cfg(std::move(c)), events(ev), rng(cfg.seed) {
    validate(cfg);
    radio.range = cfg.radio_range;
    cost.mode = cfg.energy_mode;
    DeployParams dp;
    dp.nodes = cfg.nodes;
    dp.area = cfg.area;
    dp.bs = cfg.bs_position;
    dp.initial_energy = cfg.initial_energy;
    topo = deploy(dp, rng);
    scenarios = cfg.attacks;
    try {
      inject(scenarios, topo, rng);
    } catch (const std::invalid_argument& e) {
      throw ConstraintError("attacks", std::string("attacks: ") + e.what());
    }
    double max_mult = 1.0;
    for (const auto& s : scenarios) {
      for (NodeId a : s.attackers) attackers.insert(a);
      if (s.kind == AttackKind::HelloFlood) max_mult = std::max(max_mult, s.params.power_multiplier);
    }
    index = NeighborIndex(topo, radio.reach(max_mult));
    election = ElectionState(cfg.p_ch(), topo.size());
    seq.assign(topo.size(), 0);
  }

  bool wleach() const { return cfg.protocol == Protocol::WatchdogLeach; }

  // ---- logging -----------------------------------------------------------

  void log(const std::string& event, const std::string& fields) {
    if (!events) return;
    *events << clock.round() << ',' << to_string(clock.phase()) << ',' << clock.tick() << ','
            << event << ',' << fields << '\n';
  }

  void log_at(Tick t, const std::string& event, const std::string& fields) {
    if (!events) return;
    *events << clock.round() << ',' << to_string(clock.phase()) << ',' << t << ',' << event << ','
            << fields << '\n';
  }

  static std::string alert_fields(const msg::Alert& a) {
    return "watchdog=" + std::to_string(a.watchdog) + ",suspect=" + std::to_string(a.suspect) +
           ",rule=" + std::string(to_string(a.attack_id)) + ",time=" + std::to_string(a.time) +
           ",sum=" + std::to_string(a.sum);
  }

  // ---- radio -------------------------------------------------------------

  std::optional<Channel> channel_for(NodeId id) const {
    switch (step) {
      case Step::Adv:
      case Step::Join:
      case Step::Sched:
        return kCommonChannel;
      case Step::SetupReport:
        if (sessions.count(id)) return kCommonChannel;
        return std::nullopt;
      case Step::Steady:
      case Step::SteadyReport: {
        if (step == Step::SteadyReport && !sessions.count(id)) return std::nullopt;
        auto it = cluster_of.find(id);
        if (it == cluster_of.end()) return std::nullopt;
        return it->second;
      }
    }
    return std::nullopt;
  }

  void set_step(Step s) {
    step = s;
    tuned.resize(topo.size());
    for (NodeId id = 0; id < topo.size(); ++id) tuned[id] = channel_for(id);
  }

  std::optional<Channel> tune(NodeId id) const {
    const auto& n = topo.nodes[id];
    if (!n.alive || n.blacklisted) return std::nullopt;
    return tuned[id];
  }

  double tx_cost(const Transmission& tx) const {
    if (tx.power == PowerClass::LongRange) {
      return long_range_tx_cost(tx.size_class(), distance(topo[tx.sender].pos, topo.bs), cost);
    }
    return msg_cost(Direction::Tx, tx.size_class(), radio.reach(tx.power_multiplier), cost);
  }

  void capture_into(Session& s, const Transmission& tx, double rx_power, double d) {
    Captured c{tx, tx.tick, rx_power, d, false};
    const bool kept = capture(
        s.buffer, c, s.cluster.ch, [&](NodeId id) { return s.cluster.has_member(id); },
        cfg.rules.power_threshold);
    // During setup the old cluster is only a hint: anyone already suspected
    // is followed as well.
    if (!kept && step != Step::Steady && detectors[s.self].suspicious(tx.sender)) s.buffer.push(c);
    s.view.audible.insert(tx.sender);
  }

  /// Protocol-level acceptance of a decoded transmission; true when the
  /// receiver processes it (and so pays for it).
  bool accept(NodeId r, const Transmission& tx, double rx_power, double d) {
    auto sit = sessions.find(r);
    Session* sess = sit == sessions.end() ? nullptr : &sit->second;
    bool took = false;
    switch (step) {
      case Step::Adv:
        if (!ch_set.count(r)) {
          heard_adv[r].push_back({tx.sender, rx_power});
          took = true;
        }
        if (sess) {
          capture_into(*sess, tx, rx_power, d);
          took = true;
        }
        break;
      case Step::Join: {
        const auto& j = std::get<msg::JoinReq>(tx.payload);
        if (j.ch == r && ch_set.count(r)) {
          joiners[r].push_back(j.src);
          took = true;
        }
        if (sess && (sess->in_cluster(tx.sender) || detectors[r].suspicious(tx.sender))) {
          capture_into(*sess, tx, rx_power, d);
          took = true;
        }
        break;
      }
      case Step::Sched: {
        const auto& s = std::get<msg::Sched>(tx.payload);
        if (std::find(s.members.begin(), s.members.end(), r) != s.members.end()) {
          sched_received.insert(r);
          took = true;
        }
        if (sess && (sess->in_cluster(tx.sender) || detectors[r].suspicious(tx.sender))) {
          capture_into(*sess, tx, rx_power, d);
          took = true;
        }
        break;
      }
      case Step::SetupReport:
      case Step::SteadyReport: {
        auto other = sessions.find(tx.sender);
        if (sess && other != sessions.end() && other->second.cluster.ch == sess->cluster.ch) {
          overheard.emplace_back(r, std::get<msg::Alert>(tx.payload));
          took = true;
        }
        break;
      }
      case Step::Steady:
        if (sess) {
          capture_into(*sess, tx, rx_power, d);
          took = true;
        } else if (const auto* data = std::get_if<msg::Data>(&tx.payload)) {
          auto owner = cluster_of.find(data->src);
          if (data->ch == r && ch_set.count(r) && owner != cluster_of.end() && owner->second == r) {
            took = true;
            const ClusterView* cv = cluster_view(r);
            if (auto slot = cv->slot_of(data->src); slot && tx.tick - window_start == *slot) {
              collected[r][*slot] = {data->src, data->value};
            }
          }
        }
        break;
    }
    return took;
  }

  const ClusterView* cluster_view(NodeId ch) const {
    for (const auto& c : clusters) {
      if (c.ch == ch) return &c;
    }
    return nullptr;
  }

  void charge(NodeId id, Direction dir, SizeClass cls, double j) { topo[id].ledger.add(dir, cls, j); }

  void check_death(NodeId id) {
    auto& n = topo[id];
    if (n.alive && n.ledger.total() > n.initial_energy) {
      n.alive = false;
      log("DEATH", "node=" + std::to_string(id));
    }
  }

  /// Puts one tick's transmissions on the air.
  void deliver(std::vector<Transmission>& batch) {
    if (batch.empty()) return;
    std::vector<double> tx_j(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      tx_j[i] = tx_cost(batch[i]);
      charge(batch[i].sender, Direction::Tx, batch[i].size_class(), tx_j[i]);
    }
    const TickOutcome out = resolve_tick(
        batch, topo, radio, [this](NodeId id) { return tune(id); }, &index);

    std::vector<std::vector<NodeId>> receivers(batch.size());
    for (const auto& d : out.deliveries) {
      const auto& tx = batch[d.tx];
      if (accept(d.receiver, tx, d.rx_power, d.distance)) {
        charge(d.receiver, Direction::Rx, tx.size_class(),
               msg_cost(Direction::Rx, tx.size_class(), 0.0, cost));
        receivers[d.tx].push_back(d.receiver);
      }
    }
    for (const auto& c : out.collisions) {
      round_collisions += c.count;
      log_at(c.tick, "COLLISION", "receiver=" + std::to_string(c.receiver) + ",count=" +
                                      std::to_string(c.count) + ",senders=" + id_list(c.senders));
      auto s = sessions.find(c.receiver);
      if (s != sessions.end()) s->second.window_collisions.push_back(c);
    }
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto& tx = batch[i];
      const double rx_j = msg_cost(Direction::Rx, tx.size_class(), 0.0, cost);
      log_at(tx.tick, "TX",
             "sender=" + std::to_string(tx.sender) + ",kind=" +
                 std::string(tx.noise ? "noise" : to_string(tx.kind())) + ",class=" +
                 std::string(to_string(tx.size_class())) + ",power=" +
                 (tx.power == PowerClass::LongRange ? "long" : "local") +
                 ",mult=" + num(tx.power_multiplier) + ",tx_j=" + num(tx_j[i]) +
                 ",rx_j=" + num(rx_j) + ",rx=" + id_list(receivers[i]));
      if (tx.power == PowerClass::LongRange) {
        if (const auto* a = std::get_if<msg::Alert>(&tx.payload)) {
          round_alerts.push_back(*a);
          log_at(tx.tick, "ALERT", alert_fields(*a));
        }
      }
    }
    for (std::size_t i = 0; i < batch.size(); ++i) {
      check_death(batch[i].sender);
      for (NodeId r : receivers[i]) check_death(r);
    }
  }

  void send_one(Transmission tx) {
    std::vector<Transmission> b{std::move(tx)};
    deliver(b);
  }

  // ---- detection ---------------------------------------------------------

  std::set<NodeId> known_blacklist() const {
    std::set<NodeId> s;
    for (const auto& n : topo.nodes) {
      if (n.blacklisted) s.insert(n.id);
    }
    return s;
  }

  void close_window(WindowKind kind, Tick start, Tick end) {
    const auto bl_known = known_blacklist();
    for (auto& [id, s] : sessions) {
      if (!topo[id].alive) continue;
      auto& det = detectors[id];
      WindowContext ctx;
      ctx.kind = kind;
      ctx.self = id;
      ctx.start = start;
      ctx.end = end;
      ctx.monitored = s.monitored;
      ctx.co_watchdogs = s.co_watchdogs;
      ctx.blacklisted = bl_known;
      ctx.collisions = std::move(s.window_collisions);
      s.window_collisions.clear();
      const auto counts = evaluate_rules(s.buffer, kind == WindowKind::Steady ? &s.cluster : nullptr,
                                         ctx, det.memory, cfg.rules);
      const Tick now = end - 1;
      for (const auto& [key, n] : counts) {
        s.view.evaluated.insert(key);
        s.view.failures[key.first] += n;
        auto it = det.records.find(key);
        if (it == det.records.end()) {
          it = det.records.emplace(key, fresh_record(key.first, key.second, cfg.rules)).first;
        }
        auto res = detect(it->second, n, cfg.rules, now);
        it->second = res.record;
        if (res.indicated) {
          log_at(now, "DETECT", "watchdog=" + std::to_string(id) + ",suspect=" +
                                    std::to_string(key.first) + ",rule=" +
                                    std::string(to_string(key.second)) + ",failures=" +
                                    std::to_string(n) + ",sum=" + std::to_string(it->second.sum));
        }
        if (auto a = maybe_alert(it->second, cfg.rules, id)) s.pending.push_back(*a);
      }
    }
  }

  void report(Step which) {
    set_step(which);
    const bool setup = which == Step::SetupReport;
    const std::uint32_t round = clock.round();
    std::vector<msg::Alert> out;
    for (auto& [id, s] : sessions) {
      if (!topo[id].alive) continue;
      if (!setup && topo[id].behavior.is(AttackKind::LyingWatchdog, round)) {
        out.push_back({id, s.cluster.ch, RuleId::Retransmission, clock.tick(),
                       cfg.rules.alert_threshold + 1});
      }
      for (const auto& a : s.pending) out.push_back(a);
      s.pending.clear();
    }
    overheard.clear();
    auto transmit = [&](const msg::Alert& a) {
      if (!topo[a.watchdog].alive) return;
      const auto& s = sessions.at(a.watchdog);
      Transmission tx;
      tx.sender = a.watchdog;
      tx.payload = a;
      tx.power = PowerClass::LongRange;
      tx.tick = clock.take();
      tx.channel = setup ? kCommonChannel : s.cluster.ch;
      tx.dest = kBaseStationId;
      send_one(std::move(tx));
      if (s.co_watchdogs.empty() && a.attack_id != RuleId::IntruderWatchdog) {
        log("UNCORROBORATED", alert_fields(a));
      }
    };
    for (const auto& a : out) transmit(a);

    std::vector<msg::Alert> counters;
    const auto heard = overheard;
    for (const auto& [r, a] : heard) {
      if (!topo[r].alive) continue;
      if (auto c = cross_check(a, r, sessions.at(r).view, detectors[r].records, clock.tick())) {
        counters.push_back(*c);
      }
    }
    for (const auto& c : counters) transmit(c);
  }

  // ---- round phases ------------------------------------------------------

  double power_of(NodeId id, std::uint32_t round) const {
    const auto& b = topo[id].behavior;
    return b.is(AttackKind::HelloFlood, round) ? b.params.power_multiplier : 1.0;
  }

  void setup_phase() {
    const std::uint32_t round = clock.round();
    set_step(Step::Adv);
    heard_adv.clear();
    joiners.clear();
    sched_received.clear();
    clusters.clear();
    cluster_of.clear();
    watchdog_set.clear();
    for (auto& n : topo.nodes) n.role = Role::Orphan;

    // Outgoing watchdogs keep listening through this setup phase.
    for (auto it = sessions.begin(); it != sessions.end();) {
      const auto& n = topo[it->first];
      if (!n.alive || n.blacklisted || !wleach()) {
        it = sessions.erase(it);
      } else {
        it->second.restart();
        detectors[it->first].memory.last_data.clear();
        ++it;
      }
    }

    const auto chs = elect_cluster_heads(topo, election, round, rng);
    ch_set = std::set<NodeId>(chs.begin(), chs.end());
    for (NodeId ch : chs) topo[ch].role = Role::ClusterHead;
    log("ELECT", "chs=" + id_list(chs));

    window_start = clock.tick();
    for (NodeId ch : chs) {
      if (!topo[ch].alive) continue;
      Transmission tx;
      tx.sender = ch;
      tx.payload = msg::Adv{ch};
      tx.tick = clock.take();
      tx.power_multiplier = power_of(ch, round);
      send_one(std::move(tx));
    }
    close_window(WindowKind::SetupAdv, window_start, clock.tick());

    set_step(Step::Join);
    window_start = clock.tick();
    for (const auto& n : topo.nodes) {
      if (!n.alive || n.blacklisted || ch_set.count(n.id)) continue;
      auto it = heard_adv.find(n.id);
      if (it == heard_adv.end()) continue;
      auto ch = choose_cluster_head(it->second);
      if (!ch) continue;
      Transmission tx;
      tx.sender = n.id;
      tx.payload = msg::JoinReq{n.id, *ch};
      tx.tick = clock.take();
      tx.dest = *ch;
      send_one(std::move(tx));
    }
    close_window(WindowKind::SetupJoin, window_start, clock.tick());

    set_step(Step::Sched);
    window_start = clock.tick();
    const std::size_t cap = cfg.member_capacity();
    std::vector<ClusterView> planned;
    for (NodeId ch : chs) {
      if (!topo[ch].alive) continue;
      auto members = joiners[ch];
      std::sort(members.begin(), members.end());
      planned.push_back(make_cluster(ch, members, cap));
      if (members.empty()) continue;
      Transmission tx;
      tx.sender = ch;
      tx.payload = msg::Sched{ch, planned.back().members};
      tx.tick = clock.take();
      tx.power_multiplier = power_of(ch, round);
      send_one(std::move(tx));
    }
    close_window(WindowKind::SetupSched, window_start, clock.tick());

    for (auto& c : planned) {
      if (!topo[c.ch].alive) continue;
      // A member that missed its schedule sits the round out; its slot stays.
      cluster_of[c.ch] = c.ch;
      for (NodeId m : c.members) {
        if (sched_received.count(m) && topo[m].alive) {
          cluster_of[m] = c.ch;
          topo[m].role = Role::Sensor;
        }
      }
      clusters.push_back(std::move(c));
    }

    if (wleach()) report(Step::SetupReport);
    sessions.clear();
  }

  void select_watchdogs() {
    if (!wleach()) return;
    const std::uint32_t round = clock.round();
    for (const auto& c : clusters) {
      std::vector<NodeId> eligible;
      for (NodeId m : c.members) {
        if (cluster_of.count(m) && topo[m].alive) eligible.push_back(m);
      }
      std::set<NodeId> wds;
      if (cfg.watchdog.fixed_count) {
        std::vector<NodeId> pool;
        for (NodeId m : eligible) {
          if (topo[m].behavior.honest()) pool.push_back(m);
        }
        for (std::uint32_t i = 0; i < *cfg.watchdog.fixed_count && !pool.empty(); ++i) {
          const auto k = rng.below(pool.size());
          wds.insert(pool[k]);
          pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
        }
      } else {
        const std::uint32_t sides =
            cfg.watchdog.dice_m ? *cfg.watchdog.dice_m : static_cast<std::uint32_t>(c.members.size() + 1);
        for (NodeId m : eligible) {
          const bool win = roll_watchdog(sides, rng);
          if (win && topo[m].behavior.honest()) wds.insert(m);
        }
      }
      for (NodeId m : eligible) {
        if (topo[m].behavior.is(AttackKind::LyingWatchdog, round)) wds.insert(m);
      }
      if (cfg.watchdog.min_per_attacked_cluster > 0) force_watchdogs(c, eligible, wds);

      for (NodeId w : wds) {
        topo[w].role = Role::Watchdog;
        watchdog_set.insert(w);
        Session s;
        s.self = w;
        s.cluster = c;
        s.buffer = CaptureBuffer(cfg.rules.buffer_capacity, cfg.frame.ticks);
        for (NodeId o : wds) {
          if (o != w) s.co_watchdogs.insert(o);
        }
        const auto& me = topo[w].pos;
        if (distance(me, topo[c.ch].pos) <= radio.range) s.monitored.insert(c.ch);
        for (NodeId m : c.members) {
          if (m != w && distance(me, topo[m].pos) <= radio.range) s.monitored.insert(m);
        }
        detectors[w].memory.last_data.clear();
        sessions.emplace(w, std::move(s));
      }
      if (wds.empty()) {
        ++zero_wd_round;
        log("ZERO_WATCHDOG", "ch=" + std::to_string(c.ch));
      }
    }
  }

  void force_watchdogs(const ClusterView& c, const std::vector<NodeId>& eligible,
                       std::set<NodeId>& wds) {
    std::optional<NodeId> target;
    if (!topo[c.ch].behavior.honest()) target = c.ch;
    for (NodeId m : c.members) {
      if (!target && !topo[m].behavior.honest()) target = m;
    }
    if (!target) return;
    std::uint32_t honest = 0;
    for (NodeId w : wds) honest += topo[w].behavior.honest();
    std::vector<NodeId> pool;
    for (NodeId m : eligible) {
      if (topo[m].behavior.honest() && !wds.count(m)) pool.push_back(m);
    }
    const Position at = topo[*target].pos;
    std::stable_sort(pool.begin(), pool.end(), [&](NodeId a, NodeId b) {
      return distance(topo[a].pos, at) < distance(topo[b].pos, at);
    });
    for (NodeId m : pool) {
      if (honest >= cfg.watchdog.min_per_attacked_cluster) break;
      wds.insert(m);
      ++honest;
    }
  }

  bool sends_data(NodeId m, std::uint32_t round) const {
    const auto& n = topo[m];
    if (!n.alive || watchdog_set.count(m) || !cluster_of.count(m)) return false;
    return !n.behavior.is(AttackKind::Negligence, round);
  }

  void emit_data(std::vector<Transmission>& batch, NodeId m, NodeId ch, Tick t) {
    msg::Data d{m, ch, topo[m].base_value + rng.uniform(-0.5, 0.5), seq[m]++};
    last_sent[m] = d;
    Transmission tx;
    tx.sender = m;
    tx.payload = d;
    tx.tick = t;
    tx.channel = ch;
    tx.dest = ch;
    batch.push_back(std::move(tx));
  }

  void steady_phase() {
    set_step(Step::Steady);
    const std::uint32_t round = clock.round();
    const Tick frame = cfg.frame.ticks;
    const Tick tail_start = frame - cfg.frame.tail_ticks;
    // Members with an attack profile, per cluster.
    std::vector<std::vector<NodeId>> rogue(clusters.size());
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (NodeId m : clusters[i].members) {
        if (attackers.count(m)) rogue[i].push_back(m);
      }
    }

    for (std::uint32_t cycle = 0; cycle < cfg.steady_cycles; ++cycle) {
      window_start = clock.tick();
      collected.clear();
      last_sent.clear();
      for (Tick o = 0; o < frame; ++o) {
        const Tick t = clock.take();
        std::vector<Transmission> batch;
        for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
          const auto& c = clusters[ci];
          const NodeId ch = c.ch;
          const Tick k = c.members.size();
          if (o < k && sends_data(c.members[o], round)) emit_data(batch, c.members[o], ch, t);

          for (NodeId m : rogue[ci]) {
            const auto& b = topo[m].behavior;
            if (!sends_data(m, round)) continue;
            if (b.is(AttackKind::Exhaustion, round)) {
              const Tick mult = b.params.exhaustion_multiplier;
              const Tick slot = *c.slot_of(m);
              for (Tick j = 1; j < mult; ++j) {
                if ((slot + j * (frame / mult)) % frame == o) emit_data(batch, m, ch, t);
              }
            }
            if (b.is(AttackKind::MessageRepetition, round)) {
              const Tick copies = (b.params.repeat_count ? b.params.repeat_count
                                                         : cfg.rules.repetition_limit + 2) - 1;
              auto last = last_sent.find(m);
              if (o >= tail_start && o < tail_start + copies && last != last_sent.end()) {
                Transmission tx;
                tx.sender = m;
                tx.payload = last->second;
                tx.tick = t;
                tx.channel = ch;
                tx.dest = ch;
                batch.push_back(std::move(tx));
              }
            }
            if (b.is(AttackKind::PhysicalTamper, round) && o == tail_start && !alarm_sent.count(m)) {
              alarm_sent.insert(m);
              Transmission tx;
              tx.sender = m;
              tx.payload = msg::AlarmLocal{m};
              tx.tick = t;
              tx.channel = ch;
              batch.push_back(std::move(tx));
            }
          }

          if (k > 0 && topo[ch].alive && o == aggregate_offset(c, round)) {
            if (auto tx = make_aggregate(c, cycle, t, round)) batch.push_back(std::move(*tx));
          }
        }
        for (NodeId j : attackers) {
          const auto& n = topo[j];
          if (!n.behavior.is(AttackKind::Jamming, round) || !sends_data(j, round)) continue;
          const ClusterView* c = cluster_view(cluster_of.at(j));
          if (o == *c->slot_of(j)) continue;
          if (rng.bernoulli(n.behavior.params.jam_probability)) {
            Transmission tx;
            tx.sender = j;
            tx.payload = msg::Data{j, c->ch, 0.0, 0};
            tx.tick = t;
            tx.channel = c->ch;
            tx.noise = true;
            batch.push_back(std::move(tx));
          }
        }
        deliver(batch);
      }
      close_window(WindowKind::Steady, window_start, clock.tick());
    }
  }

  Tick aggregate_offset(const ClusterView& c, std::uint32_t round) const {
    const Tick k = c.members.size();
    const auto& b = topo[c.ch].behavior;
    if (!b.is(AttackKind::MessageDelay, round)) return k;
    const Tick delay = b.params.delay_ticks ? b.params.delay_ticks : 2 * cfg.rules.delay_timeout;
    return std::min<Tick>(k - 1 + delay, cfg.frame.ticks - 1);
  }

  std::optional<Transmission> make_aggregate(const ClusterView& c, std::uint32_t cycle, Tick t,
                                             std::uint32_t round) {
    auto& got = collected[c.ch];
    if (got.empty()) return std::nullopt;
    std::vector<double> values;
    std::vector<NodeId> contributors;
    for (const auto& [slot, mv] : got) {
      contributors.push_back(mv.first);
      values.push_back(mv.second);
    }
    got.clear();
    const auto& b = topo[c.ch].behavior;
    if (b.is(AttackKind::BlackHole, round)) return std::nullopt;
    if (b.is(AttackKind::SelectiveForwarding, round)) {
      const double p = b.params.drop_probability;
      if (p >= 1.0 || rng.bernoulli(p)) return std::nullopt;
    }
    double value = *aggregate(values);
    if (b.is(AttackKind::IntegrityTamper, round)) value += b.params.payload_offset;
    Transmission tx;
    tx.sender = c.ch;
    tx.payload = msg::Aggregate{c.ch, value, std::move(contributors), cycle};
    tx.power = PowerClass::LongRange;
    tx.tick = t;
    tx.channel = c.ch;
    tx.dest = kBaseStationId;
    return tx;
  }

  void blacklist_phase() {
    if (!wleach()) return;
    const std::uint32_t round = clock.round();
    auto up = bs_update_blacklist(round_alerts, bl, cfg.blacklist);
    for (const auto& a : up.accepted) {
      alerts.push_back({round, a, true, attackers.count(a.suspect) > 0});
    }
    for (const auto& a : up.discarded) {
      alerts.push_back({round, a, false, attackers.count(a.suspect) > 0});
      log("DISCARD", alert_fields(a));
    }
    std::vector<NodeId> ids(bl.ids.begin(), bl.ids.end());
    // The BS reaches every alive node; its own energy is not budgeted.
    std::vector<NodeId> rx;
    const double rx_j = msg_cost(Direction::Rx, SizeClass::Data, 0.0, cost);
    const Tick t = clock.take();
    for (auto& n : topo.nodes) {
      if (!n.alive) continue;
      n.ledger.add(Direction::Rx, SizeClass::Data, rx_j);
      rx.push_back(n.id);
    }
    log_at(t, "TX", "sender=bs,kind=blacklist,class=data,power=long,mult=1,tx_j=0,rx_j=" +
                        num(rx_j) + ",rx=" + id_list(rx));
    log_at(t, "BLACKLIST", "ids=" + id_list(ids) + ",added=" + id_list(up.added));
    for (NodeId id : ids) topo[id].blacklisted = true;
    for (NodeId id : rx) check_death(id);
  }

  const RoundMetrics& step_round() {
    clock.next_round();
    round_alerts.clear();
    round_collisions = 0;
    zero_wd_round = 0;
    std::vector<double> e0(topo.size());
    for (const auto& n : topo.nodes) e0[n.id] = n.ledger.total();

    setup_phase();
    clock.enter(Phase::WatchdogSelect);
    select_watchdogs();
    clock.enter(Phase::Steady);
    if (clusters.empty()) {
      ++empty_rounds;
      log("EMPTY_ROUND", "");
    } else {
      steady_phase();
      if (wleach()) report(Step::SteadyReport);
    }

    RoundMetrics m;
    m.round = clock.round();
    double ch_sum = 0, wd_sum = 0, s_sum = 0;
    std::uint32_t wd_count = 0;
    for (const auto& n : topo.nodes) {
      const double e = n.ledger.total() - e0[n.id];
      switch (n.role) {
        case Role::ClusterHead: ch_sum += e; ++m.ch_count; break;
        case Role::Watchdog: wd_sum += e; ++wd_count; break;
        case Role::Sensor: s_sum += e; ++m.sensor_count; break;
        case Role::Orphan:
          if (n.alive && !n.blacklisted) ++m.orphaned_nodes;
          break;
      }
    }
    m.energy_ch_mean_j = m.ch_count ? ch_sum / m.ch_count : 0.0;
    m.energy_watchdog_mean_j = wd_count ? wd_sum / wd_count : 0.0;
    m.energy_sensor_mean_j = m.sensor_count ? s_sum / m.sensor_count : 0.0;
    m.watchdogs = wd_count;

    clock.enter(Phase::BlacklistBroadcast);
    blacklist_phase();

    double total = 0;
    for (const auto& n : topo.nodes) {
      total += n.ledger.total() - e0[n.id];
      m.alive_nodes += n.alive;
    }
    m.energy_total_j = total;
    m.alerts = static_cast<std::uint32_t>(round_alerts.size());
    for (const auto& a : round_alerts) {
      if (attackers.count(a.suspect)) {
        ++m.true_positives;
      } else {
        ++m.false_positives;
      }
    }
    m.blacklist_size = static_cast<std::uint32_t>(bl.ids.size());
    m.clusters = static_cast<std::uint32_t>(clusters.size());
    m.zero_watchdog_clusters = zero_wd_round;
    m.collisions = round_collisions;
    zero_wd_total += zero_wd_round;
    total_collisions += round_collisions;
    metrics.push_back(m);
    return metrics.back();
  }

  RunSummary summary() const {
    RunSummary s;
    s.seed = cfg.seed;
    s.protocol = cfg.protocol;
    s.nodes = cfg.nodes;
    s.rounds = static_cast<std::uint32_t>(metrics.size());
    s.bs = topo.bs;
    for (const auto& n : topo.nodes) {
      s.total_energy_j += n.ledger.total();
      s.alive_nodes += n.alive;
    }
    s.mean_round_energy_j = s.rounds ? s.total_energy_j / s.rounds : 0.0;
    for (const auto& m : metrics) {
      s.alerts += m.alerts;
      s.true_positives += m.true_positives;
      s.false_positives += m.false_positives;
    }
    s.collisions = total_collisions;
    s.empty_rounds = empty_rounds;
    s.zero_watchdog_clusters = zero_wd_total;
    s.blacklist.assign(bl.ids.begin(), bl.ids.end());

    std::map<std::string, std::pair<std::uint32_t, std::uint32_t>> rate;
    for (const auto& sc : scenarios) {
      ScenarioOutcome o{sc.kind, sc.attackers, sc.start_round, 0, std::nullopt, 0};
      const auto rules = expected_rules(sc.kind);
      for (NodeId a : sc.attackers) {
        std::optional<std::uint32_t> first;
        for (const auto& x : alerts) {
          if (x.accepted && x.alert.suspect == a &&
              std::find(rules.begin(), rules.end(), x.alert.attack_id) != rules.end() &&
              x.round >= sc.start_round) {
            first = x.round;
            break;
          }
        }
        if (first) {
          ++o.attackers_detected;
          const std::uint32_t lat = *first - sc.start_round;
          if (!o.latency_rounds || lat < *o.latency_rounds) o.latency_rounds = lat;
        }
        o.attackers_blacklisted += bl.ids.count(a) ? 1 : 0;
      }
      auto& r = rate[std::string(to_string(sc.kind))];
      r.first += o.attackers_detected;
      r.second += static_cast<std::uint32_t>(sc.attackers.size());
      s.scenarios.push_back(std::move(o));
    }
    for (const auto& [k, v] : rate) s.detection_rate[k] = v.second ? double(v.first) / v.second : 0.0;
    return s;
  }
};

std::string to_json(const RunSummary& s) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["seed"] = s.seed;
  j["protocol"] = std::string(to_string(s.protocol));
  j["nodes"] = s.nodes;
  j["rounds"] = s.rounds;
  j["bs_position"] = {{"x", s.bs.x}, {"y", s.bs.y}};
  j["total_energy_j"] = s.total_energy_j;
  j["mean_round_energy_j"] = s.mean_round_energy_j;
  j["alive_nodes"] = s.alive_nodes;
  j["alerts"] = s.alerts;
  j["true_positives"] = s.true_positives;
  j["false_positives"] = s.false_positives;
  j["collisions"] = s.collisions;
  j["empty_rounds"] = s.empty_rounds;
  j["zero_watchdog_clusters"] = s.zero_watchdog_clusters;
  j["blacklist"] = s.blacklist;
  ordered_json sc = ordered_json::array();
  for (const auto& o : s.scenarios) {
    ordered_json x;
    x["kind"] = std::string(to_string(o.kind));
    x["attackers"] = o.attackers;
    x["start_round"] = o.start_round;
    x["attackers_detected"] = o.attackers_detected;
    x["attackers_blacklisted"] = o.attackers_blacklisted;
    x["latency_rounds"] = o.latency_rounds ? ordered_json(*o.latency_rounds) : ordered_json(nullptr);
    sc.push_back(x);
  }
  j["scenarios"] = sc;
  ordered_json rate = ordered_json::object();
  for (const auto& [k, v] : s.detection_rate) rate[k] = v;
  j["detection_rate"] = rate;
  return j.dump(2) + "\n";
}

Simulation::Simulation(SimConfig cfg, std::ostream* events)
    : impl_(std::make_unique<Impl>(std::move(cfg), events)) {}
Simulation::~Simulation() = default;
Simulation::Simulation(Simulation&&) noexcept = default;
Simulation& Simulation::operator=(Simulation&&) noexcept = default;

const RoundMetrics& Simulation::step() { return impl_->step_round(); }

RunSummary Simulation::run() {
  while (impl_->metrics.size() < impl_->cfg.rounds) impl_->step_round();
  return impl_->summary();
}

const SimConfig& Simulation::config() const noexcept { return impl_->cfg; }
const Topology& Simulation::topology() const noexcept { return impl_->topo; }
const std::vector<RoundMetrics>& Simulation::metrics() const noexcept { return impl_->metrics; }
const std::vector<BsAlert>& Simulation::bs_alerts() const noexcept { return impl_->alerts; }
const BlacklistState& Simulation::blacklist() const noexcept { return impl_->bl; }
const std::vector<AttackScenario>& Simulation::scenarios() const noexcept { return impl_->scenarios; }
const std::vector<ClusterView>& Simulation::clusters() const noexcept { return impl_->clusters; }
const std::set<NodeId>& Simulation::watchdogs() const noexcept { return impl_->watchdog_set; }
const Rng& Simulation::rng() const noexcept { return impl_->rng; }
RunSummary Simulation::summary() const { return impl_->summary(); }
std::uint32_t Simulation::rounds_played() const noexcept {
  return static_cast<std::uint32_t>(impl_->metrics.size());
}

}  // namespace wleach
