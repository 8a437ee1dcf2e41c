#include <stdexcept>

#include "doctest.h"
#include "wleach/detection.hpp"

using namespace wleach;

TEST_CASE("detect indicates strictly above the cumulative value") {
  RuleConfig cfg;
  auto r = fresh_record(3, RuleId::Interval, cfg);
  CHECK(r.cumulative == 0.5);

  auto res = detect(r, 0.5, cfg, 10);
  CHECK_FALSE(res.indicated);
  CHECK(res.record.cumulative == doctest::Approx(0.5));

  res = detect(res.record, 0.0, cfg, 11);
  CHECK(res.record.cumulative == doctest::Approx(0.25));

  res = detect(res.record, 1.0, cfg, 12);
  CHECK(res.indicated);
  CHECK(res.record.sum == 1);
  CHECK(res.record.first_time == 12);
  CHECK(res.record.cumulative == doctest::Approx(0.25));

  res = detect(res.record, 1.0, cfg, 13);
  CHECK(res.record.first_time == 12);
  CHECK(res.record.last_time == 13);
  CHECK(res.record.sum == 2);
}

TEST_CASE("alerts fire above the threshold and reset the sum") {
  RuleConfig cfg;
  cfg.alert_threshold = 1;
  auto r = fresh_record(3, RuleId::Delay, cfg);
  r = detect(r, 1, cfg, 5).record;
  CHECK_FALSE(maybe_alert(r, cfg, 8));
  r = detect(r, 1, cfg, 6).record;
  auto a = maybe_alert(r, cfg, 8);
  REQUIRE(a);
  CHECK(a->watchdog == 8);
  CHECK(a->suspect == 3);
  CHECK(a->attack_id == RuleId::Delay);
  CHECK(a->sum == 2);
  CHECK(r.sum == 0);
  CHECK(r.indications == 2);
}

TEST_CASE("rule config validation names the field") {
  RuleConfig cfg;
  cfg.weight = 1.5;
  CHECK_THROWS_WITH_AS(cfg.validate(), "rules.weight out of range", std::invalid_argument);
}

namespace {

Captured data(NodeId src, NodeId ch, Tick t, std::uint64_t seq = 0, double v = 1.0) {
  Captured c;
  c.tx.sender = src;
  c.tx.payload = msg::Data{src, ch, v, seq};
  c.tx.tick = t;
  c.tx.channel = ch;
  c.rx_tick = t;
  c.distance = 10;
  c.rx_power = 1.0 / 100;
  return c;
}

Captured agg(NodeId ch, Tick t, double v, std::vector<NodeId> who) {
  Captured c;
  c.tx.sender = ch;
  c.tx.payload = msg::Aggregate{ch, v, std::move(who), 0};
  c.tx.power = PowerClass::LongRange;
  c.tx.tick = t;
  c.rx_tick = t;
  c.distance = 10;
  c.rx_power = 1.0 / 100;
  return c;
}

struct Fixture {
  ClusterView cluster = make_cluster(0, {1, 2, 3}, 43);
  RuleConfig cfg;
  MonitorMemory mem;
  WindowContext ctx;
  CaptureBuffer buf{64, 64};

  Fixture() {
    ctx.kind = WindowKind::Steady;
    ctx.self = 3;
    ctx.start = 100;
    ctx.end = 164;
    ctx.monitored = {0, 1, 2};
  }
  FailureCounts run() { return evaluate_rules(buf, &cluster, ctx, mem, cfg); }
};

}  // namespace

TEST_CASE("honest steady window yields only zero counts") {
  Fixture f;
  f.ctx.co_watchdogs = {};
  f.buf.push(data(1, 0, 100, 0, 1.0));
  f.buf.push(data(2, 0, 101, 0, 3.0));
  f.buf.push(agg(0, 103, 2.0, {1, 2}));
  const auto out = f.run();
  for (const auto& [k, n] : out) CHECK(n == 0);
  CHECK(out.count({0, RuleId::Integrity}));
  CHECK(out.count({1, RuleId::Interval}));
  CHECK_FALSE(out.count({0, RuleId::Interval}));
}

TEST_CASE("steady rules catch silence, tampering and missing aggregates") {
  SUBCASE("silent member") {
    Fixture f;
    f.buf.push(data(1, 0, 100));
    f.buf.push(agg(0, 103, 1.0, {1}));
    CHECK(f.run()[{2, RuleId::Interval}] == 1);
  }
  SUBCASE("silence excused by a collision") {
    Fixture f;
    f.buf.push(data(1, 0, 100));
    f.buf.push(agg(0, 103, 1.0, {1}));
    f.ctx.collisions.push_back({3, 101, 1, {2, 9}});
    CHECK(f.run()[{2, RuleId::Interval}] == 0);
  }
  SUBCASE("tampered aggregate") {
    Fixture f;
    f.buf.push(data(1, 0, 100, 0, 1.0));
    f.buf.push(data(2, 0, 101, 0, 3.0));
    f.buf.push(agg(0, 103, 7.0, {1, 2}));
    CHECK(f.run()[{0, RuleId::Integrity}] == 1);
  }
  SUBCASE("late aggregate") {
    Fixture f;
    f.buf.push(data(1, 0, 100, 0, 1.0));
    f.buf.push(data(2, 0, 101, 0, 3.0));
    f.buf.push(agg(0, 106, 2.0, {1, 2}));
    CHECK(f.run()[{0, RuleId::Delay}] == 1);
  }
  SUBCASE("dropped aggregate") {
    Fixture f;
    f.buf.push(data(1, 0, 100));
    f.buf.push(data(2, 0, 101));
    CHECK(f.run()[{0, RuleId::Retransmission}] == 1);
  }
  SUBCASE("repeated data") {
    Fixture f;
    f.buf.push(data(1, 0, 100, 4));
    f.buf.push(data(1, 0, 148, 4));
    f.buf.push(data(1, 0, 149, 4));
    CHECK(f.run()[{1, RuleId::Repetition}] == 2);
  }
  SUBCASE("co-watchdogs are exempt from the interval rule") {
    Fixture f;
    f.ctx.co_watchdogs = {2};
    f.buf.push(data(1, 0, 100));
    f.buf.push(agg(0, 103, 1.0, {1}));
    CHECK_FALSE(f.run().count({2, RuleId::Interval}));
  }
}

TEST_CASE("interval gaps carry across windows") {
  Fixture f;
  f.buf.push(data(1, 0, 100));
  f.run();
  f.buf.clear();
  f.ctx.start = 164;
  f.ctx.end = 228;
  f.buf.push(data(1, 0, 164));
  f.buf.push(data(2, 0, 165));
  f.buf.push(data(1, 0, 185));  // out of schedule
  f.buf.push(agg(0, 167, 1.0, {1}));
  CHECK(f.run()[{1, RuleId::Interval}] == 1);
}

TEST_CASE("cross-check contradicts an unsupported alert") {
  SessionView view;
  view.audible = {5};
  view.evaluated = {{5, RuleId::Retransmission}};
  RecordStore records;
  const msg::Alert lie{7, 5, RuleId::Retransmission, 10, 2};
  auto c = cross_check(lie, 8, view, records, 11);
  REQUIRE(c);
  CHECK(c->watchdog == 8);
  CHECK(c->suspect == 7);
  CHECK(c->attack_id == RuleId::IntruderWatchdog);

  view.failures[5] = 1;
  CHECK_FALSE(cross_check(lie, 8, view, records, 11));
  view.failures.clear();
  view.audible.clear();
  CHECK_FALSE(cross_check(lie, 8, view, records, 11));
}

TEST_CASE("base station discards outvoted watchdogs") {
  BlacklistState st;
  BlacklistPolicy pol;
  std::vector<msg::Alert> alerts = {
      {7, 5, RuleId::Retransmission, 10, 2},
      {8, 7, RuleId::IntruderWatchdog, 11, 1},
      {9, 7, RuleId::IntruderWatchdog, 12, 1},
  };
  auto up = bs_update_blacklist(alerts, st, pol);
  CHECK(up.discarded.size() == 1);
  CHECK(st.ids == std::set<NodeId>{7});
  CHECK(up.added == std::vector<NodeId>{7});

  pol.quorum = 2;
  BlacklistState st2;
  bs_update_blacklist({{1, 4, RuleId::Delay, 0, 2}}, st2, pol);
  CHECK(st2.ids.empty());
  bs_update_blacklist({{2, 4, RuleId::Delay, 0, 2}}, st2, pol);
  CHECK(st2.ids == std::set<NodeId>{4});
}
