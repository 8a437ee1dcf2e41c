#include <map>
#include <sstream>
#include <string>

#include "doctest.h"
#include "wleach/experiments.hpp"
#include "wleach/simulation.hpp"

using namespace wleach;

namespace {

SimConfig small(std::uint64_t seed = 11) {
  SimConfig c;
  c.seed = seed;
  c.nodes = 60;
  c.clusters_expected = 6;
  c.area = {100, 100};
  c.rounds = 6;
  return c;
}

std::map<std::string, std::string> fields(const std::string& line, std::string* event) {
  std::map<std::string, std::string> f;
  std::stringstream in(line);
  std::string part;
  int col = 0;
  while (std::getline(in, part, ',')) {
    if (col == 3) *event = part;
    if (col >= 4) {
      auto eq = part.find('=');
      if (eq != std::string::npos) f[part.substr(0, eq)] = part.substr(eq + 1);
    }
    ++col;
  }
  return f;
}

}  // namespace

TEST_CASE("event log replays every ledger exactly") {
  SimConfig c = small();
  AttackScenario a;
  a.kind = AttackKind::Exhaustion;
  a.count = 2;
  c.attacks = {a};
  AttackScenario j;
  j.kind = AttackKind::Jamming;
  j.count = 1;
  c.attacks.push_back(j);

  std::ostringstream ev;
  Simulation sim(c, &ev);
  sim.run();

  std::map<NodeId, double> replay;
  std::istringstream in(ev.str());
  std::string line;
  while (std::getline(in, line)) {
    std::string event;
    auto f = fields(line, &event);
    if (event != "TX") continue;
    if (f["sender"] != "bs") replay[std::stoul(f["sender"])] += std::stod(f["tx_j"]);
    std::stringstream rx(f["rx"]);
    std::string id;
    while (std::getline(rx, id, ';')) replay[std::stoul(id)] += std::stod(f["rx_j"]);
  }
  for (const auto& n : sim.topology().nodes) {
    CHECK(replay[n.id] == doctest::Approx(n.ledger.total()).epsilon(1e-12));
  }
}

TEST_CASE("metrics are consistent") {
  SimConfig c = small();
  AttackScenario a;
  a.kind = AttackKind::BlackHole;
  a.count = 1;
  c.attacks = {a};
  Simulation sim(c);
  sim.run();
  CHECK(sim.metrics().size() == c.rounds);
  std::uint32_t prev_bl = 0;
  for (const auto& m : sim.metrics()) {
    CHECK(m.true_positives + m.false_positives == m.alerts);
    CHECK(m.blacklist_size >= prev_bl);
    CHECK(m.alive_nodes <= c.nodes);
    prev_bl = m.blacklist_size;
  }
  const auto s = sim.summary();
  CHECK(s.rounds == c.rounds);
  REQUIRE(s.scenarios.size() == 1);
  CHECK(s.scenarios[0].attackers_detected == 1);
  CHECK(s.detection_rate.at("black-hole") == 1.0);
}

TEST_CASE("plain LEACH runs without watchdogs or alerts") {
  SimConfig c = small();
  c.protocol = Protocol::Leach;
  AttackScenario a;
  a.kind = AttackKind::BlackHole;
  a.count = 1;
  c.attacks = {a};
  Simulation sim(c);
  const auto s = sim.run();
  CHECK(s.alerts == 0);
  CHECK(s.blacklist.empty());
  for (const auto& m : sim.metrics()) {
    CHECK(m.watchdogs == 0);
    CHECK(m.zero_watchdog_clusters == 0);
  }
}

TEST_CASE("silent watchdogs offset their listening cost") {
  // A watchdog stops sending (820 uJ per cycle) and its CH stops receiving
  // from it (100 uJ); listening to the cluster costs about as much.
  SimConfig c = small();
  c.protocol = Protocol::Leach;
  const double plain = Simulation(c).run().total_energy_j;
  c.protocol = Protocol::WatchdogLeach;
  c.watchdog.fixed_count = 1;
  const double guarded = Simulation(c).run().total_energy_j;
  CHECK(guarded == doctest::Approx(plain).epsilon(0.05));
}

TEST_CASE("same seed, same bytes; different seed, different run") {
  SimConfig c = small(5);
  AttackScenario a;
  a.kind = AttackKind::SelectiveForwarding;
  a.count = 1;
  c.attacks = {a};
  const auto x = run_collect(c);
  const auto y = run_collect(c);
  CHECK(x.metrics_csv == y.metrics_csv);
  CHECK(x.events == y.events);
  c.seed = 6;
  CHECK(run_collect(c).events != x.events);
}

TEST_CASE("fixed watchdog count is honoured") {
  SimConfig c = small();
  c.watchdog.fixed_count = 2;
  Simulation sim(c);
  sim.step();
  std::size_t eligible_clusters = 0;
  for (const auto& cl : sim.clusters()) eligible_clusters += cl.members.size() >= 2;
  CHECK(sim.watchdogs().size() >= 2 * eligible_clusters);
  for (NodeId w : sim.watchdogs()) CHECK(sim.topology()[w].role == Role::Watchdog);
}

TEST_CASE("nodes die once their budget is spent") {
  SimConfig c = small();
  c.initial_energy = 0.02;
  c.rounds = 10;
  Simulation sim(c);
  sim.run();
  CHECK(sim.metrics().back().alive_nodes < c.nodes);
  for (const auto& n : sim.topology().nodes) {
    if (n.alive) CHECK(n.ledger.total() <= n.initial_energy);
  }
}

TEST_CASE("a tiny network can have empty rounds") {
  SimConfig c;
  c.nodes = 3;
  c.clusters_expected = 1;
  c.area = {20, 20};
  c.rounds = 30;
  std::ostringstream ev;
  Simulation sim(c, &ev);
  const auto s = sim.run();
  CHECK(s.rounds == 30);
  if (s.empty_rounds > 0) CHECK(ev.str().find("EMPTY_ROUND") != std::string::npos);
}

TEST_CASE("metrics csv header is fixed") {
  CHECK(metrics_csv_header() ==
        "round,energy_ch_mean_j,energy_watchdog_mean_j,energy_sensor_mean_j,energy_total_j,alerts,"
        "true_positives,false_positives,blacklist_size,alive_nodes,orphaned_nodes,clusters,"
        "zero_watchdog_clusters,watchdogs,collisions\n");
}
