#include <algorithm>
#include <stdexcept>

#include "doctest.h"
#include "wleach/attacks.hpp"
#include "wleach/rng.hpp"
#include "wleach/topology.hpp"

using namespace wleach;

TEST_CASE("attack names round-trip and map to rules") {
  for (AttackKind k : kAllAttackKinds) {
    CHECK(attack_from_string(to_string(k)) == k);
    CHECK_FALSE(expected_rules(k).empty());
  }
  auto has = [](AttackKind k, RuleId r) {
    const auto v = expected_rules(k);
    return std::find(v.begin(), v.end(), r) != v.end();
  };
  CHECK(has(AttackKind::HelloFlood, RuleId::RadioRange));
  CHECK(has(AttackKind::BlackHole, RuleId::Retransmission));
  CHECK(has(AttackKind::PhysicalTamper, RuleId::Alarm));
  CHECK(has(AttackKind::LyingWatchdog, RuleId::IntruderWatchdog));
  CHECK(is_ch_attack(AttackKind::IntegrityTamper));
  CHECK_FALSE(is_ch_attack(AttackKind::Jamming));
}

TEST_CASE("injection resolves counts among honest nodes") {
  Rng rng(4);
  DeployParams dp;
  dp.nodes = 30;
  Topology topo = deploy(dp, rng);
  std::vector<AttackScenario> s(2);
  s[0].kind = AttackKind::Jamming;
  s[0].attackers = {3};
  s[1].kind = AttackKind::BlackHole;
  s[1].count = 5;
  s[1].start_round = 2;
  inject(s, topo, rng);
  CHECK(s[1].attackers.size() == 5);
  CHECK(std::find(s[1].attackers.begin(), s[1].attackers.end(), 3) == s[1].attackers.end());
  CHECK(topo[3].behavior.is(AttackKind::Jamming, 1));
  for (NodeId a : s[1].attackers) {
    CHECK_FALSE(topo[a].behavior.active(1));
    CHECK(topo[a].behavior.is(AttackKind::BlackHole, 2));
  }
  const auto gt = ground_truth(s[0]);
  CHECK(gt.count({3, RuleId::Jamming}));
}

TEST_CASE("injection rejects bad scenarios") {
  Rng rng(4);
  DeployParams dp;
  dp.nodes = 5;
  Topology topo = deploy(dp, rng);
  std::vector<AttackScenario> twice(2);
  twice[0].attackers = {1};
  twice[1].attackers = {1};
  CHECK_THROWS_AS(inject(twice, topo, rng), std::invalid_argument);

  std::vector<AttackScenario> unknown(1);
  unknown[0].attackers = {99};
  CHECK_THROWS_AS(inject(unknown, topo, rng), std::invalid_argument);

  AttackScenario bad;
  bad.attackers = {1};
  bad.params.drop_probability = 1.5;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = {};
  bad.attackers = {1};
  bad.start_round = 0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}
