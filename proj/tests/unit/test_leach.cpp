#include <stdexcept>
#include <algorithm>

#include "doctest.h"
#include "wleach/leach.hpp"
#include "wleach/radio.hpp"
#include "wleach/rng.hpp"
#include "wleach/topology.hpp"

using namespace wleach;

TEST_CASE("threshold grows to one at the end of the epoch") {
  CHECK(ch_threshold(0.1, 0, true) == doctest::Approx(0.1));
  CHECK(ch_threshold(0.1, 5, true) == doctest::Approx(0.1 / 0.5));
  CHECK(ch_threshold(0.1, 9, true) == doctest::Approx(1.0));
  CHECK(ch_threshold(0.1, 3, false) == 0.0);
  CHECK(election_period(0.1) == 10);
  CHECK(election_period(0.3) == 3);
  CHECK_THROWS_AS(ch_threshold(0.0, 0, true), std::invalid_argument);
}

TEST_CASE("every node serves once per epoch") {
  Rng rng(3);
  DeployParams dp;
  dp.nodes = 20;
  dp.area = {100, 100};
  Topology topo = deploy(dp, rng);
  ElectionState st(0.2, topo.size());
  for (std::uint32_t epoch = 0; epoch < 20; ++epoch) {
    std::vector<int> n(20, 0);
    for (std::uint32_t r = epoch * 5; r < epoch * 5 + 5; ++r) {
      for (NodeId id : elect_cluster_heads(topo, st, r, rng)) ++n[id];
    }
    for (int x : n) CHECK(x == 1);
  }
}

TEST_CASE("election draws once per alive node") {
  Rng rng(3);
  DeployParams dp;
  dp.nodes = 10;
  Topology topo = deploy(dp, rng);
  topo[2].alive = false;
  topo[3].blacklisted = true;
  ElectionState st(0.1, topo.size());
  const auto before = rng.draws();
  const auto chs = elect_cluster_heads(topo, st, 9, rng);
  CHECK(rng.draws() - before == 9);
  CHECK(std::find(chs.begin(), chs.end(), 2) == chs.end());
  CHECK(std::find(chs.begin(), chs.end(), 3) == chs.end());
  CHECK(chs.size() == 8);
}

TEST_CASE("cluster construction and head choice") {
  std::vector<NodeId> overflow;
  const auto c = make_cluster(9, {4, 5, 6}, 2, &overflow);
  CHECK(c.members == std::vector<NodeId>{4, 5});
  CHECK(overflow == std::vector<NodeId>{6});
  CHECK(c.slot_of(5) == Tick{1});
  CHECK_FALSE(c.slot_of(6));

  CHECK(choose_cluster_head({{7, 0.5}, {3, 0.5}, {9, 0.1}}) == NodeId{3});
  CHECK(choose_cluster_head({{7, 0.9}, {3, 0.5}}) == NodeId{7});
  CHECK_FALSE(choose_cluster_head({}));

  CHECK(*aggregate({1.0, 2.0, 6.0}) == doctest::Approx(3.0));
  CHECK_FALSE(aggregate({}));
}

TEST_CASE("geometric clustering assigns in-range nodes to the strongest head") {
  Topology topo;
  topo.area = {200, 200};
  for (NodeId i = 0; i < 4; ++i) {
    NodeState n;
    n.id = i;
    topo.nodes.push_back(n);
  }
  topo[0].pos = {0, 0};
  topo[1].pos = {100, 0};
  topo[2].pos = {10, 0};
  topo[3].pos = {190, 190};
  RadioModel radio;
  const auto cl = form_clusters({0, 1}, topo, radio, 43);
  REQUIRE(cl.clusters.size() == 2);
  CHECK(cl.clusters[0].members == std::vector<NodeId>{2});
  CHECK(cl.clusters[1].members.empty());
  CHECK(cl.orphans == std::vector<NodeId>{3});
}
