// Acceptance gate: one PASS/FAIL line per criterion; exit status is the
// number of failed criteria.

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wleach/experiments.hpp"
#include "wleach/simulation.hpp"

using namespace wleach;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

Outcome table3_golden() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = reproduce_paper();
  double worst = 0.0;
  for (const auto& row : r.table3) worst = std::max(worst, row.abs_error_j);
  const double ms = ms_since(t0);
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu rows, max abs error %.3g J, %.2f ms", r.table3.size(), worst, ms);
  return {r.table3.size() == 12 && worst <= 1e-6 && ms < 1000.0, buf};
}

Outcome overhead_claim() {
  const auto r = reproduce_paper();
  const double marginal_uj = r.marginal_cost_per_watchdog_j * 1e6;
  const double base_uj = r.fig4.front().cluster_energy_j * 1e6;
  bool affine = r.fig4.size() == 6;
  const ScenarioParams p;
  for (std::size_t i = 1; i < r.fig4.size(); ++i) {
    const double step_uj = (r.fig4[i].network_energy_j - r.fig4[i - 1].network_energy_j) * 1e6;
    affine = affine && std::abs(step_uj - p.noc * 1837.0) < 1e-3;
  }
  const bool ok = std::abs(marginal_uj - 1837.0) < 1e-6 && std::abs(base_uj - 85844.0) < 1e-6 &&
                  std::abs(r.overhead_percent_per_watchdog - 2.14) <= 0.01 && affine;
  char buf[160];
  std::snprintf(buf, sizeof buf, "marginal %.3f uJ of %.3f uJ = %.4f%%, nwnc series affine=%s",
                marginal_uj, base_uj, r.overhead_percent_per_watchdog, affine ? "yes" : "no");
  return {ok, buf};
}

Outcome fig5_series() {
  const auto r = reproduce_paper();
  bool ok = r.fig5.size() == 11;
  double worst = 0.0;
  for (const auto& pt : r.fig5) {
    const double e_uj = pt.watchdog_energy_j * 1e6;
    worst = std::max(worst, std::abs(e_uj - (9156.0 + 101.0 * pt.noa)));
    ok = ok && e_uj < pt.ch_total_j * 1e6 && std::abs(pt.ch_total_j * 1e6 - 10883.0) < 1e-6;
  }
  ok = ok && worst < 1e-6 && std::abs(r.fig5.back().watchdog_energy_j * 1e6 - 10166.0) < 1e-6;
  char buf[128];
  std::snprintf(buf, sizeof buf, "max deviation from 9156+101*noa: %.3g uJ, endpoint %.1f uJ", worst,
                r.fig5.back().watchdog_energy_j * 1e6);
  return {ok, buf};
}

Outcome watchdog_pmf() {
  double worst_sum = 0.0;
  for (std::uint32_t n : {5u, 10u, 20u}) {
    double s = 0.0;
    for (std::uint32_t a = 0; a <= n; ++a) s += watchdog_count_pmf(a, n, n);
    worst_sum = std::max(worst_sum, std::abs(s - 1.0));
  }

  const std::uint32_t n = 10, rounds = 10000;
  Rng rng(20240611);
  std::vector<std::uint64_t> counts(n + 1, 0);
  for (std::uint32_t r = 0; r < rounds; ++r) {
    std::uint32_t k = 0;
    for (std::uint32_t i = 0; i < n; ++i) k += roll_watchdog(n, rng);
    ++counts[k];
  }
  // Pool the upper tail until every bin expects at least 5.
  std::vector<double> obs, expct;
  double o_acc = 0, e_acc = 0;
  for (std::uint32_t a = 0; a <= n; ++a) {
    o_acc += counts[a];
    e_acc += rounds * watchdog_count_pmf(a, n, n);
    if (e_acc >= 5.0) {
      obs.push_back(o_acc);
      expct.push_back(e_acc);
      o_acc = e_acc = 0;
    }
  }
  if (e_acc > 0) {
    obs.back() += o_acc;
    expct.back() += e_acc;
  }
  double chi2 = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) chi2 += (obs[i] - expct[i]) * (obs[i] - expct[i]) / expct[i];
  const double df = static_cast<double>(obs.size() - 1);
  const double critical = boost::math::quantile(boost::math::chi_squared(df), 0.99);
  char buf[160];
  std::snprintf(buf, sizeof buf, "max |sum-1| %.2g; chi2 %.3f on %.0f df, critical %.3f", worst_sum,
                chi2, df, critical);
  return {worst_sum < 1e-12 && chi2 < critical, buf};
}

Outcome election_fairness() {
  Rng rng(5);
  DeployParams dp;
  dp.nodes = 10;
  dp.area = {100, 100};
  Topology topo = deploy(dp, rng);
  ElectionState st(0.1, topo.size());
  std::uint32_t bad_windows = 0;
  for (std::uint32_t w = 0; w < 100; ++w) {
    std::vector<int> times(10, 0);
    for (std::uint32_t r = w * 10; r < w * 10 + 10; ++r) {
      for (NodeId ch : elect_cluster_heads(topo, st, r, rng)) ++times[ch];
    }
    bad_windows += std::any_of(times.begin(), times.end(), [](int t) { return t != 1; });
  }
  return {bad_windows == 0, std::to_string(bad_windows) + " of 100 windows violate once-per-window"};
}

SimConfig detection_config(AttackKind k) {
  SimConfig c;
  c.seed = 7;
  c.nodes = 50;
  c.clusters_expected = 5;
  c.area = {100, 100};
  c.rounds = 5;
  c.rules.alert_threshold = 1;
  c.watchdog.min_per_attacked_cluster = k == AttackKind::LyingWatchdog ? 2 : 1;
  AttackScenario a;
  a.kind = k;
  a.count = 1;
  a.start_round = 2;
  c.attacks = {a};
  return c;
}

Outcome detection_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  std::string missed;
  for (AttackKind k : kAllAttackKinds) {
    Simulation sim(detection_config(k));
    const NodeId attacker = sim.scenarios().front().attackers.front();
    const auto rules = expected_rules(k);
    bool ok = false;
    while (sim.rounds_played() < sim.config().rounds && !ok) {
      const std::uint32_t round = sim.step().round;
      bool alerted = false;
      for (const auto& a : sim.bs_alerts()) {
        alerted = alerted || (a.round == round && a.accepted && a.alert.suspect == attacker &&
                              std::find(rules.begin(), rules.end(), a.alert.attack_id) != rules.end());
      }
      if (alerted && round <= 2 + 2) ok = sim.blacklist().ids.count(attacker) > 0;
    }
    if (!ok) missed += std::string(missed.empty() ? "" : ",") + std::string(to_string(k));
  }

  std::uint64_t benign_alerts = 0;
  SimConfig c = detection_config(AttackKind::Jamming);
  c.attacks.clear();
  c.rounds = 100;
  benign_alerts = Simulation(c).run().alerts;
  const double ms = ms_since(t0);
  char buf[256];
  std::snprintf(buf, sizeof buf, "missed [%s]; benign alerts in 100 rounds: %llu; %.0f ms",
                missed.c_str(), static_cast<unsigned long long>(benign_alerts), ms);
  return {missed.empty() && benign_alerts == 0 && ms < 30000.0, buf};
}

// Recomputes the cumulative value from the full history at every step.
std::vector<bool> replay_oracle(const std::vector<double>& f, double baseline, double w) {
  std::vector<bool> out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double c = baseline;
    for (std::size_t j = 0; j < i; ++j) {
      if (!(f[j] > c)) c = (1.0 - w) * c + w * f[j];
    }
    out.push_back(f[i] > c);
  }
  return out;
}

Outcome fig3_oracle() {
  Rng rng(99);
  std::uint32_t mismatches = 0;
  for (int trace = 0; trace < 1000; ++trace) {
    RuleConfig cfg;
    cfg.baseline = rng.uniform(0.0, 2.0);
    cfg.weight = rng.uniform(0.05, 0.95);
    const std::size_t len = 1 + rng.below(60);
    std::vector<double> f(len);
    for (auto& x : f) x = static_cast<double>(rng.below(4));
    const auto want = replay_oracle(f, cfg.baseline, cfg.weight);
    FailureRecord rec = fresh_record(1, RuleId::Interval, cfg);
    for (std::size_t i = 0; i < len; ++i) {
      auto res = detect(rec, f[i], cfg, static_cast<Tick>(i));
      rec = res.record;
      if (res.indicated != want[i]) {
        ++mismatches;
        break;
      }
    }
  }
  return {mismatches == 0, std::to_string(mismatches) + " of 1000 traces diverge"};
}

Outcome determinism() {
  std::vector<SimConfig> configs;
  SimConfig a = detection_config(AttackKind::Jamming);
  a.rounds = 12;
  configs.push_back(a);
  SimConfig b = detection_config(AttackKind::SelectiveForwarding);
  b.rounds = 12;
  configs.push_back(b);
  SimConfig c;
  c.rounds = 2;
  configs.push_back(c);
  std::uint32_t differing = 0;
  for (const auto& cfg : configs) {
    const auto x = run_collect(cfg);
    const auto y = run_collect(cfg);
    differing += x.metrics_csv != y.metrics_csv || x.events != y.events;
  }
  return {differing == 0, std::to_string(differing) + " of " + std::to_string(configs.size()) +
                              " configs differ between runs"};
}

Outcome energy_agreement() {
  const auto t0 = std::chrono::steady_clock::now();
  SimConfig c;
  c.rounds = 1;
  Simulation sim(c);
  const auto m = sim.step();
  const double ms = ms_since(t0);
  const double ch = m.energy_ch_mean_j * 1e6, w = m.energy_watchdog_mean_j * 1e6,
               s = m.energy_sensor_mean_j * 1e6;
  const double dch = (ch - 10883.0) / 10883.0, dw = (w - 9156.0) / 9156.0, ds = (s - 8329.0) / 8329.0;
  const bool ok = std::abs(dch) <= 0.05 && std::abs(dw) <= 0.05 && std::abs(ds) <= 0.05 && ms < 10000.0;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "CH %.0f uJ (%+.1f%%), W %.0f uJ (%+.1f%%), S %.0f uJ (%+.1f%%); %u clusters; %.0f ms",
                ch, 100 * dch, w, 100 * dw, s, 100 * ds, m.clusters, ms);
  return {ok, buf};
}

}  // namespace

// Usage: acceptance [--known-gap N]...
// A criterion listed as a known gap still prints FAIL but does not count
// toward the exit status.
int main(int argc, char** argv) {
  std::set<int> known;
  for (int a = 1; a + 1 < argc; ++a)
    if (std::string(argv[a]) == "--known-gap") known.insert(std::atoi(argv[++a]));
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"reference table reproduction", table3_golden},
      {"per-watchdog overhead", overhead_claim},
      {"watchdog energy vs attacks", fig5_series},
      {"watchdog count distribution", watchdog_pmf},
      {"election fairness", election_fairness},
      {"detection suite", detection_suite},
      {"incremental detect vs replay", fig3_oracle},
      {"determinism", determinism},
      {"simulated vs analytic energy", energy_agreement},
  };
  int failed = 0, fatal = 0;
  int i = 0;
  for (const auto& [name, fn] : criteria) {
    ++i;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    fatal += !o.pass && !known.count(i);
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", i, name, o.detail.c_str());
  }
  std::printf("%d/9 criteria pass\n", 9 - failed);
  if (failed != fatal) std::printf("%d failing criteria are listed as known gaps\n", failed - fatal);
  return fatal;
}
