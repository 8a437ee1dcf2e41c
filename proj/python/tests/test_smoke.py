import json

import pytest

import wleach


def test_table3_reproduced():
    r = wleach.reproduce_paper()
    assert r["all_pass"]
    assert len(r["table3"]) == 12
    assert r["overhead_percent_per_watchdog"] == pytest.approx(2.14, abs=0.01)


def test_analytic_energy_defaults():
    e = wleach.analytic_energy()
    assert e["ch_total"] == pytest.approx(0.010883)
    assert e["sensor_total"] == pytest.approx(0.008329)
    assert wleach.analytic_energy(noa=0)["watchdog_total"] == pytest.approx(0.009156)
    with pytest.raises(ValueError):
        wleach.analytic_energy(noa=11)


def test_pmf_sums_to_one():
    assert sum(wleach.watchdog_count_pmf(a, 10, 10) for a in range(11)) == pytest.approx(1.0, abs=1e-12)


def test_small_run_is_deterministic():
    cfg = {"nodes": 40, "clusters_expected": 4, "area": {"width": 80, "height": 80}, "rounds": 3}
    s1, rows1, ev1 = wleach.run(cfg, events=True)
    s2, rows2, ev2 = wleach.run(cfg, events=True)
    assert s1 == s2 and rows1 == rows2 and ev1 == ev2
    assert s1["rounds"] == 3
    assert len(rows1) == 3
    assert "TX" in ev1


def test_detects_a_black_hole():
    cfg = {
        "seed": 7,
        "nodes": 50,
        "clusters_expected": 5,
        "area": {"width": 100, "height": 100},
        "rounds": 5,
        "watchdog": {"min_per_attacked_cluster": 1},
        "attacks": [{"kind": "black-hole", "count": 1, "start_round": 2}],
    }
    sim = wleach.Simulation(json.dumps(cfg))
    for _ in range(5):
        m = sim.step()
    assert m["round"] == 4
    assert set(sim.attackers) <= set(sim.blacklist)


def test_config_errors_are_value_errors():
    with pytest.raises(wleach.ConfigError) as e:
        wleach.canonical_config('{"nodes": 10, "clusters_expected": 20}')
    assert "clusters_expected" in str(e.value)
    with pytest.raises(ValueError):
        wleach.canonical_config('{"bogus": 1}')


def test_noa_sweep_is_analytic():
    rows = wleach.sweep({"rounds": 1}, "noa", range(0, 11, 5))
    assert [r["simulated_j"] for r in rows] == [None, None, None]
    assert rows[-1]["analytic_j"] == pytest.approx(0.010166)
