#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wleach/config.hpp"
#include "wleach/energy.hpp"
#include "wleach/experiments.hpp"
#include "wleach/simulation.hpp"
#include "wleach/watchdog.hpp"

namespace py = pybind11;
using namespace wleach;

namespace {

py::dict metrics_dict(const RoundMetrics& m) {
  py::dict d;
  d["round"] = m.round;
  d["energy_ch_mean_j"] = m.energy_ch_mean_j;
  d["energy_watchdog_mean_j"] = m.energy_watchdog_mean_j;
  d["energy_sensor_mean_j"] = m.energy_sensor_mean_j;
  d["energy_total_j"] = m.energy_total_j;
  d["alerts"] = m.alerts;
  d["true_positives"] = m.true_positives;
  d["false_positives"] = m.false_positives;
  d["blacklist_size"] = m.blacklist_size;
  d["alive_nodes"] = m.alive_nodes;
  d["orphaned_nodes"] = m.orphaned_nodes;
  d["clusters"] = m.clusters;
  d["zero_watchdog_clusters"] = m.zero_watchdog_clusters;
  d["watchdogs"] = m.watchdogs;
  d["collisions"] = m.collisions;
  return d;
}

ScenarioParams scenario(std::uint32_t n, std::uint32_t ncs, std::uint32_t noa, std::uint32_t nwnc,
                        std::uint32_t noc, std::uint32_t nosc, std::uint32_t nons, double d_bs) {
  ScenarioParams p;
  p.n = n;
  p.ncs = ncs;
  p.noa = noa;
  p.nwnc = nwnc;
  p.noc = noc;
  p.nosc = nosc;
  p.nons = nons;
  p.d_bs = d_bs;
  p.validate();
  return p;
}

RadioCostModel cost_model(const std::string& mode) {
  RadioCostModel m;
  if (mode == "physical") {
    m.mode = CostMode::Physical;
  } else if (mode != "paper-table") {
    throw py::value_error("energy mode must be paper-table or physical");
  }
  return m;
}

}  // namespace

PYBIND11_MODULE(_wleach, m) {
  m.doc() = "Watchdog-LEACH simulator core";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("canonical_config", [](const std::string& text) { return to_json(parse_config(text)); },
        py::arg("text"), "Parse, validate and re-serialize a JSON config.");

  m.def("watchdog_count_pmf", &watchdog_count_pmf, py::arg("alpha"), py::arg("n"), py::arg("m"));

  m.def(
      "analytic_energy",
      [](std::uint32_t n, std::uint32_t ncs, std::uint32_t noa, std::uint32_t nwnc,
         std::uint32_t noc, std::uint32_t nosc, std::uint32_t nons, double d_bs,
         const std::string& mode) {
        const auto p = scenario(n, ncs, noa, nwnc, noc, nosc, nons, d_bs);
        const auto model = cost_model(mode);
        const auto ch = analytic_ch_energy(p, model);
        const auto w = analytic_watchdog_energy(p, model);
        const auto s = analytic_sensor_energy(p, model);
        py::dict d;
        d["ch_setup"] = ch.setup;
        d["ch_steady_per_cycle"] = ch.steady_per_cycle;
        d["ch_total"] = ch.total;
        d["watchdog_setup"] = w.setup;
        d["watchdog_steady_quiet"] = w.steady_quiet;
        d["watchdog_steady_alert"] = w.steady_alert;
        d["watchdog_total"] = w.total;
        d["sensor_setup"] = s.setup;
        d["sensor_steady_per_cycle"] = s.steady_per_cycle;
        d["sensor_total"] = s.total;
        d["cluster"] = analytic_cluster_energy(p, model);
        d["network"] = analytic_network_energy(p, model);
        return d;
      },
      py::arg("n") = 10, py::arg("ncs") = 10, py::arg("noa") = 10, py::arg("nwnc") = 1,
      py::arg("noc") = 100, py::arg("nosc") = 10, py::arg("nons") = 1000, py::arg("d_bs") = 100.0,
      py::arg("mode") = "paper-table", "Closed-form per-round energies in joules.");

  m.def("reproduce_paper", [] {
    const auto r = reproduce_paper();
    py::list rows;
    for (const auto& t : r.table3) {
      py::dict d;
      d["name"] = t.name;
      d["paper_value_J"] = t.paper_value_j;
      d["computed_J"] = t.computed_j;
      d["abs_error_J"] = t.abs_error_j;
      d["pass"] = t.pass;
      rows.append(d);
    }
    py::list fig4, fig5;
    for (const auto& p : r.fig4) fig4.append(py::make_tuple(p.nwnc, p.network_energy_j, p.overhead_percent));
    for (const auto& p : r.fig5) fig5.append(py::make_tuple(p.noa, p.watchdog_energy_j));
    py::dict d;
    d["table3"] = rows;
    d["fig4"] = fig4;
    d["fig5"] = fig5;
    d["marginal_cost_per_watchdog_J"] = r.marginal_cost_per_watchdog_j;
    d["overhead_percent_per_watchdog"] = r.overhead_percent_per_watchdog;
    d["all_pass"] = r.all_pass;
    return d;
  });

  m.def(
      "run",
      [](const std::string& config, bool events) {
        const auto cfg = parse_config(config);
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run_collect(cfg, events);
        }
        py::dict d;
        d["summary"] = to_json(r.summary);
        d["metrics_csv"] = r.metrics_csv;
        d["events"] = r.events;
        return d;
      },
      py::arg("config"), py::arg("events") = false,
      "Run a JSON config; returns summary JSON, metrics CSV and the event log.");

  m.def(
      "sweep",
      [](const std::string& config, const std::string& axis, const std::vector<std::string>& values,
         bool parallel) {
        const auto cfg = parse_config(config);
        const auto ax = sweep_axis_from_string(axis);
        std::vector<SweepRow> rows;
        {
          py::gil_scoped_release release;
          rows = sweep(cfg, ax, values, parallel);
        }
        return sweep_csv(rows);
      },
      py::arg("config"), py::arg("axis"), py::arg("values"), py::arg("parallel") = true);

  py::class_<Simulation>(m, "Simulation")
      .def(py::init([](const std::string& config) { return Simulation(parse_config(config)); }),
           py::arg("config") = "")
      .def("step", [](Simulation& s) { return metrics_dict(s.step()); })
      .def("run", [](Simulation& s) { return to_json(s.run()); })
      .def_property_readonly("rounds_played", &Simulation::rounds_played)
      .def_property_readonly("blacklist",
                             [](const Simulation& s) {
                               return std::vector<NodeId>(s.blacklist().ids.begin(),
                                                          s.blacklist().ids.end());
                             })
      .def_property_readonly("watchdogs",
                             [](const Simulation& s) {
                               return std::vector<NodeId>(s.watchdogs().begin(), s.watchdogs().end());
                             })
      .def_property_readonly("attackers", [](const Simulation& s) {
        std::vector<NodeId> ids;
        for (const auto& sc : s.scenarios()) ids.insert(ids.end(), sc.attackers.begin(), sc.attackers.end());
        return ids;
      });
}
