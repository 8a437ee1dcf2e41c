#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "wleach/experiments.hpp"

using namespace wleach;

TEST_CASE("paper reproduction tables") {
  const auto r = reproduce_paper();
  REQUIRE(r.table3.size() == 12);
  CHECK(r.all_pass);
  CHECK(r.table3[3].name == "E(CH Total)");
  CHECK(r.table3[3].computed_j == doctest::Approx(0.010883));
  CHECK(r.fig4.size() == 6);
  CHECK(r.fig5.size() == 11);
  CHECK(r.fig5.back().watchdog_energy_j == doctest::Approx(0.010166));
  CHECK(r.overhead_percent_per_watchdog == doctest::Approx(2.14).epsilon(0.005));

  const std::string csv = table3_csv(r.table3);
  CHECK(csv.rfind("name,paper_value_J,computed_J,abs_error_J\n", 0) == 0);

  const auto dir = std::filesystem::temp_directory_path() / "wleach_paper_test";
  write_paper_outputs(r, dir);
  for (const char* f : {"table3.csv", "fig4.csv", "fig5.csv", "summary.json"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  std::ifstream in(dir / "summary.json");
  const auto j = nlohmann::json::parse(in);
  CHECK(j["all_pass"] == true);
  CHECK(j["table3"].size() == 12);
}

TEST_CASE("analytic sweeps") {
  SimConfig c;
  c.rounds = 1;
  const auto noa = sweep(c, SweepAxis::Noa, {"0", "5", "10"});
  REQUIRE(noa.size() == 3);
  CHECK_FALSE(noa[0].simulated_j);
  CHECK(noa[0].analytic_j * 1e6 == doctest::Approx(9156));
  CHECK(noa[2].analytic_j * 1e6 == doctest::Approx(10166));

  SimConfig s;
  s.nodes = 100;
  s.clusters_expected = 10;
  s.area = {100, 100};
  s.rounds = 2;
  const auto nw = sweep(s, SweepAxis::Nwnc, {"0", "1", "2"});
  REQUIRE(nw.size() == 3);
  CHECK((nw[1].analytic_j - nw[0].analytic_j) * 1e6 == doctest::Approx(2 * 10 * 1837.0));
  CHECK(nw[1].simulated_j);
  CHECK(nw[0].analytic_overhead_percent == 0.0);

  const auto pr = sweep(s, SweepAxis::Protocol, {"leach", "watchdog-leach"}, false);
  CHECK(pr[1].analytic_overhead_percent == doctest::Approx(100.0 * 1837 / 85844));
  CHECK(pr[1].simulated_overhead_percent);

  CHECK_THROWS_AS(sweep_axis_from_string("nodes"), std::invalid_argument);
  CHECK_THROWS_AS(sweep(s, SweepAxis::Nwnc, {"x"}), std::invalid_argument);
  CHECK(sweep_csv(pr).rfind(
            "axis,value,simulated_j,analytic_j,simulated_overhead_percent,analytic_overhead_percent\n",
            0) == 0);
}

TEST_CASE("parallel and serial sweeps agree") {
  SimConfig s;
  s.nodes = 60;
  s.clusters_expected = 6;
  s.area = {100, 100};
  s.rounds = 3;
  CHECK(sweep_csv(sweep(s, SweepAxis::Nwnc, {"0", "1", "2"}, true)) ==
        sweep_csv(sweep(s, SweepAxis::Nwnc, {"0", "1", "2"}, false)));
}

TEST_CASE("run_to_dir writes the three outputs") {
  SimConfig s;
  s.nodes = 40;
  s.clusters_expected = 4;
  s.area = {80, 80};
  s.rounds = 2;
  const auto dir = std::filesystem::temp_directory_path() / "wleach_run_test";
  std::filesystem::remove_all(dir);
  const auto r = run_to_dir(s, dir);
  std::ifstream m(dir / "metrics.csv");
  std::stringstream buf;
  buf << m.rdbuf();
  CHECK(buf.str() == r.metrics_csv);
  CHECK(std::filesystem::file_size(dir / "events.log") == r.events.size());
  std::ifstream js(dir / "summary.json");
  const auto j = nlohmann::json::parse(js);
  CHECK(j["rounds"] == 2);
}
