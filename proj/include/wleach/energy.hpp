#pragma once

#include <cstdint>
#include <string_view>

#include "wleach/message.hpp"

namespace wleach {

enum class CostMode : std::uint8_t {
  /// Reproduces the published per-message table, including its numeric
  /// long-range form `100 uJ + 0.1 nJ * d^2` and the rounded 3 uJ signal
  /// reception.
  PaperTable,
  /// First-order radio model: E_tx = e_elec*k + eps_amp*k*d^2, E_rx = e_elec*k.
  Physical,
};

std::string_view to_string(CostMode m) noexcept;

enum class Direction : std::uint8_t { Tx, Rx };

struct RadioCostModel {
  double e_elec = 50e-9;     // J/bit
  double eps_amp = 100e-12;  // J/bit/m^2
  std::uint32_t data_bits = 2000;
  std::uint32_t signal_bits = 64;
  double short_range_d = 60.0;  // m
  CostMode mode = CostMode::PaperTable;

  std::uint32_t bits(SizeClass c) const noexcept {
    return c == SizeClass::Data ? data_bits : signal_bits;
  }
};

/// Energy of one message in joules. Throws std::invalid_argument for d < 0.
double msg_cost(Direction dir, SizeClass cls, double d, const RadioCostModel& model);

/// Transmit cost of a base-station link. Always the amplifier row of the
/// table, even when the base station happens to sit within the short range:
/// the short-range row is a flat 820 uJ and would make a 50 m uplink eight
/// times dearer than a 100 m one.
double long_range_tx_cost(SizeClass cls, double d, const RadioCostModel& model);

/// Per-node joule accounting.
struct EnergyLedger {
  double tx_data = 0.0;
  double tx_signal = 0.0;
  double rx_data = 0.0;
  double rx_signal = 0.0;

  double total() const noexcept { return tx_data + tx_signal + rx_data + rx_signal; }
  void add(Direction dir, SizeClass cls, double joules) noexcept;
};

/// Inputs of the closed-form per-role energy formulas.
struct ScenarioParams {
  std::uint32_t n = 10;      // nodes per cluster, CH included
  std::uint32_t ncs = 10;    // steady cycles per round
  std::uint32_t noa = 10;    // attack (alert) cycles for a watchdog
  std::uint32_t nwnc = 1;    // watchdogs per cluster
  std::uint32_t noc = 100;   // clusters
  std::uint32_t nosc = 10;   // sensors per cluster
  std::uint32_t nons = 1000; // sensors in the network
  double d_bs = 100.0;       // m

  /// Throws std::invalid_argument naming the violated relation.
  void validate() const;
};

/// Per-message unit costs the formulas are built from.
struct MessageCosts {
  double ssm;       // send signal, short range
  double sdm;       // send data, short range
  double rsm;       // receive signal
  double rdm;       // receive data
  double sdm_to_bs; // send data to the base station

  static MessageCosts from(const ScenarioParams& p, const RadioCostModel& model);
};

struct ChEnergy {
  double setup;
  double selecting;
  double steady_per_cycle;
  double total;
};

struct WatchdogEnergy {
  double setup;
  double selecting;
  double steady_quiet;
  double steady_alert;
  double total;
};

struct SensorEnergy {
  double setup;
  double steady_per_cycle;
  double total;
};

ChEnergy analytic_ch_energy(const ScenarioParams& p, const RadioCostModel& model);
/// Throws std::invalid_argument when noa > ncs.
WatchdogEnergy analytic_watchdog_energy(const ScenarioParams& p, const RadioCostModel& model);
SensorEnergy analytic_sensor_energy(const ScenarioParams& p, const RadioCostModel& model);

/// One cluster: CH + nwnc watchdogs + (nosc - nwnc - 1) sensors.
double analytic_cluster_energy(const ScenarioParams& p, const RadioCostModel& model);

/// [E(CH) + nwnc E(W) + (nosc - nwnc - 1) E(S)] * noc + nons * RDM.
/// Throws std::invalid_argument when nwnc >= nosc.
double analytic_network_energy(const ScenarioParams& p, const RadioCostModel& model);

}  // namespace wleach
