#include "wleach/energy.hpp"

#include <stdexcept>
#include <string>

namespace wleach {

namespace {

// Published table values (joules per message).
constexpr double kTableRxData = 100e-6;
constexpr double kTableRxSignal = 3e-6;
constexpr double kTableTxDataShort = 820e-6;
constexpr double kTableTxSignalShort = 26e-6;
// Amplifier term of the table's long-range row, per m^2 (k is not applied).
constexpr double kTableLongRangeAmp = 0.1e-9;

}  // namespace

std::string_view to_string(CostMode m) noexcept {
  return m == CostMode::PaperTable ? "paper-table" : "physical";
}

double msg_cost(Direction dir, SizeClass cls, double d, const RadioCostModel& model) {
  if (!(d >= 0.0)) throw std::invalid_argument("msg_cost: negative distance");
  const double k = model.bits(cls);
  const double elec = model.e_elec * k;

  if (model.mode == CostMode::Physical) {
    if (dir == Direction::Rx) return elec;
    return elec + model.eps_amp * k * d * d;
  }

  if (dir == Direction::Rx) return cls == SizeClass::Data ? kTableRxData : kTableRxSignal;
  if (d <= model.short_range_d) {
    return cls == SizeClass::Data ? kTableTxDataShort : kTableTxSignalShort;
  }
  return elec + kTableLongRangeAmp * d * d;
}

double long_range_tx_cost(SizeClass cls, double d, const RadioCostModel& model) {
  if (!(d >= 0.0)) throw std::invalid_argument("long_range_tx_cost: negative distance");
  const double k = model.bits(cls);
  if (model.mode == CostMode::Physical) return model.e_elec * k + model.eps_amp * k * d * d;
  return model.e_elec * k + kTableLongRangeAmp * d * d;
}

void EnergyLedger::add(Direction dir, SizeClass cls, double joules) noexcept {
  if (dir == Direction::Tx) {
    (cls == SizeClass::Data ? tx_data : tx_signal) += joules;
  } else {
    (cls == SizeClass::Data ? rx_data : rx_signal) += joules;
  }
}

void ScenarioParams::validate() const {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (nosc != n) throw std::invalid_argument("nosc must equal n");
  if (nons != noc * nosc) throw std::invalid_argument("nons must equal noc * nosc");
  if (noa > ncs) throw std::invalid_argument("noa must not exceed ncs");
  if (nwnc >= nosc) throw std::invalid_argument("nwnc must be below nosc");
  if (!(d_bs >= 0.0)) throw std::invalid_argument("d_bs must be non-negative");
}

MessageCosts MessageCosts::from(const ScenarioParams& p, const RadioCostModel& model) {
  const double d = model.short_range_d;
  return MessageCosts{
      msg_cost(Direction::Tx, SizeClass::Signal, d, model),
      msg_cost(Direction::Tx, SizeClass::Data, d, model),
      msg_cost(Direction::Rx, SizeClass::Signal, 0.0, model),
      msg_cost(Direction::Rx, SizeClass::Data, 0.0, model),
      msg_cost(Direction::Tx, SizeClass::Data, p.d_bs, model),
  };
}

ChEnergy analytic_ch_energy(const ScenarioParams& p, const RadioCostModel& model) {
  const auto c = MessageCosts::from(p, model);
  const double others = static_cast<double>(p.n) - 1.0;
  ChEnergy e{};
  e.setup = c.ssm + others * c.rsm + c.sdm;
  e.selecting = 0.0;
  e.steady_per_cycle = others * c.rdm + c.sdm_to_bs;
  e.total = e.setup + e.selecting + e.steady_per_cycle * p.ncs;
  return e;
}

WatchdogEnergy analytic_watchdog_energy(const ScenarioParams& p, const RadioCostModel& model) {
  if (p.noa > p.ncs) throw std::invalid_argument("noa must not exceed ncs");
  const auto c = MessageCosts::from(p, model);
  const double others = static_cast<double>(p.n) - 1.0;
  WatchdogEnergy e{};
  e.setup = c.rsm + others * c.rsm + c.rdm + c.ssm;
  e.selecting = 0.0;
  e.steady_quiet = others * c.rdm;
  e.steady_alert = others * c.rdm + c.sdm_to_bs;
  e.total = e.setup + e.selecting + (p.ncs - p.noa) * e.steady_quiet + p.noa * e.steady_alert;
  return e;
}

SensorEnergy analytic_sensor_energy(const ScenarioParams& p, const RadioCostModel& model) {
  const auto c = MessageCosts::from(p, model);
  SensorEnergy e{};
  e.setup = c.rsm + c.ssm + c.rdm;
  e.steady_per_cycle = c.sdm;
  e.total = e.setup + p.ncs * e.steady_per_cycle;
  return e;
}

double analytic_cluster_energy(const ScenarioParams& p, const RadioCostModel& model) {
  if (p.nwnc >= p.nosc) throw std::invalid_argument("nwnc must be below nosc");
  const double sensors = static_cast<double>(p.nosc) - p.nwnc - 1.0;
  return analytic_ch_energy(p, model).total + p.nwnc * analytic_watchdog_energy(p, model).total +
         sensors * analytic_sensor_energy(p, model).total;
}

double analytic_network_energy(const ScenarioParams& p, const RadioCostModel& model) {
  const auto c = MessageCosts::from(p, model);
  return analytic_cluster_energy(p, model) * p.noc + p.nons * c.rdm;
}

}  // namespace wleach
