#include "wleach/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace wleach {

using nlohmann::json;

namespace {

constexpr const char* kAutoBs = "auto-100m-mean";
constexpr const char* kClusterSize = "cluster-size";

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

/// Reads the keys of one JSON object and rejects any it did not ask for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConstraintError(where(), where() + ": expected an object");
  }

  std::string where() const { return path_.empty() ? "<root>" : path_; }
  std::string key(const std::string& k) const { return join(path_, k); }

  const json* get(const std::string& k) {
    seen_.push_back(k);
    auto it = j_.find(k);
    return it == j_.end() ? nullptr : &*it;
  }

  template <typename T>
  void uint(const std::string& k, T& out, std::uint64_t min = 0) {
    if (const json* v = get(k)) out = static_cast<T>(as_uint(*v, key(k), min));
  }

  void real(const std::string& k, double& out) {
    if (const json* v = get(k)) out = as_real(*v, key(k));
  }

  void boolean(const std::string& k, bool& out) {
    if (const json* v = get(k)) {
      if (!v->is_boolean()) throw ConstraintError(key(k), key(k) + ": expected true or false");
      out = v->get<bool>();
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end()) {
        throw UnknownKeyError(key(it.key()), "unknown key: " + key(it.key()));
      }
    }
  }

  static std::uint64_t as_uint(const json& v, const std::string& k, std::uint64_t min) {
    std::uint64_t x = 0;
    if (v.is_number_unsigned()) {
      x = v.get<std::uint64_t>();
    } else if (v.is_number_integer()) {
      throw ConstraintError(k, k + ": must be non-negative");
    } else {
      throw ConstraintError(k, k + ": expected an integer");
    }
    if (x < min) throw ConstraintError(k, k + ": must be >= " + std::to_string(min));
    return x;
  }

  static double as_real(const json& v, const std::string& k) {
    if (!v.is_number()) throw ConstraintError(k, k + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConstraintError(k, k + ": must be finite");
    return x;
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string> seen_;
};

Position parse_position(const json& j, const std::string& path) {
  Section s(j, path);
  Position p;
  s.real("x", p.x);
  s.real("y", p.y);
  s.finish();
  return p;
}

AttackScenario parse_attack(const json& j, const std::string& path) {
  Section s(j, path);
  AttackScenario a;
  const json* kind = s.get("kind");
  if (!kind) throw ConstraintError(s.key("kind"), s.key("kind") + ": required");
  if (!kind->is_string()) throw ConstraintError(s.key("kind"), s.key("kind") + ": expected a string");
  auto k = attack_from_string(kind->get<std::string>());
  if (!k) {
    throw ConstraintError(s.key("kind"), s.key("kind") + ": unknown attack '" +
                                             kind->get<std::string>() + "'");
  }
  a.kind = *k;
  if (const json* ids = s.get("attackers")) {
    if (!ids->is_array()) throw ConstraintError(s.key("attackers"), s.key("attackers") + ": expected a list");
    for (const auto& id : *ids) {
      a.attackers.push_back(static_cast<NodeId>(Section::as_uint(id, s.key("attackers"), 0)));
    }
  }
  s.uint("count", a.count);
  s.uint("start_round", a.start_round, 1);
  if (const json* p = s.get("params")) {
    Section ps(*p, s.key("params"));
    ps.real("power_multiplier", a.params.power_multiplier);
    ps.uint("delay_ticks", a.params.delay_ticks);
    ps.uint("repeat_count", a.params.repeat_count);
    ps.real("drop_probability", a.params.drop_probability);
    ps.uint("exhaustion_multiplier", a.params.exhaustion_multiplier);
    ps.real("jam_probability", a.params.jam_probability);
    ps.real("payload_offset", a.params.payload_offset);
    ps.finish();
  }
  s.finish();
  if (!a.attackers.empty() && a.count != 0 && a.count != a.attackers.size()) {
    throw ConstraintError(s.key("count"), s.key("count") + " disagrees with " + s.key("attackers"));
  }
  if (!a.attackers.empty()) a.count = 0;
  try {
    validate(a);
  } catch (const std::invalid_argument& e) {
    throw ConstraintError(path, path + ": " + e.what());
  }
  return a;
}

}  // namespace

std::string_view to_string(Protocol p) noexcept {
  return p == Protocol::Leach ? "leach" : "watchdog-leach";
}

std::uint32_t SimConfig::member_capacity() const noexcept {
  const std::int64_t cap = std::int64_t(frame.ticks) - frame.tail_ticks -
                           2 * std::int64_t(rules.delay_timeout) - 1;
  return cap < 0 ? 0 : static_cast<std::uint32_t>(cap);
}

SimConfig parse_config(const std::string& text) {
  SimConfig c;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return c;

  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigSyntaxError("<root>", std::string("syntax error: ") + e.what());
  }

  Section s(j, "");
  s.uint("seed", c.seed);
  if (const json* v = s.get("protocol")) {
    const std::string p = v->is_string() ? v->get<std::string>() : "";
    if (p == "leach") {
      c.protocol = Protocol::Leach;
    } else if (p == "watchdog-leach") {
      c.protocol = Protocol::WatchdogLeach;
    } else {
      throw ConstraintError("protocol", "protocol: expected \"leach\" or \"watchdog-leach\"");
    }
  }
  s.uint("nodes", c.nodes);
  s.uint("clusters_expected", c.clusters_expected);
  if (const json* v = s.get("area")) {
    Section a(*v, "area");
    a.real("width", c.area.width);
    a.real("height", c.area.height);
    a.finish();
  }
  if (const json* v = s.get("bs_position")) {
    if (v->is_string()) {
      if (v->get<std::string>() != kAutoBs) {
        throw ConstraintError("bs_position", std::string("bs_position: expected {x, y} or \"") + kAutoBs + "\"");
      }
      c.bs_position.reset();
    } else {
      c.bs_position = parse_position(*v, "bs_position");
    }
  }
  s.uint("rounds", c.rounds);
  s.uint("steady_cycles", c.steady_cycles);
  s.real("radio_range", c.radio_range);
  if (const json* v = s.get("dice_m")) {
    if (v->is_string()) {
      if (v->get<std::string>() != kClusterSize) {
        throw ConstraintError("dice_m", std::string("dice_m: expected an integer or \"") + kClusterSize + "\"");
      }
      c.watchdog.dice_m.reset();
    } else {
      c.watchdog.dice_m = static_cast<std::uint32_t>(Section::as_uint(*v, "dice_m", 1));
    }
  }
  if (const json* v = s.get("energy_mode")) {
    const std::string m = v->is_string() ? v->get<std::string>() : "";
    if (m == "paper-table") {
      c.energy_mode = CostMode::PaperTable;
    } else if (m == "physical") {
      c.energy_mode = CostMode::Physical;
    } else {
      throw ConstraintError("energy_mode", "energy_mode: expected \"paper-table\" or \"physical\"");
    }
  }
  s.real("initial_energy", c.initial_energy);
  if (const json* v = s.get("frame")) {
    Section f(*v, "frame");
    f.uint("ticks", c.frame.ticks);
    f.uint("tail_ticks", c.frame.tail_ticks);
    f.finish();
  }
  bool have_min = false;
  bool have_max = false;
  if (const json* v = s.get("rules")) {
    Section r(*v, "rules");
    auto& rc = c.rules;
    r.real("baseline", rc.baseline);
    r.real("weight", rc.weight);
    r.uint("alert_threshold", rc.alert_threshold, 1);
    have_min = r.get("interval_min") != nullptr;
    have_max = r.get("interval_max") != nullptr;
    r.uint("interval_min", rc.interval_min, 1);
    r.uint("interval_max", rc.interval_max, 1);
    r.uint("delay_timeout", rc.delay_timeout, 1);
    r.uint("repetition_limit", rc.repetition_limit, 1);
    r.uint("collision_baseline", rc.collision_baseline);
    r.real("power_threshold", rc.power_threshold);
    r.real("integrity_tolerance", rc.integrity_tolerance);
    r.uint("buffer_capacity", rc.buffer_capacity, 1);
    r.finish();
  }
  // Interval bounds follow the frame unless given.
  if (!have_min) c.rules.interval_min = c.frame.ticks >= 2 ? c.frame.ticks - 2 : 1;
  if (!have_max) c.rules.interval_max = c.frame.ticks + 2;
  if (const json* v = s.get("blacklist")) {
    Section b(*v, "blacklist");
    b.uint("quorum", c.blacklist.quorum, 1);
    b.boolean("discard_liar_alerts", c.blacklist.discard_liar_alerts);
    b.finish();
  }
  if (const json* v = s.get("watchdog")) {
    Section w(*v, "watchdog");
    w.uint("min_per_attacked_cluster", c.watchdog.min_per_attacked_cluster);
    if (const json* f = w.get("fixed_count")) {
      if (!f->is_null()) c.watchdog.fixed_count = static_cast<std::uint32_t>(
          Section::as_uint(*f, "watchdog.fixed_count", 0));
    }
    w.finish();
  }
  if (const json* v = s.get("attacks")) {
    if (!v->is_array()) throw ConstraintError("attacks", "attacks: expected a list");
    for (std::size_t i = 0; i < v->size(); ++i) {
      c.attacks.push_back(parse_attack((*v)[i], "attacks[" + std::to_string(i) + "]"));
    }
  }
  s.finish();
  validate(c);
  return c;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, "cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const SimConfig& c) {
  auto fail = [](const std::string& key, const std::string& msg) {
    throw ConstraintError(key, key + ": " + msg);
  };
  if (c.nodes < 1) fail("nodes", "must be >= 1");
  if (c.clusters_expected < 1) fail("clusters_expected", "must be >= 1");
  if (c.clusters_expected >= c.nodes && c.nodes > 1) {
    throw ConstraintError("clusters_expected",
                          "clusters_expected must be below nodes (clusters_expected=" +
                              std::to_string(c.clusters_expected) +
                              ", nodes=" + std::to_string(c.nodes) + ")");
  }
  if (c.clusters_expected > c.nodes) {
    throw ConstraintError("clusters_expected", "clusters_expected exceeds nodes");
  }
  if (!(c.area.width > 0.0)) fail("area.width", "must be positive");
  if (!(c.area.height > 0.0)) fail("area.height", "must be positive");
  if (!(c.radio_range > 0.0)) fail("radio_range", "must be positive");
  if (!(c.initial_energy > 0.0)) fail("initial_energy", "must be positive");
  if (c.frame.ticks < 1) fail("frame.ticks", "must be >= 1");
  if (c.member_capacity() < 1) {
    fail("frame.ticks", "frame too short: ticks - tail_ticks - 2 * rules.delay_timeout - 1 must be >= 1");
  }
  if (c.watchdog.dice_m && *c.watchdog.dice_m < 1) fail("dice_m", "must be >= 1");
  try {
    c.rules.validate();
  } catch (const std::invalid_argument& e) {
    std::string what = e.what();
    throw ConstraintError(what.substr(0, what.find(' ')), what);
  }
  for (std::size_t i = 0; i < c.attacks.size(); ++i) {
    const auto key = "attacks[" + std::to_string(i) + "]";
    for (NodeId a : c.attacks[i].attackers) {
      if (a >= c.nodes) fail(key + ".attackers", "node " + std::to_string(a) + " does not exist");
    }
    try {
      validate(c.attacks[i]);
    } catch (const std::invalid_argument& e) {
      fail(key, e.what());
    }
  }
}

std::string to_json(const SimConfig& c) {
  json j = json::object();
  j["seed"] = c.seed;
  j["protocol"] = std::string(to_string(c.protocol));
  j["nodes"] = c.nodes;
  j["clusters_expected"] = c.clusters_expected;
  j["area"] = {{"width", c.area.width}, {"height", c.area.height}};
  if (c.bs_position) {
    j["bs_position"] = {{"x", c.bs_position->x}, {"y", c.bs_position->y}};
  } else {
    j["bs_position"] = kAutoBs;
  }
  j["rounds"] = c.rounds;
  j["steady_cycles"] = c.steady_cycles;
  j["radio_range"] = c.radio_range;
  if (c.watchdog.dice_m) {
    j["dice_m"] = *c.watchdog.dice_m;
  } else {
    j["dice_m"] = kClusterSize;
  }
  j["energy_mode"] = std::string(to_string(c.energy_mode));
  j["initial_energy"] = c.initial_energy;
  j["frame"] = {{"ticks", c.frame.ticks}, {"tail_ticks", c.frame.tail_ticks}};
  const auto& r = c.rules;
  j["rules"] = {{"baseline", r.baseline},
                {"weight", r.weight},
                {"alert_threshold", r.alert_threshold},
                {"interval_min", r.interval_min},
                {"interval_max", r.interval_max},
                {"delay_timeout", r.delay_timeout},
                {"repetition_limit", r.repetition_limit},
                {"collision_baseline", r.collision_baseline},
                {"power_threshold", r.power_threshold},
                {"integrity_tolerance", r.integrity_tolerance},
                {"buffer_capacity", r.buffer_capacity}};
  j["blacklist"] = {{"quorum", c.blacklist.quorum},
                    {"discard_liar_alerts", c.blacklist.discard_liar_alerts}};
  json w = {{"min_per_attacked_cluster", c.watchdog.min_per_attacked_cluster}};
  w["fixed_count"] = c.watchdog.fixed_count ? json(*c.watchdog.fixed_count) : json(nullptr);
  j["watchdog"] = w;
  json attacks = json::array();
  for (const auto& a : c.attacks) {
    json x = {{"kind", std::string(to_string(a.kind))}, {"start_round", a.start_round}};
    if (a.attackers.empty()) {
      x["count"] = a.count;
    } else {
      x["attackers"] = a.attackers;
    }
    const auto& p = a.params;
    x["params"] = {{"power_multiplier", p.power_multiplier},
                   {"delay_ticks", p.delay_ticks},
                   {"repeat_count", p.repeat_count},
                   {"drop_probability", p.drop_probability},
                   {"exhaustion_multiplier", p.exhaustion_multiplier},
                   {"jam_probability", p.jam_probability},
                   {"payload_offset", p.payload_offset}};
    attacks.push_back(x);
  }
  j["attacks"] = attacks;
  return j.dump(2) + "\n";
}

}  // namespace wleach
