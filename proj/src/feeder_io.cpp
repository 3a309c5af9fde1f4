#include "opfp/feeder_io.hpp"

#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "opfp/error.hpp"

namespace opfp {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw InvalidInput(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw InvalidInput(where + ": unknown key \"" + key + "\"");
  }
}

template <typename T>
T required(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw InvalidInput(where + ": missing key \"" + key + "\"");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidInput(where + ": bad value for \"" + key + "\": " + e.what());
  }
}

template <typename T>
T optional(const json& obj, const std::string& key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return required<T>(obj, key, where);
}

}  // namespace

FeederModel parse_feeder(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("feeder: malformed JSON: ") + e.what());
  }
  check_keys(root, {"n_nodes", "base_power_va", "slack", "lines", "ders", "monitored", "loads"}, "feeder");

  FeederModel f;
  f.n_nodes = required<int>(root, "n_nodes", "feeder");
  f.base_power = optional<double>(root, "base_power_va", 1.0e6, "feeder");

  if (root.contains("slack")) {
    const auto& s = root.at("slack");
    check_keys(s, {"magnitude", "angle_deg"}, "slack");
    const double mag = optional<double>(s, "magnitude", 1.0, "slack");
    const double ang = optional<double>(s, "angle_deg", 0.0, "slack");
    f.slack_voltage = std::polar(mag, ang * std::numbers::pi / 180.0);
  }

  const auto& lines = root.contains("lines") ? root.at("lines") : json::array();
  if (!lines.is_array()) throw InvalidInput("lines: expected an array");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string where = "lines[" + std::to_string(i) + "]";
    const auto& l = lines[i];
    check_keys(l, {"from", "to", "r", "x", "b_shunt"}, where);
    LineSegment seg;
    seg.from = {required<int>(l, "from", where)};
    seg.to = {required<int>(l, "to", where)};
    seg.series_impedance = {required<double>(l, "r", where), required<double>(l, "x", where)};
    seg.shunt_admittance = {0.0, optional<double>(l, "b_shunt", 0.0, where)};
    f.lines.push_back(seg);
  }

  const auto& ders = root.contains("ders") ? root.at("ders") : json::array();
  if (!ders.is_array()) throw InvalidInput("ders: expected an array");
  for (std::size_t i = 0; i < ders.size(); ++i) {
    const std::string where = "ders[" + std::to_string(i) + "]";
    check_keys(ders[i], {"node", "s_rating"}, where);
    f.ders.push_back({{required<int>(ders[i], "node", where)}, required<double>(ders[i], "s_rating", where)});
  }

  const auto& mon = root.contains("monitored") ? root.at("monitored") : json::array();
  if (!mon.is_array()) throw InvalidInput("monitored: expected an array");
  for (const auto& m : mon) {
    if (!m.is_number_integer()) throw InvalidInput("monitored: expected integer node ids");
    f.monitored.push_back({m.get<int>()});
  }

  if (root.contains("loads")) {
    const auto& loads = root.at("loads");
    if (!loads.is_array()) throw InvalidInput("loads: expected an array");
    for (std::size_t i = 0; i < loads.size(); ++i) {
      const std::string where = "loads[" + std::to_string(i) + "]";
      check_keys(loads[i], {"node", "p", "q"}, where);
      f.loads.push_back({{required<int>(loads[i], "node", where)},
                         optional<double>(loads[i], "p", 0.0, where),
                         optional<double>(loads[i], "q", 0.0, where)});
    }
  }
  return f;
}

FeederModel read_feeder(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read feeder file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_feeder(ss.str());
}

std::string serialize_feeder(const FeederModel& f) {
  json root;
  root["n_nodes"] = f.n_nodes;
  root["base_power_va"] = f.base_power;
  root["slack"] = {{"magnitude", std::abs(f.slack_voltage)},
                   {"angle_deg", std::arg(f.slack_voltage) * 180.0 / std::numbers::pi}};
  json lines = json::array();
  for (const auto& l : f.lines) {
    json j = {{"from", l.from.index},
              {"to", l.to.index},
              {"r", l.series_impedance.real()},
              {"x", l.series_impedance.imag()}};
    if (l.shunt_admittance.imag() != 0.0) j["b_shunt"] = l.shunt_admittance.imag();
    lines.push_back(j);
  }
  root["lines"] = lines;
  json ders = json::array();
  for (const auto& d : f.ders) ders.push_back({{"node", d.node.index}, {"s_rating", d.s_rating}});
  root["ders"] = ders;
  json mon = json::array();
  for (const auto& m : f.monitored) mon.push_back(m.index);
  root["monitored"] = mon;
  if (!f.loads.empty()) {
    json loads = json::array();
    for (const auto& l : f.loads) loads.push_back({{"node", l.node.index}, {"p", l.p}, {"q", l.q}});
    root["loads"] = loads;
  }
  return root.dump(2) + "\n";
}

void write_feeder(const FeederModel& feeder, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write feeder file " + path.string());
  out << serialize_feeder(feeder);
}

}  // namespace opfp
