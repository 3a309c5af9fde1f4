#include "opfp/config.hpp"

#include <fstream>
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
void read_into(const json& obj, const std::string& key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidInput(where + ": bad value for \"" + key + "\": " + e.what());
  }
}

}  // namespace

std::filesystem::path RunConfig::resolve(const std::string& p) const {
  std::filesystem::path path(p);
  if (path.is_absolute() || base_dir.empty()) return path;
  return base_dir / path;
}

void RunConfig::validate() const {
  controller.validate();
  droop.validate();
  if (feeder_path.empty()) throw InvalidInput("config: feeder path is required");
  if (!std::filesystem::exists(resolve(feeder_path))) throw IoError("config: feeder file not found: " + feeder_path);
  if (scenario_path && !std::filesystem::exists(resolve(*scenario_path))) {
    throw IoError("config: scenario file not found: " + *scenario_path);
  }
  if (costs.empty()) throw InvalidInput("config: at least one cost entry is required");
  for (const auto& c : costs) {
    if (!(c.c_p >= 0.0 && c.c_q >= 0.0)) throw InvalidInput("config: cost coefficients must be nonnegative");
  }
  if (!(lag_beta >= 0.0 && lag_beta < 1.0)) throw InvalidInput("config: lag_beta must lie in [0, 1)");
  if (report_decimation < 1) throw InvalidInput("config: report_decimation must be at least 1");
  if (noise_amplitude && !(*noise_amplitude >= 0.0)) throw InvalidInput("config: noise amplitude must be nonnegative");
}

SimOptions RunConfig::sim_options() const {
  SimOptions o;
  o.strategy = strategy;
  o.params = controller;
  o.costs = costs;
  o.droop = droop;
  o.region_kind = region;
  o.pf_tan = pf_tan;
  o.lag_beta = lag_beta;
  o.seed = seed;
  return o;
}

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("config: malformed JSON: ") + e.what());
  }
  check_keys(root,
             {"feeder", "scenario", "generator", "strategy", "controller", "costs", "droop", "region", "pf_tan",
              "lag_beta", "noise_amplitude", "seed", "output_dir", "report_decimation", "oracle_tol"},
             "config");
  RunConfig c;
  read_into(root, "feeder", c.feeder_path, "config");
  if (root.contains("scenario") && !root.at("scenario").is_null()) {
    std::string s;
    read_into(root, "scenario", s, "config");
    c.scenario_path = s;
  }
  if (root.contains("generator")) {
    const auto& g = root.at("generator");
    check_keys(g,
               {"kind", "duration_s", "tau", "pv_level", "pv_start", "ramp_rate", "day_width", "load_level",
                "load_ripple", "load_period_s", "n_clouds", "cloud_depth", "cloud_width_s", "vmax_plateaus",
                "noise_amplitude"},
               "generator");
    auto& p = c.generator;
    std::string kind = std::string(to_string(p.kind));
    read_into(g, "kind", kind, "generator");
    p.kind = parse_scenario_kind(kind);
    read_into(g, "duration_s", p.duration_s, "generator");
    read_into(g, "tau", p.tau, "generator");
    read_into(g, "pv_level", p.pv_level, "generator");
    read_into(g, "pv_start", p.pv_start, "generator");
    read_into(g, "ramp_rate", p.ramp_rate, "generator");
    read_into(g, "day_width", p.day_width, "generator");
    read_into(g, "load_level", p.load_level, "generator");
    read_into(g, "load_ripple", p.load_ripple, "generator");
    read_into(g, "load_period_s", p.load_period_s, "generator");
    read_into(g, "n_clouds", p.n_clouds, "generator");
    read_into(g, "cloud_depth", p.cloud_depth, "generator");
    read_into(g, "cloud_width_s", p.cloud_width_s, "generator");
    read_into(g, "vmax_plateaus", p.vmax_plateaus, "generator");
    read_into(g, "noise_amplitude", p.noise_amplitude, "generator");
  }
  std::string strategy = "pursuit";
  read_into(root, "strategy", strategy, "config");
  c.strategy = parse_strategy(strategy);
  if (root.contains("controller")) {
    const auto& k = root.at("controller");
    check_keys(k, {"alpha", "nu", "epsilon", "v_min", "v_max"}, "controller");
    read_into(k, "alpha", c.controller.alpha, "controller");
    read_into(k, "nu", c.controller.nu, "controller");
    read_into(k, "epsilon", c.controller.epsilon, "controller");
    read_into(k, "v_min", c.controller.v_min, "controller");
    read_into(k, "v_max", c.controller.v_max, "controller");
  }
  if (root.contains("costs")) {
    const auto& arr = root.at("costs");
    if (!arr.is_array()) throw InvalidInput("costs: expected an array");
    c.costs.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = "costs[" + std::to_string(i) + "]";
      check_keys(arr[i], {"c_p", "c_q"}, where);
      CostParams cp;
      read_into(arr[i], "c_p", cp.c_p, where);
      read_into(arr[i], "c_q", cp.c_q, where);
      c.costs.push_back(cp);
    }
  }
  if (root.contains("droop")) {
    const auto& d = root.at("droop");
    check_keys(d, {"v_zero", "v_sat", "symmetric"}, "droop");
    read_into(d, "v_zero", c.droop.v_zero, "droop");
    read_into(d, "v_sat", c.droop.v_sat, "droop");
    read_into(d, "symmetric", c.droop.symmetric, "droop");
  }
  std::string region = std::string(to_string(c.region));
  read_into(root, "region", region, "config");
  c.region = parse_region_kind(region);
  read_into(root, "pf_tan", c.pf_tan, "config");
  read_into(root, "lag_beta", c.lag_beta, "config");
  if (root.contains("noise_amplitude") && !root.at("noise_amplitude").is_null()) {
    double amp = 0.0;
    read_into(root, "noise_amplitude", amp, "config");
    c.noise_amplitude = amp;
  }
  read_into(root, "seed", c.seed, "config");
  read_into(root, "output_dir", c.output_dir, "config");
  read_into(root, "report_decimation", c.report_decimation, "config");
  read_into(root, "oracle_tol", c.oracle_tol, "config");
  c.generator.v_min = c.controller.v_min;
  c.generator.v_max = c.controller.v_max;
  return c;
}

RunConfig read_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  RunConfig c = parse_config(ss.str());
  c.base_dir = path.parent_path();
  return c;
}

std::string serialize_config(const RunConfig& c) {
  json root;
  root["feeder"] = c.feeder_path;
  root["scenario"] = c.scenario_path ? json(*c.scenario_path) : json(nullptr);
  const auto& p = c.generator;
  root["generator"] = {{"kind", std::string(to_string(p.kind))},
                       {"duration_s", p.duration_s},
                       {"tau", p.tau},
                       {"pv_level", p.pv_level},
                       {"pv_start", p.pv_start},
                       {"ramp_rate", p.ramp_rate},
                       {"day_width", p.day_width},
                       {"load_level", p.load_level},
                       {"load_ripple", p.load_ripple},
                       {"load_period_s", p.load_period_s},
                       {"n_clouds", p.n_clouds},
                       {"cloud_depth", p.cloud_depth},
                       {"cloud_width_s", p.cloud_width_s},
                       {"vmax_plateaus", p.vmax_plateaus},
                       {"noise_amplitude", p.noise_amplitude}};
  root["strategy"] = std::string(to_string(c.strategy));
  root["controller"] = {{"alpha", c.controller.alpha},
                        {"nu", c.controller.nu},
                        {"epsilon", c.controller.epsilon},
                        {"v_min", c.controller.v_min},
                        {"v_max", c.controller.v_max}};
  json costs = json::array();
  for (const auto& cp : c.costs) costs.push_back({{"c_p", cp.c_p}, {"c_q", cp.c_q}});
  root["costs"] = costs;
  root["droop"] = {{"v_zero", c.droop.v_zero}, {"v_sat", c.droop.v_sat}, {"symmetric", c.droop.symmetric}};
  root["region"] = std::string(to_string(c.region));
  root["pf_tan"] = c.pf_tan;
  root["lag_beta"] = c.lag_beta;
  root["noise_amplitude"] = c.noise_amplitude ? json(*c.noise_amplitude) : json(nullptr);
  root["seed"] = c.seed;
  root["output_dir"] = c.output_dir;
  root["report_decimation"] = c.report_decimation;
  root["oracle_tol"] = c.oracle_tol;
  return root.dump(2) + "\n";
}

}  // namespace opfp
