#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "opfp/controller.hpp"
#include "opfp/droop.hpp"
#include "opfp/region.hpp"
#include "opfp/scenario.hpp"
#include "opfp/sim.hpp"

namespace opfp {

// Defaults reproduce the reference protocol: alpha 0.2, nu 1e-3, eps 1e-4,
// limits 0.95/1.05 pu, c_p 3, c_q 1, tau 0.33 s.
struct RunConfig {
  std::string feeder_path;
  std::optional<std::string> scenario_path;  // otherwise `generator` is used
  ScenarioParams generator;
  Strategy strategy = Strategy::pursuit;
  ControllerParams controller;
  std::vector<CostParams> costs{CostParams{}};
  DroopCurve droop;
  RegionKind region = RegionKind::joint;
  double pf_tan = 0.0;
  double lag_beta = 0.0;
  std::optional<double> noise_amplitude;  // overrides the scenario's
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  int report_decimation = 10;
  double oracle_tol = 1e-10;

  // Relative paths in the file resolve against this directory; not serialized.
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::string& p) const;
  // Throws InvalidInput when parameters break an invariant, IoError when a
  // referenced file does not exist.
  void validate() const;
  SimOptions sim_options() const;
};

// Unknown keys are rejected at every level; missing keys take defaults.
RunConfig parse_config(const std::string& text);
RunConfig read_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& cfg);

}  // namespace opfp
