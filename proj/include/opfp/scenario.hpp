#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "opfp/feeder.hpp"

namespace opfp {

enum class ScenarioKind { constant, ramp, cloud_transient, vmax_steps };

ScenarioKind parse_scenario_kind(std::string_view name);
std::string_view to_string(ScenarioKind kind);

// Time series sampled at t_k = k * tau. Loads are demands at nodes 1..N
// (column j is node j+1); p_av has one column per DER in feeder order.
struct Scenario {
  double tau = 0.33;
  int n_steps = 0;
  Matrix load_p;
  Matrix load_q;
  Matrix p_av;
  Vector v_min;
  Vector v_max;
  double noise_amplitude = 0.0;

  // Throws InvalidInput on inconsistent shapes or negative P_av.
  void validate(const FeederModel& feeder) const;
};

// Generators sample continuous-time traces, so the same seed and duration
// with a smaller tau gives a denser sampling of the same trajectories.
struct ScenarioParams {
  ScenarioKind kind = ScenarioKind::constant;
  double duration_s = 600.0;
  double tau = 0.33;
  double pv_level = 0.9;      // constant: P_av/S; others: peak of the day curve
  double pv_start = 0.5;      // ramp: initial P_av/S
  double ramp_rate = 1e-3;    // ramp: change of P_av/S per second
  double day_width = 0.22;    // width of the bell, fraction of the horizon
  double load_level = 1.0;    // multiplier on the feeder's nominal loads
  double load_ripple = 0.0;   // relative amplitude of slow load oscillation
  double load_period_s = 300.0;
  int n_clouds = 0;
  double cloud_depth = 0.4;   // max fractional irradiance dip
  double cloud_width_s = 20.0;
  double v_min = 0.95;
  double v_max = 1.05;
  std::array<double, 3> vmax_plateaus{1.05, 1.035, 1.02};
  double noise_amplitude = 0.0;
};

Scenario generate_scenario(const FeederModel& feeder, const ScenarioParams& params, std::uint64_t seed);

// Columnar text with a header row:
//   time_s, pl_<node>..., ql_<node>..., pav_<der node>..., v_min, v_max
// Reading checks the columns against the feeder and rejects unknown ones.
std::string serialize_scenario(const FeederModel& feeder, const Scenario& s);
void write_scenario(const FeederModel& feeder, const Scenario& s, const std::filesystem::path& path);
Scenario parse_scenario(const FeederModel& feeder, const std::string& text);
Scenario read_scenario(const FeederModel& feeder, const std::filesystem::path& path);

}  // namespace opfp
