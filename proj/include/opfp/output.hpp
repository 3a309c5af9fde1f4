#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "opfp/sim.hpp"
#include "opfp/tracking.hpp"

namespace opfp {

// One row per step: k, time_s, cost, max_violation, pf_residual, v_min,
// v_max, then y_<node> per monitored node, p_/q_ (commanded), pa_/qa_
// (applied) and pav_ per DER node, gamma_/mu_ per monitored node and v_<node>
// for every node. Fixed column order and %.10g formatting.
std::string format_trajectory(const Network& net, const Scenario& s, const std::vector<StepRecord>& records);

struct RunSummary {
  Strategy strategy = Strategy::pursuit;
  std::uint64_t seed = 0;
  ConvergenceConstants constants;
  int n_steps = 0;
  double final_max_violation = 0.0;
  double peak_violation = 0.0;
  double peak_voltage = 0.0;
  double total_cost = 0.0;
  double max_dual = 0.0;
  bool dual_warning = false;  // some multiplier exceeded kDualWarningThreshold
  std::optional<TrackingReport> tracking;
};

RunSummary summarize(const Network& net, const std::vector<StepRecord>& records, const SimOptions& opts);
std::string format_summary(const RunSummary& summary);
std::string format_tracking(const TrackingReport& report);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace opfp
