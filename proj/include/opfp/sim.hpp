#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "opfp/controller.hpp"
#include "opfp/droop.hpp"
#include "opfp/feeder.hpp"
#include "opfp/powerflow.hpp"
#include "opfp/scenario.hpp"

namespace opfp {

enum class Strategy { pursuit, droop, none };

Strategy parse_strategy(std::string_view name);
std::string_view to_string(Strategy s);

// A feeder with everything derived from it once: admittance, linear model,
// factorized plant and the controller's sensitivity slices.
struct Network {
  FeederModel feeder;
  AdmittanceMatrix adm;
  LinearModel lm;
  Sensitivities sens;
  AcPowerFlow plant;
  std::vector<int> der_nodes;
  std::vector<int> monitored_nodes;

  explicit Network(FeederModel f);
  int n_der() const { return feeder.n_der(); }
  int n_monitored() const { return feeder.n_monitored(); }
  int n_nodes() const { return feeder.n_nodes; }
};

struct SimOptions {
  Strategy strategy = Strategy::pursuit;
  ControllerParams params;  // v_min / v_max are taken from the scenario each step
  std::vector<CostParams> costs;  // one per DER, or a single entry shared by all
  DroopCurve droop;
  RegionKind region_kind = RegionKind::joint;
  double pf_tan = 0.0;
  double lag_beta = 0.0;  // u_applied += (1 - beta)(u_cmd - u_applied)
  std::uint64_t seed = 0;
  PowerFlowOptions pf;
  std::optional<ControllerState> init;
  bool linear_plant = false;  // measure the linear model instead of solving AC
  Exec exec = Exec::parallel;

  std::vector<CostParams> costs_for(int n_der) const;
};

struct StepRecord {
  int k = 0;
  Vector y;                       // measured magnitudes at monitored nodes
  std::vector<Setpoint> u;        // controller setpoints entering step k
  std::vector<Setpoint> applied;  // what the inverters actually produced
  DualState duals;                // multipliers entering step k
  Vector p_av;
  Vector v_plant;                 // plant magnitudes, nodes 1..N
  double v_min = 0.0;
  double v_max = 0.0;
  double cost = 0.0;
  double max_violation = 0.0;     // at monitored nodes, pu
  double pf_residual = 0.0;
  int pf_iterations = 0;
};

std::vector<OperatingRegion> regions_at(const Network& net, const Scenario& s, int k, RegionKind kind,
                                        double pf_tan = 0.0);

// Surrogate problem at step k: offsets from non-DER loads, DER-node loads,
// regions from P_av.
StaticProblem problem_at(const Network& net, const Scenario& s, int k, const SimOptions& opts);
ControllerParams params_at(const Scenario& s, int k, const ControllerParams& base);

// Throws PlantFailure carrying the step index when the plant solve fails.
std::vector<StepRecord> run_closed_loop(const Network& net, const Scenario& s, const SimOptions& opts);

// Per-step cost of the applied setpoints. Droop is charged c_q Q^2 only.
std::vector<double> eval_cost(const std::vector<StepRecord>& records, std::span<const CostParams> costs,
                              Strategy strategy);

}  // namespace opfp
