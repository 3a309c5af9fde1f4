#pragma once

#include <vector>

#include "opfp/oracle.hpp"
#include "opfp/sim.hpp"

namespace opfp {

struct TrackingOptions {
  int decimation = 10;       // oracle pairs (k, k+1) at every decimation-th step
  double oracle_tol = 1e-10;
  double tail_fraction = 0.25;
  Exec exec = Exec::parallel;
};

struct TrackingReport {
  ConvergenceConstants constants;
  double sigma_z_measured = 0.0;  // max ||z*(k+1) - z*(k)||
  double e_measured = 0.0;        // max ||predicted - measured|| over steps
  double bound_rhs = 0.0;         // (sqrt(2) alpha e + sigma_z) / (1 - rho)
  double tracking_error_tail = 0.0;
  bool contraction_guaranteed = false;
  bool bound_satisfied = false;
  std::vector<int> sampled_steps;
  std::vector<double> tracking_error;  // ||z^k - z*(k)|| at sampled_steps
  double max_oracle_residual = 0.0;
};

// Saddle points of the surrogate at the given steps; independent solves,
// run in parallel under Exec::parallel with results in input order.
std::vector<SaddlePoint> solve_oracles(const Network& net, const Scenario& s, const SimOptions& opts,
                                       const std::vector<int>& steps, double tol, Exec exec);

TrackingReport measure_tracking(const Network& net, const Scenario& s, const SimOptions& opts,
                                const std::vector<StepRecord>& records, const TrackingOptions& topts = {});

}  // namespace opfp
