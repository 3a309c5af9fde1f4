#pragma once

#include <span>
#include <vector>

#include "opfp/feeder.hpp"
#include "opfp/powerflow.hpp"
#include "opfp/region.hpp"

namespace opfp {

// Per-DER separable quadratic cost  c_p (P_av - P)^2 + c_q Q^2.
struct CostParams {
  double c_p = 3.0;
  double c_q = 1.0;

  double lipschitz() const { return 2.0 * std::max(c_p, c_q); }
  double value(Setpoint u, double p_available) const {
    const double dp = p_available - u.p;
    return c_p * dp * dp + c_q * u.q * u.q;
  }
};

struct ControllerParams {
  double alpha = 0.2;     // stepsize
  double nu = 1e-3;       // primal Tikhonov weight
  double epsilon = 1e-4;  // dual Tikhonov weight
  double v_min = 0.95;
  double v_max = 1.05;

  // Throws InvalidInput if any invariant fails.
  void validate() const;
};

struct DualState {
  Vector gamma;  // lower-limit multipliers, one per monitored node
  Vector mu;     // upper-limit multipliers

  static DualState zero(int m) { return {Vector::Zero(m), Vector::Zero(m)}; }
  int size() const { return static_cast<int>(gamma.size()); }
};

// Rows of R and B at monitored nodes, columns at DER nodes: column i is the
// sensitivity of the monitored magnitudes to P_i (r) or Q_i (b).
struct Sensitivities {
  Matrix r;  // M x N_G
  Matrix b;  // M x N_G

  static Sensitivities from_model(const LinearModel& lm, std::span<const int> der_nodes,
                                  std::span<const int> monitored_nodes);
  int n_der() const { return static_cast<int>(r.cols()); }
  int n_monitored() const { return static_cast<int>(r.rows()); }
  // [r_1 b_1 r_2 b_2 ...], the Jacobian of the upper-limit constraints.
  Matrix stacked() const;
};

struct SetpointGradient {
  double p = 0.0;
  double q = 0.0;
};

struct ConstraintValues {
  Vector g;      // V_min - predicted magnitude
  Vector g_bar;  // predicted magnitude - V_max
};

// Predicted magnitude at each monitored node given DER setpoints:
// c_n + sum_i r_{n,i}(P_i - P_l,i) + b_{n,i}(Q_i - Q_l,i).
Vector predicted_magnitudes(const Sensitivities& sens, const Vector& c, std::span<const Setpoint> u,
                            const Vector& der_load_p, const Vector& der_load_q);

ConstraintValues eval_constraints(const Sensitivities& sens, const Vector& c, std::span<const Setpoint> u,
                                  const Vector& der_load_p, const Vector& der_load_q,
                                  const ControllerParams& params);

// Gradient of the regularized Lagrangian with respect to u_i.
SetpointGradient grad_primal(int i, Setpoint u_i, double p_available, const DualState& duals,
                             const CostParams& cost, const Sensitivities& sens, const ControllerParams& params);

// Measurement-driven dual update:
//   gamma <- [gamma + alpha (V_min - y - eps gamma)]_+
//   mu    <- [mu + alpha (y - V_max - eps mu)]_+
DualState dual_step_feedback(const DualState& duals, const Vector& y, const ControllerParams& params);

// Same update with model-evaluated constraint values.
DualState dual_step_model(const DualState& duals, const Vector& g, const Vector& g_bar,
                          const ControllerParams& params);

// Multipliers above this suggest the voltage limits cannot be met at all.
inline constexpr double kDualWarningThreshold = 1e6;

enum class Exec { serial, parallel };

// Projected gradient step applied independently at each DER, all using the
// same broadcast duals. The parallel kernel writes disjoint slots only, so
// both policies produce identical bits. Throws InvalidInput unless costs,
// regions and sensitivity columns all have one entry per DER.
std::vector<Setpoint> primal_step(std::span<const Setpoint> u, const DualState& duals,
                                  std::span<const CostParams> costs, std::span<const OperatingRegion> regions,
                                  const Sensitivities& sens, const ControllerParams& params,
                                  Exec exec = Exec::parallel);

// Everything that defines one instance of the convex surrogate at a time step.
struct StaticProblem {
  Sensitivities sens;
  Vector c;  // constraint offsets at monitored nodes
  Vector der_load_p;
  Vector der_load_q;
  std::vector<OperatingRegion> regions;
  std::vector<CostParams> costs;

  int n_der() const { return sens.n_der(); }
  int n_monitored() const { return sens.n_monitored(); }
};

// Primal iterate plus multipliers; flattened as [P_1 Q_1 ... | gamma | mu].
struct ControllerState {
  std::vector<Setpoint> u;
  DualState duals;

  Vector flatten() const;
  static ControllerState unflatten(const Vector& z, int n_der, int n_monitored);
};

// One error-free primal-dual iteration with model-based constraint values
// (the duals used by the primal step are the pre-update ones).
ControllerState model_step(const ControllerState& z, const StaticProblem& problem, const ControllerParams& params,
                           Exec exec = Exec::serial);

struct ConvergenceConstants {
  double L = 0.0;      // cost-gradient Lipschitz constant
  double G = 0.0;      // constraint-gradient norm bound
  double eta = 0.0;    // strong monotonicity, min(nu, eps)
  double L_reg = 0.0;  // Lipschitz constant of the saddle operator
  double alpha = 0.0;
  double rho_alpha = 0.0;
  double alpha_max = 0.0;

  double rho(double a) const;
  double optimal_alpha() const { return eta / (L_reg * L_reg); }
  bool contracts() const { return alpha > 0.0 && alpha < alpha_max; }
};

ConvergenceConstants convergence_constants(std::span<const CostParams> costs, const Sensitivities& sens,
                                           const ControllerParams& params);

}  // namespace opfp
