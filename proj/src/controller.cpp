#include "opfp/controller.hpp"

#include <algorithm>
#include <cmath>

#include "opfp/error.hpp"

namespace opfp {

void ControllerParams::validate() const {
  if (!(alpha > 0.0)) throw InvalidInput("controller: alpha must be positive");
  if (!(nu > 0.0)) throw InvalidInput("controller: nu must be positive");
  if (!(epsilon > 0.0)) throw InvalidInput("controller: epsilon must be positive");
  if (!(v_min < v_max)) throw InvalidInput("controller: v_min must be below v_max");
}

Sensitivities Sensitivities::from_model(const LinearModel& lm, std::span<const int> der_nodes,
                                        std::span<const int> monitored_nodes) {
  const auto m = static_cast<Eigen::Index>(monitored_nodes.size());
  const auto g = static_cast<Eigen::Index>(der_nodes.size());
  Sensitivities s{Matrix(m, g), Matrix(m, g)};
  for (Eigen::Index row = 0; row < m; ++row) {
    for (Eigen::Index col = 0; col < g; ++col) {
      s.r(row, col) = lm.R(monitored_nodes[row] - 1, der_nodes[col] - 1);
      s.b(row, col) = lm.B(monitored_nodes[row] - 1, der_nodes[col] - 1);
    }
  }
  return s;
}

Matrix Sensitivities::stacked() const {
  Matrix a(r.rows(), 2 * r.cols());
  for (Eigen::Index i = 0; i < r.cols(); ++i) {
    a.col(2 * i) = r.col(i);
    a.col(2 * i + 1) = b.col(i);
  }
  return a;
}

Vector predicted_magnitudes(const Sensitivities& sens, const Vector& c, std::span<const Setpoint> u,
                            const Vector& der_load_p, const Vector& der_load_q) {
  Vector out = c;
  for (int i = 0; i < sens.n_der(); ++i) {
    out += sens.r.col(i) * (u[i].p - der_load_p[i]) + sens.b.col(i) * (u[i].q - der_load_q[i]);
  }
  return out;
}

ConstraintValues eval_constraints(const Sensitivities& sens, const Vector& c, std::span<const Setpoint> u,
                                  const Vector& der_load_p, const Vector& der_load_q,
                                  const ControllerParams& params) {
  const Vector v = predicted_magnitudes(sens, c, u, der_load_p, der_load_q);
  ConstraintValues out;
  out.g = (-v).array() + params.v_min;
  out.g_bar = v.array() - params.v_max;
  return out;
}

SetpointGradient grad_primal(int i, Setpoint u_i, double p_available, const DualState& duals,
                             const CostParams& cost, const Sensitivities& sens, const ControllerParams& params) {
  const Vector diff = duals.mu - duals.gamma;
  return {-2.0 * cost.c_p * (p_available - u_i.p) + sens.r.col(i).dot(diff) + params.nu * u_i.p,
          2.0 * cost.c_q * u_i.q + sens.b.col(i).dot(diff) + params.nu * u_i.q};
}

DualState dual_step_feedback(const DualState& duals, const Vector& y, const ControllerParams& params) {
  const Vector g = (-y).array() + params.v_min;
  const Vector g_bar = y.array() - params.v_max;
  return dual_step_model(duals, g, g_bar, params);
}

DualState dual_step_model(const DualState& duals, const Vector& g, const Vector& g_bar,
                          const ControllerParams& params) {
  const double a = params.alpha;
  const double e = params.epsilon;
  DualState out;
  out.gamma = (duals.gamma + a * (g - e * duals.gamma)).cwiseMax(0.0);
  out.mu = (duals.mu + a * (g_bar - e * duals.mu)).cwiseMax(0.0);
  return out;
}

std::vector<Setpoint> primal_step(std::span<const Setpoint> u, const DualState& duals,
                                  std::span<const CostParams> costs, std::span<const OperatingRegion> regions,
                                  const Sensitivities& sens, const ControllerParams& params, Exec exec) {
  const int n = static_cast<int>(u.size());
  if (costs.size() != u.size() || regions.size() != u.size() || sens.n_der() != n) {
    throw InvalidInput("primal_step: need one cost, region and sensitivity column per DER");
  }
  std::vector<Setpoint> out(u.size());
  // r^T(mu - gamma) and b^T(mu - gamma) for every DER at once
  const Vector diff = duals.mu - duals.gamma;
  const Vector r_term = sens.r.transpose() * diff;
  const Vector b_term = sens.b.transpose() * diff;
  const double a = params.alpha;

  auto update = [&](int i) {
    const auto& cost = costs[i];
    const auto& region = regions[i];
    const double dp = -2.0 * cost.c_p * (region.p_available - u[i].p) + r_term[i] + params.nu * u[i].p;
    const double dq = 2.0 * cost.c_q * u[i].q + b_term[i] + params.nu * u[i].q;
    out[i] = project_feasible({u[i].p - a * dp, u[i].q - a * dq}, region);
  };

  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static) if (n >= 64)
    for (int i = 0; i < n; ++i) update(i);
  } else {
    for (int i = 0; i < n; ++i) update(i);
  }
  return out;
}

Vector ControllerState::flatten() const {
  const auto g = static_cast<Eigen::Index>(u.size());
  const auto m = static_cast<Eigen::Index>(duals.size());
  Vector z(2 * g + 2 * m);
  for (Eigen::Index i = 0; i < g; ++i) {
    z[2 * i] = u[i].p;
    z[2 * i + 1] = u[i].q;
  }
  z.segment(2 * g, m) = duals.gamma;
  z.segment(2 * g + m, m) = duals.mu;
  return z;
}

ControllerState ControllerState::unflatten(const Vector& z, int n_der, int n_monitored) {
  ControllerState s;
  s.u.resize(n_der);
  for (int i = 0; i < n_der; ++i) s.u[i] = {z[2 * i], z[2 * i + 1]};
  s.duals.gamma = z.segment(2 * n_der, n_monitored);
  s.duals.mu = z.segment(2 * n_der + n_monitored, n_monitored);
  return s;
}

ControllerState model_step(const ControllerState& z, const StaticProblem& problem, const ControllerParams& params,
                           Exec exec) {
  const auto cv = eval_constraints(problem.sens, problem.c, z.u, problem.der_load_p, problem.der_load_q, params);
  ControllerState next;
  next.u = primal_step(z.u, z.duals, problem.costs, problem.regions, problem.sens, params, exec);
  next.duals = dual_step_model(z.duals, cv.g, cv.g_bar, params);
  return next;
}

double ConvergenceConstants::rho(double a) const {
  return std::sqrt(std::max(0.0, 1.0 - 2.0 * eta * a + a * a * L_reg * L_reg));
}

ConvergenceConstants convergence_constants(std::span<const CostParams> costs, const Sensitivities& sens,
                                           const ControllerParams& params) {
  ConvergenceConstants k;
  for (const auto& c : costs) k.L = std::max(k.L, c.lipschitz());
  const Matrix a = sens.stacked();
  if (a.size() > 0) {
    Eigen::JacobiSVD<Matrix> svd(a);
    k.G = svd.singularValues()[0];
  }
  k.eta = std::min(params.nu, params.epsilon);
  const double t1 = k.L + params.nu + 2.0 * k.G;
  const double t2 = k.G + params.epsilon;
  k.L_reg = std::sqrt(t1 * t1 + 2.0 * t2 * t2);
  k.alpha = params.alpha;
  k.rho_alpha = k.rho(params.alpha);
  k.alpha_max = 2.0 * k.eta / (k.L_reg * k.L_reg);
  return k;
}

}  // namespace opfp
