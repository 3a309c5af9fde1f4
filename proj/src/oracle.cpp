#include "opfp/oracle.hpp"

#include <cmath>
#include <sstream>

#include "opfp/error.hpp"

namespace opfp {

namespace {

std::vector<Setpoint> default_start(const StaticProblem& problem) {
  std::vector<Setpoint> u(problem.n_der());
  for (int i = 0; i < problem.n_der(); ++i) u[i] = project_feasible({problem.regions[i].p_available, 0.0}, problem.regions[i]);
  return u;
}

// Duals that maximize the regularized Lagrangian for fixed u.
DualState best_response_duals(const StaticProblem& problem, const ControllerParams& params,
                               std::span<const Setpoint> u) {
  const auto cv = eval_constraints(problem.sens, problem.c, u, problem.der_load_p, problem.der_load_q, params);
  return {cv.g.cwiseMax(0.0) / params.epsilon, cv.g_bar.cwiseMax(0.0) / params.epsilon};
}

std::vector<SetpointGradient> reduced_gradient(const StaticProblem& problem, const ControllerParams& params,
                                               std::span<const Setpoint> u) {
  const DualState d = best_response_duals(problem, params, u);
  std::vector<SetpointGradient> grad(u.size());
  for (int i = 0; i < problem.n_der(); ++i) {
    grad[i] = grad_primal(i, u[i], problem.regions[i].p_available, d, problem.costs[i], problem.sens, params);
  }
  return grad;
}

SaddlePoint solve_reduced(const StaticProblem& problem, const ControllerParams& params, const OracleOptions& opts) {
  const int n = problem.n_der();
  double l_cost = 0.0;
  double m_cost = std::numeric_limits<double>::infinity();
  for (const auto& c : problem.costs) {
    l_cost = std::max(l_cost, c.lipschitz());
    m_cost = std::min(m_cost, 2.0 * std::min(c.c_p, c.c_q));
  }
  if (problem.costs.empty()) m_cost = 0.0;
  const Matrix a = problem.sens.stacked();
  double g2 = 0.0;
  if (a.size() > 0) g2 = Eigen::JacobiSVD<Matrix>(a).singularValues()[0];
  g2 *= g2;
  // at most one of g_n, g_bar_n is positive, so the penalty Hessian is <= A^T A / eps
  const double lip = l_cost + params.nu + g2 / params.epsilon;
  const double strong = params.nu + m_cost;
  const double step = 1.0 / lip;
  const double kappa = lip / strong;
  const double beta = (std::sqrt(kappa) - 1.0) / (std::sqrt(kappa) + 1.0);

  std::vector<Setpoint> x = opts.init ? opts.init->u : default_start(problem);
  for (int i = 0; i < n; ++i) x[i] = project_feasible(x[i], problem.regions[i]);
  std::vector<Setpoint> y = x;
  std::vector<Setpoint> x_next(n);

  ControllerState z;
  double residual = std::numeric_limits<double>::infinity();
  long it = 0;
  for (; it < opts.max_iter; ++it) {
    const auto grad = reduced_gradient(problem, params, y);
    for (int i = 0; i < n; ++i) {
      x_next[i] = project_feasible({y[i].p - step * grad[i].p, y[i].q - step * grad[i].q}, problem.regions[i]);
    }
    // gradient-based adaptive restart
    double restart = 0.0;
    for (int i = 0; i < n; ++i) {
      restart += (y[i].p - x_next[i].p) * (x_next[i].p - x[i].p) + (y[i].q - x_next[i].q) * (x_next[i].q - x[i].q);
    }
    for (int i = 0; i < n; ++i) {
      if (restart > 0.0) {
        y[i] = x_next[i];
      } else {
        y[i] = {x_next[i].p + beta * (x_next[i].p - x[i].p), x_next[i].q + beta * (x_next[i].q - x[i].q)};
      }
    }
    x.swap(x_next);
    if (it % 10 == 9) {
      z.u = x;
      z.duals = best_response_duals(problem, params, x);
      residual = kkt_residual(problem, params, z);
      if (residual <= opts.tol) break;
    }
  }
  z.u = x;
  z.duals = best_response_duals(problem, params, x);
  residual = kkt_residual(problem, params, z);
  if (!(residual <= opts.tol)) {
    std::ostringstream os;
    os << "saddle oracle did not reach tolerance " << opts.tol << " (residual " << residual << ")";
    throw OracleFailure(os.str(), residual);
  }
  return {z, residual, it + 1};
}

SaddlePoint solve_primal_dual(const StaticProblem& problem, const ControllerParams& params,
                              const OracleOptions& opts) {
  ControllerParams p = params;
  const auto k = convergence_constants(problem.costs, problem.sens, params);
  p.alpha = k.optimal_alpha();

  ControllerState z;
  if (opts.init) {
    z = *opts.init;
    for (int i = 0; i < problem.n_der(); ++i) z.u[i] = project_feasible(z.u[i], problem.regions[i]);
    z.duals.gamma = z.duals.gamma.cwiseMax(0.0);
    z.duals.mu = z.duals.mu.cwiseMax(0.0);
  } else {
    z.u = default_start(problem);
    z.duals = DualState::zero(problem.n_monitored());
  }
  long it = 0;
  for (; it < opts.max_iter; ++it) {
    ControllerState next = model_step(z, problem, p);
    const double change = (next.flatten() - z.flatten()).lpNorm<Eigen::Infinity>();
    z = std::move(next);
    if (change <= opts.tol) break;
  }
  const double residual = kkt_residual(problem, params, z);
  if (it >= opts.max_iter) {
    std::ostringstream os;
    os << "primal-dual oracle hit max_iter " << opts.max_iter << " (residual " << residual << ")";
    throw OracleFailure(os.str(), residual);
  }
  return {z, residual, it + 1};
}

}  // namespace

Vector saddle_operator(const StaticProblem& problem, const ControllerParams& params, const ControllerState& z) {
  const int n = problem.n_der();
  const int m = problem.n_monitored();
  Vector phi(2 * n + 2 * m);
  for (int i = 0; i < n; ++i) {
    const auto g = grad_primal(i, z.u[i], problem.regions[i].p_available, z.duals, problem.costs[i], problem.sens, params);
    phi[2 * i] = g.p;
    phi[2 * i + 1] = g.q;
  }
  const auto cv = eval_constraints(problem.sens, problem.c, z.u, problem.der_load_p, problem.der_load_q, params);
  phi.segment(2 * n, m) = -(cv.g - params.epsilon * z.duals.gamma);
  phi.segment(2 * n + m, m) = -(cv.g_bar - params.epsilon * z.duals.mu);
  return phi;
}

double kkt_residual(const StaticProblem& problem, const ControllerParams& params, const ControllerState& z) {
  const int n = problem.n_der();
  const int m = problem.n_monitored();
  const Vector phi = saddle_operator(problem, params, z);
  double r = 0.0;
  for (int i = 0; i < n; ++i) {
    const Setpoint moved = project_feasible({z.u[i].p - phi[2 * i], z.u[i].q - phi[2 * i + 1]}, problem.regions[i]);
    r = std::max({r, std::abs(z.u[i].p - moved.p), std::abs(z.u[i].q - moved.q)});
  }
  for (int j = 0; j < m; ++j) {
    const double g = z.duals.gamma[j];
    const double u = z.duals.mu[j];
    r = std::max(r, std::abs(g - std::max(0.0, g - phi[2 * n + j])));
    r = std::max(r, std::abs(u - std::max(0.0, u - phi[2 * n + m + j])));
  }
  return r;
}

SaddlePoint solve_saddle_oracle(const StaticProblem& problem, const ControllerParams& params,
                                const OracleOptions& opts) {
  if (opts.method == OracleMethod::primal_dual) return solve_primal_dual(problem, params, opts);
  return solve_reduced(problem, params, opts);
}

}  // namespace opfp
