#pragma once

#include <optional>

#include "opfp/controller.hpp"

namespace opfp {

enum class OracleMethod {
  // Eliminate the duals in closed form (gamma = [g]_+/eps, mu = [g_bar]_+/eps)
  // and run accelerated projected gradient on the strongly convex remainder.
  reduced_primal,
  // Iterate the error-free primal-dual map at alpha = eta / L_reg^2.
  primal_dual,
};

struct OracleOptions {
  double tol = 1e-11;
  long max_iter = 5'000'000;
  OracleMethod method = OracleMethod::reduced_primal;
  std::optional<ControllerState> init;
};

struct SaddlePoint {
  ControllerState z;
  double residual = 0.0;  // see kkt_residual
  long iterations = 0;
};

// The saddle operator: [grad_u L; -(g - eps gamma); -(g_bar - eps mu)].
Vector saddle_operator(const StaticProblem& problem, const ControllerParams& params, const ControllerState& z);

// inf-norm of z - proj(z - Phi(z)); zero exactly at the saddle point.
double kkt_residual(const StaticProblem& problem, const ControllerParams& params, const ControllerState& z);

// Throws OracleFailure when max_iter is exhausted before reaching tol.
SaddlePoint solve_saddle_oracle(const StaticProblem& problem, const ControllerParams& params,
                                const OracleOptions& opts = {});

}  // namespace opfp
