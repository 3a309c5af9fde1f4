#include "opfp/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <set>

#include "opfp/error.hpp"

namespace opfp {

std::vector<SaddlePoint> solve_oracles(const Network& net, const Scenario& s, const SimOptions& opts,
                                       const std::vector<int>& steps, double tol, Exec exec) {
  const int n = static_cast<int>(steps.size());
  std::vector<SaddlePoint> out(n);
  std::vector<std::exception_ptr> errors(n);
  auto solve_one = [&](int j) {
    try {
      const int k = steps[j];
      OracleOptions oo;
      oo.tol = tol;
      out[j] = solve_saddle_oracle(problem_at(net, s, k, opts), params_at(s, k, opts.params), oo);
    } catch (...) {
      errors[j] = std::current_exception();
    }
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int j = 0; j < n; ++j) solve_one(j);
  } else {
    for (int j = 0; j < n; ++j) solve_one(j);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

TrackingReport measure_tracking(const Network& net, const Scenario& s, const SimOptions& opts,
                                const std::vector<StepRecord>& records, const TrackingOptions& topts) {
  if (records.empty()) throw InvalidInput("measure_tracking: no records");
  const int n = static_cast<int>(records.size());
  const int stride = std::max(1, topts.decimation);
  const auto costs = opts.costs_for(net.n_der());

  TrackingReport rep;
  rep.constants = convergence_constants(costs, net.sens, opts.params);
  rep.contraction_guaranteed = rep.constants.rho_alpha < 1.0;

  for (const auto& r : records) {
    const auto prob = problem_at(net, s, r.k, opts);
    const Vector predicted = predicted_magnitudes(prob.sens, prob.c, r.u, prob.der_load_p, prob.der_load_q);
    // e_gamma = predicted - y and e_mu = y - predicted share one norm
    rep.e_measured = std::max(rep.e_measured, (predicted - r.y).norm());
  }

  std::set<int> sample;
  for (int k = 0; k < n; k += stride) {
    sample.insert(k);
    if (k + 1 < n) sample.insert(k + 1);
  }
  sample.insert(n - 1);
  rep.sampled_steps.assign(sample.begin(), sample.end());
  const auto oracles = solve_oracles(net, s, opts, rep.sampled_steps, topts.oracle_tol, topts.exec);

  const int tail_start = static_cast<int>(std::floor((1.0 - topts.tail_fraction) * n));
  for (std::size_t j = 0; j < rep.sampled_steps.size(); ++j) {
    const int k = rep.sampled_steps[j];
    rep.max_oracle_residual = std::max(rep.max_oracle_residual, oracles[j].residual);
    const ControllerState zk{records[k].u, records[k].duals};
    const double err = (zk.flatten() - oracles[j].z.flatten()).norm();
    rep.tracking_error.push_back(err);
    if (k >= tail_start) rep.tracking_error_tail = std::max(rep.tracking_error_tail, err);
    if (j + 1 < rep.sampled_steps.size() && rep.sampled_steps[j + 1] == k + 1) {
      rep.sigma_z_measured =
          std::max(rep.sigma_z_measured, (oracles[j + 1].z.flatten() - oracles[j].z.flatten()).norm());
    }
  }

  if (rep.contraction_guaranteed) {
    const double alpha = rep.constants.alpha;
    rep.bound_rhs = (std::sqrt(2.0) * alpha * rep.e_measured + rep.sigma_z_measured) / (1.0 - rep.constants.rho_alpha);
    rep.bound_satisfied = rep.tracking_error_tail <= rep.bound_rhs;
  } else {
    rep.bound_rhs = std::numeric_limits<double>::infinity();
    rep.bound_satisfied = false;
  }
  return rep;
}

}  // namespace opfp
