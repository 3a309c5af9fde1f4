#include "opfp/sim.hpp"

#include <random>
#include <string>

#include "opfp/error.hpp"

namespace opfp {

Strategy parse_strategy(std::string_view name) {
  if (name == "pursuit") return Strategy::pursuit;
  if (name == "droop") return Strategy::droop;
  if (name == "none") return Strategy::none;
  throw InvalidInput("unknown strategy \"" + std::string(name) + "\"");
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::pursuit: return "pursuit";
    case Strategy::droop: return "droop";
    case Strategy::none: return "none";
  }
  return "none";
}

Network::Network(FeederModel f)
    : feeder(std::move(f)),
      adm(build_admittance(feeder)),
      lm(build_linear_model(adm, feeder.slack_voltage)),
      sens(Sensitivities::from_model(lm, feeder.der_nodes(), feeder.monitored_nodes())),
      plant(adm, feeder.slack_voltage),
      der_nodes(feeder.der_nodes()),
      monitored_nodes(feeder.monitored_nodes()) {}

std::vector<CostParams> SimOptions::costs_for(int n_der) const {
  if (costs.empty()) return std::vector<CostParams>(n_der);
  if (costs.size() == 1) return std::vector<CostParams>(n_der, costs.front());
  if (static_cast<int>(costs.size()) != n_der) throw InvalidInput("cost parameters do not match the DER count");
  return costs;
}

std::vector<OperatingRegion> regions_at(const Network& net, const Scenario& s, int k, RegionKind kind, double pf_tan) {
  std::vector<OperatingRegion> out(net.n_der());
  for (int i = 0; i < net.n_der(); ++i) {
    out[i] = OperatingRegion::make(kind, net.feeder.ders[i].s_rating, s.p_av(k, i));
    out[i].pf_tan = pf_tan;
  }
  return out;
}

ControllerParams params_at(const Scenario& s, int k, const ControllerParams& base) {
  ControllerParams p = base;
  p.v_min = s.v_min[k];
  p.v_max = s.v_max[k];
  return p;
}

StaticProblem problem_at(const Network& net, const Scenario& s, int k, const SimOptions& opts) {
  StaticProblem prob;
  prob.sens = net.sens;
  const Vector lp = s.load_p.row(k).transpose();
  const Vector lq = s.load_q.row(k).transpose();
  prob.c = constraint_offsets(net.lm, lp, lq, net.der_nodes, net.monitored_nodes);
  prob.der_load_p.resize(net.n_der());
  prob.der_load_q.resize(net.n_der());
  for (int i = 0; i < net.n_der(); ++i) {
    prob.der_load_p[i] = lp[net.der_nodes[i] - 1];
    prob.der_load_q[i] = lq[net.der_nodes[i] - 1];
  }
  prob.regions = regions_at(net, s, k, opts.region_kind, opts.pf_tan);
  prob.costs = opts.costs_for(net.n_der());
  return prob;
}

namespace {

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double step_cost(std::span<const Setpoint> u, const Vector& p_av, std::span<const CostParams> costs,
                 Strategy strategy) {
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (strategy == Strategy::droop) {
      total += costs[i].c_q * u[i].q * u[i].q;
    } else {
      total += costs[i].value(u[i], p_av[static_cast<Eigen::Index>(i)]);
    }
  }
  return total;
}

}  // namespace

std::vector<StepRecord> run_closed_loop(const Network& net, const Scenario& s, const SimOptions& opts) {
  s.validate(net.feeder);
  opts.params.validate();
  opts.droop.validate();
  const int n_der = net.n_der();
  const int n_mon = net.n_monitored();
  const auto costs = opts.costs_for(n_der);
  std::mt19937_64 rng(opts.seed);

  ControllerState state;
  if (opts.init) {
    state = *opts.init;
    if (static_cast<int>(state.u.size()) != n_der || state.duals.size() != n_mon) {
      throw InvalidInput("initial controller state has the wrong dimensions");
    }
  } else {
    state.u.resize(n_der);
    for (int i = 0; i < n_der; ++i) state.u[i] = {s.p_av(0, i), 0.0};
    state.duals = DualState::zero(n_mon);
  }
  std::vector<Setpoint> applied = state.u;
  VoltageProfile warm = VoltageProfile::flat(net.n_nodes(), net.feeder.slack_voltage);

  std::vector<StepRecord> records;
  records.reserve(s.n_steps);
  for (int k = 0; k < s.n_steps; ++k) {
    const auto regions = regions_at(net, s, k, opts.region_kind, opts.pf_tan);
    const ControllerParams params = params_at(s, k, opts.params);

    if (opts.strategy == Strategy::none) {
      for (int i = 0; i < n_der; ++i) {
        state.u[i] = project_feasible({regions[i].p_available, 0.0}, regions[i]);
        applied[i] = state.u[i];
      }
    } else {
      for (int i = 0; i < n_der; ++i) {
        const double keep = opts.lag_beta;
        const Setpoint lagged{applied[i].p + (1.0 - keep) * (state.u[i].p - applied[i].p),
                              applied[i].q + (1.0 - keep) * (state.u[i].q - applied[i].q)};
        // inverters cannot exceed what is available right now
        applied[i] = project_feasible(lagged, regions[i]);
      }
    }

    PowerInjection inj{-s.load_p.row(k).transpose(), -s.load_q.row(k).transpose()};
    for (int i = 0; i < n_der; ++i) {
      inj.p[net.der_nodes[i] - 1] += applied[i].p;
      inj.q[net.der_nodes[i] - 1] += applied[i].q;
    }

    StepRecord rec;
    rec.k = k;
    if (opts.linear_plant) {
      rec.v_plant = predict_voltage_magnitude(net.lm, inj);
    } else {
      try {
        const PFSolution sol = net.plant.solve(inj, warm, opts.pf);
        warm = sol.voltages;
        rec.v_plant = sol.voltages.rho;
        rec.pf_residual = sol.residual;
        rec.pf_iterations = sol.iterations;
      } catch (const PlantFailure& e) {
        throw PlantFailure("step " + std::to_string(k) + ": " + e.what(), e.residual(), k);
      }
    }

    rec.y.resize(n_mon);
    double violation = 0.0;
    for (int m = 0; m < n_mon; ++m) {
      const double v = rec.v_plant[net.monitored_nodes[m] - 1];
      violation = std::max({violation, v - params.v_max, params.v_min - v});
      rec.y[m] = v;
      if (s.noise_amplitude > 0.0) rec.y[m] += s.noise_amplitude * (2.0 * unit_uniform(rng) - 1.0);
    }
    rec.u = state.u;
    rec.applied = applied;
    rec.duals = state.duals;
    rec.p_av = s.p_av.row(k).transpose();
    rec.v_min = params.v_min;
    rec.v_max = params.v_max;
    rec.max_violation = violation;
    rec.cost = step_cost(applied, rec.p_av, costs, opts.strategy);

    if (opts.strategy == Strategy::pursuit) {
      const DualState next_duals = dual_step_feedback(state.duals, rec.y, params);
      state.u = primal_step(state.u, state.duals, costs, regions, net.sens, params, opts.exec);
      state.duals = next_duals;
    } else if (opts.strategy == Strategy::droop) {
      for (int i = 0; i < n_der; ++i) {
        double v_local = rec.v_plant[net.der_nodes[i] - 1];
        if (s.noise_amplitude > 0.0) v_local += s.noise_amplitude * (2.0 * unit_uniform(rng) - 1.0);
        state.u[i] = droop_setpoint(v_local, regions[i], opts.droop);
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<double> eval_cost(const std::vector<StepRecord>& records, std::span<const CostParams> costs,
                              Strategy strategy) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const auto c = costs.size() == 1 ? std::vector<CostParams>(r.applied.size(), costs[0])
                                     : std::vector<CostParams>(costs.begin(), costs.end());
    out.push_back(step_cost(r.applied, r.p_av, c, strategy));
  }
  return out;
}

}  // namespace opfp
