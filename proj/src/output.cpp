#include "opfp/output.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "opfp/error.hpp"

namespace opfp {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

nlohmann::ordered_json constants_json(const ConvergenceConstants& k) {
  return {{"L", k.L},
          {"G", k.G},
          {"eta", k.eta},
          {"L_reg", k.L_reg},
          {"alpha", k.alpha},
          {"rho_alpha", k.rho_alpha},
          {"alpha_max", k.alpha_max},
          {"contraction_guaranteed", k.contracts()}};
}

nlohmann::ordered_json tracking_json(const TrackingReport& r) {
  nlohmann::ordered_json j;
  j["constants"] = constants_json(r.constants);
  j["sigma_z_measured"] = r.sigma_z_measured;
  j["e_measured"] = r.e_measured;
  j["bound_rhs"] = r.contraction_guaranteed ? nlohmann::ordered_json(r.bound_rhs) : nlohmann::ordered_json(nullptr);
  j["tracking_error_tail"] = r.tracking_error_tail;
  j["contraction_guaranteed"] = r.contraction_guaranteed;
  j["bound_satisfied"] = r.bound_satisfied;
  j["max_oracle_residual"] = r.max_oracle_residual;
  j["sampled_steps"] = r.sampled_steps;
  j["tracking_error"] = r.tracking_error;
  return j;
}

}  // namespace

std::string format_trajectory(const Network& net, const Scenario& s, const std::vector<StepRecord>& records) {
  std::ostringstream os;
  os << "k,time_s,cost,max_violation,pf_residual,v_min,v_max";
  for (int m : net.monitored_nodes) os << ",y_" << m;
  for (int d : net.der_nodes) os << ",p_" << d << ",q_" << d << ",pa_" << d << ",qa_" << d << ",pav_" << d;
  for (int m : net.monitored_nodes) os << ",gamma_" << m << ",mu_" << m;
  for (int j = 1; j <= net.n_nodes(); ++j) os << ",v_" << j;
  os << '\n';
  for (const auto& r : records) {
    os << r.k << ',' << fmt(r.k * s.tau) << ',' << fmt(r.cost) << ',' << fmt(r.max_violation) << ','
       << fmt(r.pf_residual) << ',' << fmt(r.v_min) << ',' << fmt(r.v_max);
    for (Eigen::Index m = 0; m < r.y.size(); ++m) os << ',' << fmt(r.y[m]);
    for (std::size_t i = 0; i < r.u.size(); ++i) {
      os << ',' << fmt(r.u[i].p) << ',' << fmt(r.u[i].q) << ',' << fmt(r.applied[i].p) << ','
         << fmt(r.applied[i].q) << ',' << fmt(r.p_av[static_cast<Eigen::Index>(i)]);
    }
    for (Eigen::Index m = 0; m < r.duals.gamma.size(); ++m) {
      os << ',' << fmt(r.duals.gamma[m]) << ',' << fmt(r.duals.mu[m]);
    }
    for (Eigen::Index j = 0; j < r.v_plant.size(); ++j) os << ',' << fmt(r.v_plant[j]);
    os << '\n';
  }
  return os.str();
}

RunSummary summarize(const Network& net, const std::vector<StepRecord>& records, const SimOptions& opts) {
  RunSummary s;
  s.strategy = opts.strategy;
  s.seed = opts.seed;
  s.constants = convergence_constants(opts.costs_for(net.n_der()), net.sens, opts.params);
  s.n_steps = static_cast<int>(records.size());
  for (const auto& r : records) {
    s.peak_violation = std::max(s.peak_violation, r.max_violation);
    s.peak_voltage = std::max(s.peak_voltage, r.v_plant.maxCoeff());
    s.total_cost += r.cost;
    if (r.duals.size() > 0) {
      s.max_dual = std::max({s.max_dual, r.duals.gamma.maxCoeff(), r.duals.mu.maxCoeff()});
    }
  }
  s.dual_warning = s.max_dual > kDualWarningThreshold;
  if (!records.empty()) s.final_max_violation = records.back().max_violation;
  return s;
}

std::string format_summary(const RunSummary& s) {
  nlohmann::ordered_json j;
  j["strategy"] = std::string(to_string(s.strategy));
  j["seed"] = s.seed;
  j["n_steps"] = s.n_steps;
  j["constants"] = constants_json(s.constants);
  j["final_max_violation"] = s.final_max_violation;
  j["peak_violation"] = s.peak_violation;
  j["peak_voltage"] = s.peak_voltage;
  j["total_cost"] = s.total_cost;
  j["max_dual"] = s.max_dual;
  j["dual_warning"] = s.dual_warning;
  if (s.tracking) j["tracking"] = tracking_json(*s.tracking);
  return j.dump(2) + "\n";
}

std::string format_tracking(const TrackingReport& report) { return tracking_json(report).dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace opfp
