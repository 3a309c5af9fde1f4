// opfp: command-line front end.
//
// Exit codes: 0 ok, 1 validation, 2 I/O, 3 plant failure, 4 oracle failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "opfp/config.hpp"
#include "opfp/error.hpp"
#include "opfp/feeder_io.hpp"
#include "opfp/oracle.hpp"
#include "opfp/output.hpp"
#include "opfp/powerflow.hpp"
#include "opfp/sim.hpp"
#include "opfp/tracking.hpp"

using namespace opfp;
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kValidation = 1, kIo = 2, kPlant = 3, kOracle = 4 };

// Flags that override fields of the run configuration.
struct Overrides {
  std::optional<std::string> feeder, scenario, strategy, region, output_dir;
  std::optional<double> alpha, nu, epsilon, v_min, v_max, c_p, c_q, duration, tau, noise;
  std::optional<std::uint64_t> seed;
  std::optional<int> decimation;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--feeder", o.feeder, "Feeder JSON file");
  cmd->add_option("--scenario", o.scenario, "Scenario CSV file (replaces the generator)");
  cmd->add_option("--strategy", o.strategy, "pursuit, droop or none");
  cmd->add_option("--region", o.region, "joint, real_only or reactive_only");
  cmd->add_option("--output-dir", o.output_dir, "Directory for output files");
  cmd->add_option("--alpha", o.alpha, "Stepsize");
  cmd->add_option("--nu", o.nu, "Primal regularization");
  cmd->add_option("--epsilon", o.epsilon, "Dual regularization");
  cmd->add_option("--v-min", o.v_min, "Lower voltage limit, pu");
  cmd->add_option("--v-max", o.v_max, "Upper voltage limit, pu");
  cmd->add_option("--c-p", o.c_p, "Curtailment cost weight, shared by all DERs");
  cmd->add_option("--c-q", o.c_q, "Reactive cost weight, shared by all DERs");
  cmd->add_option("--duration", o.duration, "Generated scenario length, s");
  cmd->add_option("--tau", o.tau, "Generated scenario sampling period, s");
  cmd->add_option("--noise", o.noise, "Measurement noise amplitude, pu");
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--decimation", o.decimation, "Oracle sampling stride for tracking reports");
}

RunConfig load_config(const std::string& path, const Overrides& o) {
  RunConfig c = path.empty() ? RunConfig{} : read_config(path);
  if (o.feeder) {
    c.feeder_path = fs::absolute(*o.feeder).string();
  }
  if (o.scenario) c.scenario_path = fs::absolute(*o.scenario).string();
  if (o.strategy) c.strategy = parse_strategy(*o.strategy);
  if (o.region) c.region = parse_region_kind(*o.region);
  if (o.output_dir) c.output_dir = fs::absolute(*o.output_dir).string();
  if (o.alpha) c.controller.alpha = *o.alpha;
  if (o.nu) c.controller.nu = *o.nu;
  if (o.epsilon) c.controller.epsilon = *o.epsilon;
  if (o.v_min) c.controller.v_min = *o.v_min;
  if (o.v_max) c.controller.v_max = *o.v_max;
  if (o.c_p || o.c_q) {
    const CostParams base = c.costs.empty() ? CostParams{} : c.costs.front();
    c.costs = {CostParams{o.c_p.value_or(base.c_p), o.c_q.value_or(base.c_q)}};
  }
  if (o.duration) c.generator.duration_s = *o.duration;
  if (o.tau) c.generator.tau = *o.tau;
  if (o.noise) c.noise_amplitude = *o.noise;
  if (o.seed) c.seed = *o.seed;
  if (o.decimation) c.report_decimation = *o.decimation;
  c.validate();
  return c;
}

Scenario load_scenario(const RunConfig& c, const FeederModel& f) {
  Scenario s = c.scenario_path ? read_scenario(f, c.resolve(*c.scenario_path)) : generate_scenario(f, c.generator, c.seed);
  if (c.noise_amplitude) s.noise_amplitude = *c.noise_amplitude;
  s.validate(f);
  return s;
}

fs::path output_dir(const RunConfig& c) {
  const fs::path dir = c.resolve(c.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

void print_constants(const ConvergenceConstants& k) {
  std::printf("eta %.6g  L_reg %.6g  alpha %.6g  rho(alpha) %.6g  alpha_max %.6g\n", k.eta, k.L_reg, k.alpha,
              k.rho_alpha, k.alpha_max);
  if (k.contracts()) {
    std::printf("alpha satisfies 0 < alpha < 2 eta / L_reg^2\n");
  } else {
    std::printf("warning: alpha outside (0, %.6g): no theoretical contraction guarantee\n", k.alpha_max);
  }
}

std::string number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void emit(const std::optional<std::string>& out, const std::string& text) {
  if (out) {
    write_text(*out, text);
  } else {
    std::cout << text;
  }
}

int cmd_validate(const std::string& path) {
  const FeederModel f = read_feeder(path);
  auto diags = validate_feeder(f);
  if (diags.empty()) {
    try {
      build_admittance(f);
    } catch (const DegenerateNetwork& e) {
      diags.push_back({"ill-conditioned", e.what()});
    }
  }
  for (const auto& d : diags) std::printf("%s: %s\n", d.code.c_str(), d.message.c_str());
  return diags.empty() ? kOk : kValidation;
}

// Voltages at nominal loads plus DERs at the given share of their rating.
int cmd_powerflow(const std::string& path, double der_level, const std::optional<std::string>& out) {
  const FeederModel f = read_feeder(path);
  const auto adm = build_admittance(f);
  PowerInjection inj{-f.nominal_load_p(), -f.nominal_load_q()};
  for (const auto& d : f.ders) inj.p[d.node.index - 1] += der_level * d.s_rating;
  const auto sol = solve_ac(adm, inj, f.slack_voltage, VoltageProfile::flat(f.n_nodes, f.slack_voltage));
  std::ostringstream os;
  os << "node,magnitude,angle_deg\n";
  for (int i = 0; i < f.n_nodes; ++i) {
    os << i + 1 << ',' << number(sol.voltages.rho[i]) << ',' << number(std::arg(sol.voltages.v[i]) * 180.0 / M_PI)
       << '\n';
  }
  emit(out, os.str());
  std::fprintf(stderr, "converged in %d iterations, residual %.3g\n", sol.iterations, sol.residual);
  return kOk;
}

int cmd_linearize(const std::string& path, const std::optional<std::string>& out) {
  const FeederModel f = read_feeder(path);
  const auto lm = build_linear_model(build_admittance(f), f.slack_voltage);
  auto rows = [](const Matrix& m) {
    json a = json::array();
    for (int i = 0; i < m.rows(); ++i) {
      json r = json::array();
      for (int j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
      a.push_back(std::move(r));
    }
    return a;
  };
  json j;
  j["nodes"] = f.n_nodes;
  j["a"] = std::vector<double>(lm.a.data(), lm.a.data() + lm.a.size());
  j["R"] = rows(lm.R);
  j["B"] = rows(lm.B);
  emit(out, j.dump(2) + "\n");
  return kOk;
}

int cmd_run(const RunConfig& c) {
  const Network net(read_feeder(c.resolve(c.feeder_path)));
  const Scenario s = load_scenario(c, net.feeder);
  const SimOptions opts = c.sim_options();
  if (opts.strategy == Strategy::pursuit) {
    print_constants(convergence_constants(opts.costs_for(net.n_der()), net.sens, opts.params));
  }
  const auto records = run_closed_loop(net, s, opts);
  const RunSummary summary = summarize(net, records, opts);
  const fs::path dir = output_dir(c);
  write_text(dir / "trajectory.csv", format_trajectory(net, s, records));
  write_text(dir / "summary.json", format_summary(summary));
  std::printf("strategy %s  seed %llu  steps %d\n", std::string(to_string(summary.strategy)).c_str(),
              static_cast<unsigned long long>(summary.seed), summary.n_steps);
  std::printf("final max violation %.3e pu  peak voltage %.5f pu  total cost %.6g\n", summary.final_max_violation,
              summary.peak_voltage, summary.total_cost);
  if (summary.dual_warning) {
    std::printf("warning: multipliers reached %.3g; the voltage limits may be infeasible\n", summary.max_dual);
  }
  std::printf("wrote %s and %s\n", (dir / "trajectory.csv").string().c_str(), (dir / "summary.json").string().c_str());
  return kOk;
}

int cmd_oracle(const RunConfig& c, int step, const std::optional<std::string>& out) {
  const Network net(read_feeder(c.resolve(c.feeder_path)));
  const Scenario s = load_scenario(c, net.feeder);
  if (step < 0 || step >= s.n_steps) throw InvalidInput("oracle: step outside the scenario");
  const SimOptions opts = c.sim_options();
  const auto sp = solve_oracles(net, s, opts, {step}, c.oracle_tol, Exec::serial).front();
  json j;
  j["step"] = step;
  j["kkt_residual"] = sp.residual;
  j["iterations"] = sp.iterations;
  json u = json::array();
  for (int i = 0; i < net.n_der(); ++i) {
    u.push_back({{"node", net.der_nodes[i]}, {"p", sp.z.u[i].p}, {"q", sp.z.u[i].q}});
  }
  j["u"] = std::move(u);
  const auto& d = sp.z.duals;
  j["monitored"] = net.monitored_nodes;
  j["gamma"] = std::vector<double>(d.gamma.data(), d.gamma.data() + d.gamma.size());
  j["mu"] = std::vector<double>(d.mu.data(), d.mu.data() + d.mu.size());
  emit(out ? out : std::optional<std::string>((output_dir(c) / ("oracle_" + std::to_string(step) + ".json")).string()),
       j.dump(2) + "\n");
  std::printf("step %d  kkt residual %.3e  iterations %ld\n", step, sp.residual, sp.iterations);
  return kOk;
}

int cmd_report(const RunConfig& c) {
  const Network net(read_feeder(c.resolve(c.feeder_path)));
  const Scenario s = load_scenario(c, net.feeder);
  SimOptions opts = c.sim_options();
  opts.strategy = Strategy::pursuit;
  const auto k = convergence_constants(opts.costs_for(net.n_der()), net.sens, opts.params);
  print_constants(k);
  const auto records = run_closed_loop(net, s, opts);
  TrackingOptions t;
  t.decimation = c.report_decimation;
  t.oracle_tol = c.oracle_tol;
  const auto rep = measure_tracking(net, s, opts, records, t);
  RunSummary summary = summarize(net, records, opts);
  summary.tracking = rep;
  const fs::path dir = output_dir(c);
  write_text(dir / "tracking.json", format_tracking(rep));
  write_text(dir / "summary.json", format_summary(summary));
  std::printf("e %.3e  sigma_z %.3e  tail tracking error %.3e\n", rep.e_measured, rep.sigma_z_measured,
              rep.tracking_error_tail);
  if (rep.contraction_guaranteed) {
    std::printf("bound %.3e: %s\n", rep.bound_rhs, rep.bound_satisfied ? "satisfied" : "violated");
  }
  std::printf("wrote %s\n", (dir / "tracking.json").string().c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feedback primal-dual voltage regulation on distribution feeders"};
  app.require_subcommand(1);
  app.footer("Exit codes: 0 ok, 1 validation, 2 I/O, 3 plant failure, 4 oracle failure.");

  std::string feeder_path;
  std::string config_path;
  std::optional<std::string> out;
  double der_level = 0.0;
  int step = 0;
  Overrides ov;

  auto* validate = app.add_subcommand("validate", "Check a feeder file");
  validate->add_option("feeder", feeder_path, "Feeder JSON file")->required();

  auto* powerflow = app.add_subcommand("powerflow", "Solve the AC power flow at nominal loads");
  powerflow->add_option("feeder", feeder_path, "Feeder JSON file")->required();
  powerflow->add_option("--der-level", der_level, "DER output as a share of rating")->check(CLI::Range(0.0, 1.0));
  powerflow->add_option("--out", out, "Write CSV here instead of stdout");

  auto* linearize = app.add_subcommand("linearize", "Dump the linear voltage model (R, B, a)");
  linearize->add_option("feeder", feeder_path, "Feeder JSON file")->required();
  linearize->add_option("--out", out, "Write JSON here instead of stdout");

  auto* run = app.add_subcommand("run", "Closed-loop simulation");
  auto* oracle = app.add_subcommand("oracle", "Saddle point of the surrogate at one step");
  auto* report = app.add_subcommand("report", "Tracking report against per-step saddle points");
  for (auto* cmd : {run, oracle, report}) {
    cmd->add_option("--config", config_path, "Run configuration JSON");
    add_overrides(cmd, ov);
  }
  oracle->add_option("--step", step, "Scenario step");
  oracle->add_option("--out", out, "Output file (default <output-dir>/oracle_<step>.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*validate) return cmd_validate(feeder_path);
    if (*powerflow) return cmd_powerflow(feeder_path, der_level, out);
    if (*linearize) return cmd_linearize(feeder_path, out);
    const RunConfig cfg = load_config(config_path, ov);
    if (*run) return cmd_run(cfg);
    if (*oracle) return cmd_oracle(cfg, step, out);
    if (*report) return cmd_report(cfg);
  } catch (const PlantFailure& e) {
    std::fprintf(stderr, "plant failure: %s\n", e.what());
    return kPlant;
  } catch (const OracleFailure& e) {
    std::fprintf(stderr, "oracle failure (residual %.3e): %s\n", e.residual(), e.what());
    return kOracle;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kIo;
  } catch (const Error& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kValidation;
  }
  return kOk;
}
