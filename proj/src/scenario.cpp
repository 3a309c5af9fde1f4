#include "opfp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "opfp/error.hpp"

namespace opfp {

ScenarioKind parse_scenario_kind(std::string_view name) {
  if (name == "static" || name == "constant") return ScenarioKind::constant;
  if (name == "ramp") return ScenarioKind::ramp;
  if (name == "cloud_transient") return ScenarioKind::cloud_transient;
  if (name == "vmax_steps") return ScenarioKind::vmax_steps;
  throw InvalidInput("unknown scenario kind \"" + std::string(name) + "\"");
}

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::constant: return "static";
    case ScenarioKind::ramp: return "ramp";
    case ScenarioKind::cloud_transient: return "cloud_transient";
    case ScenarioKind::vmax_steps: return "vmax_steps";
  }
  return "static";
}

void Scenario::validate(const FeederModel& feeder) const {
  const auto n = static_cast<Eigen::Index>(n_steps);
  if (n_steps < 1) throw InvalidInput("scenario: needs at least one step");
  if (!(tau > 0.0)) throw InvalidInput("scenario: tau must be positive");
  if (load_p.rows() != n || load_q.rows() != n || p_av.rows() != n || v_min.size() != n || v_max.size() != n) {
    throw InvalidInput("scenario: series lengths differ");
  }
  if (load_p.cols() != feeder.n_nodes || load_q.cols() != feeder.n_nodes) {
    throw InvalidInput("scenario: load columns do not match the feeder");
  }
  if (p_av.cols() != feeder.n_der()) throw InvalidInput("scenario: P_av columns do not match the DER set");
  if ((p_av.array() < 0.0).any()) throw InvalidInput("scenario: negative available power");
  if (!load_p.allFinite() || !load_q.allFinite() || !p_av.allFinite()) {
    throw InvalidInput("scenario: non-finite entries");
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(v_min[k] < v_max[k])) throw InvalidInput("scenario: v_min must be below v_max at every step");
  }
  if (!(noise_amplitude >= 0.0)) throw InvalidInput("scenario: noise amplitude must be nonnegative");
}

namespace {

// Uniform double in [0, 1) from the raw 64-bit engine output; unlike
// std::uniform_real_distribution this is identical across standard libraries.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct Cloud {
  double center;
  double half_width;
  double depth;
};

double irradiance_factor(double t, const std::vector<Cloud>& clouds) {
  double f = 1.0;
  for (const auto& c : clouds) {
    const double d = std::abs(t - c.center);
    if (d < c.half_width) f *= 1.0 - c.depth * 0.5 * (1.0 + std::cos(std::numbers::pi * d / c.half_width));
  }
  return f;
}

}  // namespace

Scenario generate_scenario(const FeederModel& feeder, const ScenarioParams& p, std::uint64_t seed) {
  if (!(p.tau > 0.0) || !(p.duration_s > 0.0)) throw InvalidInput("scenario: tau and duration must be positive");
  std::mt19937_64 rng(seed);
  const int n_nodes = feeder.n_nodes;
  const int n_der = feeder.n_der();
  const int steps = std::max(1, static_cast<int>(std::floor(p.duration_s / p.tau + 1e-9)));

  std::vector<Cloud> clouds;
  if (p.kind == ScenarioKind::cloud_transient) {
    for (int c = 0; c < p.n_clouds; ++c) {
      const double center = unit_uniform(rng) * p.duration_s;
      const double half = 0.5 * p.cloud_width_s * (0.5 + unit_uniform(rng));
      const double depth = p.cloud_depth * (0.3 + 0.7 * unit_uniform(rng));
      clouds.push_back({center, half, depth});
    }
  }
  std::vector<double> phase(n_nodes);
  for (auto& ph : phase) ph = 2.0 * std::numbers::pi * unit_uniform(rng);

  const Vector nominal_p = feeder.nominal_load_p();
  const Vector nominal_q = feeder.nominal_load_q();

  Scenario s;
  s.tau = p.tau;
  s.n_steps = steps;
  s.noise_amplitude = p.noise_amplitude;
  s.load_p.resize(steps, n_nodes);
  s.load_q.resize(steps, n_nodes);
  s.p_av.resize(steps, n_der);
  s.v_min = Vector::Constant(steps, p.v_min);
  s.v_max = Vector::Constant(steps, p.v_max);

  for (int k = 0; k < steps; ++k) {
    const double t = k * p.tau;
    const double frac = t / p.duration_s;

    double level = p.pv_level;
    switch (p.kind) {
      case ScenarioKind::constant: break;
      case ScenarioKind::ramp: level = std::clamp(p.pv_start + p.ramp_rate * t, 0.0, 1.0); break;
      case ScenarioKind::cloud_transient:
      case ScenarioKind::vmax_steps: {
        const double x = (frac - 0.5) / p.day_width;
        level = p.pv_level * std::exp(-x * x) * irradiance_factor(t, clouds);
        break;
      }
    }
    for (int i = 0; i < n_der; ++i) s.p_av(k, i) = std::max(0.0, level * feeder.ders[i].s_rating);

    for (int j = 0; j < n_nodes; ++j) {
      double scale = p.load_level;
      if (p.kind != ScenarioKind::constant && p.load_ripple != 0.0) {
        scale *= 1.0 + p.load_ripple * std::sin(2.0 * std::numbers::pi * t / p.load_period_s + phase[j]);
      }
      s.load_p(k, j) = scale * nominal_p[j];
      s.load_q(k, j) = scale * nominal_q[j];
    }

    if (p.kind == ScenarioKind::vmax_steps) {
      // 6:00-18:00 day: first limit until 13:00, second until 14:00, then the third
      s.v_max[k] = frac < 7.0 / 12.0 ? p.vmax_plateaus[0] : (frac < 8.0 / 12.0 ? p.vmax_plateaus[1] : p.vmax_plateaus[2]);
    }
  }
  s.validate(feeder);
  return s;
}

namespace {

std::string fmt_exact(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

std::string serialize_scenario(const FeederModel& feeder, const Scenario& s) {
  std::ostringstream os;
  os << "time_s";
  for (int j = 1; j <= feeder.n_nodes; ++j) os << ",pl_" << j;
  for (int j = 1; j <= feeder.n_nodes; ++j) os << ",ql_" << j;
  for (const auto& d : feeder.ders) os << ",pav_" << d.node.index;
  os << ",v_min,v_max\n";
  for (int k = 0; k < s.n_steps; ++k) {
    os << fmt_exact(k * s.tau);
    for (int j = 0; j < feeder.n_nodes; ++j) os << ',' << fmt_exact(s.load_p(k, j));
    for (int j = 0; j < feeder.n_nodes; ++j) os << ',' << fmt_exact(s.load_q(k, j));
    for (int i = 0; i < feeder.n_der(); ++i) os << ',' << fmt_exact(s.p_av(k, i));
    os << ',' << fmt_exact(s.v_min[k]) << ',' << fmt_exact(s.v_max[k]) << '\n';
  }
  return os.str();
}

void write_scenario(const FeederModel& feeder, const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write scenario file " + path.string());
  out << serialize_scenario(feeder, s);
}

Scenario parse_scenario(const FeederModel& feeder, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("scenario: empty file");
  const auto header = split_csv(line);

  std::map<std::string, int> column;
  for (int c = 0; c < static_cast<int>(header.size()); ++c) {
    if (!column.emplace(header[c], c).second) throw InvalidInput("scenario: duplicate column " + header[c]);
  }
  std::vector<std::string> expected{"time_s", "v_min", "v_max"};
  for (int j = 1; j <= feeder.n_nodes; ++j) {
    expected.push_back("pl_" + std::to_string(j));
    expected.push_back("ql_" + std::to_string(j));
  }
  for (const auto& d : feeder.ders) expected.push_back("pav_" + std::to_string(d.node.index));
  for (const auto& name : expected) {
    if (!column.count(name)) throw InvalidInput("scenario: missing column " + name);
  }
  if (column.size() != expected.size()) {
    for (const auto& [name, _] : column) {
      if (std::find(expected.begin(), expected.end(), name) == expected.end()) {
        throw InvalidInput("scenario: unknown column " + name);
      }
    }
  }

  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw InvalidInput("scenario: line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                         " cells, expected " + std::to_string(header.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      try {
        std::size_t used = 0;
        row[c] = std::stod(cells[c], &used);
        if (used != cells[c].size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw InvalidInput("scenario: line " + std::to_string(line_no) + ": bad number \"" + cells[c] + "\"");
      }
    }
    rows.push_back(std::move(row));
  }

  Scenario s;
  s.n_steps = static_cast<int>(rows.size());
  if (s.n_steps < 1) throw InvalidInput("scenario: no data rows");
  s.tau = s.n_steps > 1 ? rows[1][column["time_s"]] - rows[0][column["time_s"]] : 1.0;
  for (int k = 1; k < s.n_steps; ++k) {
    const double dt = rows[k][column["time_s"]] - rows[k - 1][column["time_s"]];
    if (std::abs(dt - s.tau) > 1e-6 * std::max(1.0, s.tau)) throw InvalidInput("scenario: time_s is not evenly spaced");
  }
  s.load_p.resize(s.n_steps, feeder.n_nodes);
  s.load_q.resize(s.n_steps, feeder.n_nodes);
  s.p_av.resize(s.n_steps, feeder.n_der());
  s.v_min.resize(s.n_steps);
  s.v_max.resize(s.n_steps);
  for (int k = 0; k < s.n_steps; ++k) {
    for (int j = 1; j <= feeder.n_nodes; ++j) {
      s.load_p(k, j - 1) = rows[k][column["pl_" + std::to_string(j)]];
      s.load_q(k, j - 1) = rows[k][column["ql_" + std::to_string(j)]];
    }
    for (int i = 0; i < feeder.n_der(); ++i) {
      s.p_av(k, i) = rows[k][column["pav_" + std::to_string(feeder.ders[i].node.index)]];
    }
    s.v_min[k] = rows[k][column["v_min"]];
    s.v_max[k] = rows[k][column["v_max"]];
  }
  s.validate(feeder);
  return s;
}

Scenario read_scenario(const FeederModel& feeder, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read scenario file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(feeder, ss.str());
}

}  // namespace opfp
