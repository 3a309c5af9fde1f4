#include "opfp/feeder.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "opfp/error.hpp"

namespace opfp {

std::vector<int> FeederModel::der_nodes() const {
  std::vector<int> out;
  out.reserve(ders.size());
  for (const auto& d : ders) out.push_back(d.node.index);
  return out;
}

std::vector<int> FeederModel::monitored_nodes() const {
  std::vector<int> out;
  out.reserve(monitored.size());
  for (const auto& m : monitored) out.push_back(m.index);
  return out;
}

Vector FeederModel::nominal_load_p() const {
  Vector p = Vector::Zero(n_nodes);
  for (const auto& l : loads) {
    if (l.node.index >= 1 && l.node.index <= n_nodes) p[l.node.index - 1] += l.p;
  }
  return p;
}

Vector FeederModel::nominal_load_q() const {
  Vector q = Vector::Zero(n_nodes);
  for (const auto& l : loads) {
    if (l.node.index >= 1 && l.node.index <= n_nodes) q[l.node.index - 1] += l.q;
  }
  return q;
}

namespace {

std::string line_name(const LineSegment& l) {
  std::ostringstream os;
  os << "(" << l.from.index << "," << l.to.index << ")";
  return os.str();
}

bool in_range(BusId b, int n, bool allow_slack) {
  return b.index >= (allow_slack ? 0 : 1) && b.index <= n;
}

// Union-find over 0..n.
int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

std::vector<Diagnostic> validate_feeder(const FeederModel& feeder) {
  std::vector<Diagnostic> out;
  const int n = feeder.n_nodes;
  if (n < 1) {
    out.push_back({"no nodes", "n_nodes must be at least 1"});
    return out;
  }
  if (feeder.lines.empty()) {
    out.push_back({"disconnected", "feeder has no lines"});
  }

  std::set<std::pair<int, int>> seen;
  bool endpoints_ok = true;
  for (const auto& l : feeder.lines) {
    if (!in_range(l.from, n, true) || !in_range(l.to, n, true)) {
      out.push_back({"bad node", "line " + line_name(l) + " references a node outside 0.." +
                                     std::to_string(n)});
      endpoints_ok = false;
      continue;
    }
    if (l.from == l.to) {
      out.push_back({"self loop", "line " + line_name(l) + " connects a node to itself"});
    }
    if (l.series_impedance == Complex(0.0, 0.0)) {
      out.push_back({"zero impedance", "line " + line_name(l) + " has zero series impedance"});
    }
    if (!std::isfinite(l.series_impedance.real()) || !std::isfinite(l.series_impedance.imag()) ||
        !std::isfinite(l.shunt_admittance.real()) || !std::isfinite(l.shunt_admittance.imag())) {
      out.push_back({"non-finite", "line " + line_name(l) + " has non-finite parameters"});
    }
    auto key = std::minmax(l.from.index, l.to.index);
    if (!seen.insert(key).second) {
      out.push_back({"duplicate line", "line " + line_name(l) + " appears more than once"});
    }
  }

  if (endpoints_ok && !feeder.lines.empty()) {
    std::vector<int> parent(n + 1);
    std::iota(parent.begin(), parent.end(), 0);
    for (const auto& l : feeder.lines) {
      parent[find_root(parent, l.from.index)] = find_root(parent, l.to.index);
    }
    const int root = find_root(parent, 0);
    for (int i = 1; i <= n; ++i) {
      if (find_root(parent, i) != root) {
        out.push_back({"disconnected", "node " + std::to_string(i) + " is not reachable from the slack"});
        break;
      }
    }
  }

  if (feeder.ders.empty()) out.push_back({"no DER nodes", "the DER set is empty"});
  if (feeder.monitored.empty()) out.push_back({"no monitored nodes", "the monitored set is empty"});

  std::set<int> der_seen;
  for (const auto& d : feeder.ders) {
    if (!in_range(d.node, n, false)) {
      out.push_back({"bad node", "DER at node " + std::to_string(d.node.index) + " is not in 1.." +
                                     std::to_string(n)});
    }
    if (!der_seen.insert(d.node.index).second) {
      out.push_back({"duplicate DER", "node " + std::to_string(d.node.index) + " listed twice as DER"});
    }
    if (!(d.s_rating > 0.0)) {
      out.push_back({"bad rating", "DER at node " + std::to_string(d.node.index) +
                                       " needs a positive apparent power rating"});
    }
  }
  std::set<int> mon_seen;
  for (const auto& m : feeder.monitored) {
    if (!in_range(m, n, false)) {
      out.push_back({"bad node", "monitored node " + std::to_string(m.index) + " is not in 1.." +
                                     std::to_string(n)});
    }
    if (!mon_seen.insert(m.index).second) {
      out.push_back({"duplicate monitored", "node " + std::to_string(m.index) + " listed twice as monitored"});
    }
  }
  for (const auto& l : feeder.loads) {
    if (!in_range(l.node, n, false)) {
      out.push_back({"bad node", "load at node " + std::to_string(l.node.index) + " is not in 1.." +
                                     std::to_string(n)});
    }
  }
  if (!(std::abs(feeder.slack_voltage) > 0.0)) {
    out.push_back({"bad slack", "slack voltage magnitude must be positive"});
  }
  return out;
}

AdmittanceMatrix build_admittance(const FeederModel& feeder) {
  const auto diags = validate_feeder(feeder);
  if (!diags.empty()) throw InvalidInput(diags.front().code + ": " + diags.front().message);

  const int n = feeder.n_nodes;
  CMatrix full = CMatrix::Zero(n + 1, n + 1);
  for (const auto& l : feeder.lines) {
    const int a = l.from.index;
    const int b = l.to.index;
    const Complex y = 1.0 / l.series_impedance;
    const Complex half_shunt = 0.5 * l.shunt_admittance;
    full(a, b) -= y;
    full(b, a) -= y;
    full(a, a) += y + half_shunt;
    full(b, b) += y + half_shunt;
  }

  AdmittanceMatrix adm;
  adm.full = full;
  adm.y00 = full(0, 0);
  adm.ybar = full.block(1, 0, n, 1);
  adm.Y = full.block(1, 1, n, n);
  adm.ordering.resize(n);
  std::iota(adm.ordering.begin(), adm.ordering.end(), 1);

  Eigen::PartialPivLU<CMatrix> lu(adm.Y);
  adm.rcond = lu.rcond();
  if (!(adm.rcond > kMinReciprocalCondition)) {
    std::ostringstream os;
    os << "degenerate network: reciprocal condition of Y is " << adm.rcond;
    throw DegenerateNetwork(os.str());
  }
  return adm;
}

}  // namespace opfp
