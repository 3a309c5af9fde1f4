#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace opfp {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Node index in {0..N}; 0 is always the slack bus (transformer secondary).
struct BusId {
  int index = 0;

  friend bool operator==(BusId, BusId) = default;
  friend auto operator<=>(BusId, BusId) = default;
};

// Pi-model line. shunt_admittance is the total line charging; half of it is
// attached at each end.
struct LineSegment {
  BusId from;
  BusId to;
  Complex series_impedance;
  Complex shunt_admittance{0.0, 0.0};
};

struct DerSpec {
  BusId node;
  double s_rating = 0.0;  // pu apparent power
};

// Nominal demand at a node; scenario generators scale it over time.
struct NodeLoad {
  BusId node;
  double p = 0.0;
  double q = 0.0;
};

struct FeederModel {
  int n_nodes = 0;  // N, excluding the slack
  std::vector<LineSegment> lines;
  Complex slack_voltage{1.0, 0.0};
  std::vector<DerSpec> ders;        // ordered set G
  std::vector<BusId> monitored;     // ordered set M
  std::vector<NodeLoad> loads;      // nominal loads, optional
  double base_power = 1.0e6;        // VA, I/O conversion only

  int n_der() const { return static_cast<int>(ders.size()); }
  int n_monitored() const { return static_cast<int>(monitored.size()); }
  std::vector<int> der_nodes() const;
  std::vector<int> monitored_nodes() const;
  // Length-N vectors of nominal loads, indexed by node-1.
  Vector nominal_load_p() const;
  Vector nominal_load_q() const;
};

struct Diagnostic {
  std::string code;     // short machine-readable tag, e.g. "duplicate line"
  std::string message;  // names the offending element
};

std::vector<Diagnostic> validate_feeder(const FeederModel& feeder);

// Partition of the full (N+1)x(N+1) bus admittance matrix:
//   [ y00   ybar^T ]
//   [ ybar  Y      ]
struct AdmittanceMatrix {
  Complex y00;
  CVector ybar;
  CMatrix Y;
  CMatrix full;
  std::vector<int> ordering;  // row i of Y corresponds to node ordering[i]
  double rcond = 0.0;         // reciprocal condition estimate of Y

  int size() const { return static_cast<int>(Y.rows()); }
};

inline constexpr double kMinReciprocalCondition = 1e-10;

// Throws InvalidInput when validate_feeder reports anything (the message
// carries the first diagnostic code, e.g. "disconnected"), DegenerateNetwork
// when Y fails the condition check.
AdmittanceMatrix build_admittance(const FeederModel& feeder);

}  // namespace opfp
