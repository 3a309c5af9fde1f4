#pragma once

#include <span>
#include <vector>

#include "opfp/feeder.hpp"

namespace opfp {

// Net injections at nodes 1..N (index i -> node i+1). Injection positive,
// load negative.
struct PowerInjection {
  Vector p;
  Vector q;

  static PowerInjection zero(int n) { return {Vector::Zero(n), Vector::Zero(n)}; }
  CVector complex() const;
};

struct VoltageProfile {
  CVector v;
  Vector rho;

  static VoltageProfile from_complex(CVector v);
  static VoltageProfile flat(int n, Complex v0);
};

struct PFSolution {
  VoltageProfile voltages;
  int iterations = 0;
  double residual = 0.0;  // inf-norm of the complex power mismatch, pu
};

// Linearization around the no-load profile vbar = -Y^{-1} ybar V0:
//   |v| ~ R p + B q + a
struct LinearModel {
  Matrix R;
  Matrix B;
  Vector a;          // no-load magnitudes
  CVector vbar;      // no-load voltages
  Matrix ZR;         // Re{Y^{-1}}
  Matrix ZI;         // Im{Y^{-1}}
  Vector xi_bar;     // cos of no-load angles
  Vector theta_bar;  // sin of no-load angles

  int size() const { return static_cast<int>(a.size()); }
  // Complex-voltage form v ~ H p + J q + b.
  CMatrix H() const;
  CMatrix J() const;
  const CVector& b() const { return vbar; }
};

CVector no_load_voltage(const AdmittanceMatrix& adm, Complex v0);
LinearModel build_linear_model(const AdmittanceMatrix& adm, Complex v0);
Vector predict_voltage_magnitude(const LinearModel& lm, const PowerInjection& inj);

struct PowerFlowOptions {
  double tol = 1e-9;
  int max_iter = 1000;
  double collapse_low = 0.3;
  double collapse_high = 3.0;
};

// Z-bus fixed point v <- Y^{-1}(conj(s ./ v) - ybar V0). Throws PlantFailure
// on collapse (a magnitude leaves [collapse_low, collapse_high]) or when
// max_iter is exhausted.
PFSolution solve_ac(const AdmittanceMatrix& adm, const PowerInjection& inj, Complex v0,
                    const VoltageProfile& init, const PowerFlowOptions& opts = {});

// Reusable plant solver: factorizes Y once.
class AcPowerFlow {
 public:
  AcPowerFlow(const AdmittanceMatrix& adm, Complex v0);

  PFSolution solve(const PowerInjection& inj, const VoltageProfile& init,
                   const PowerFlowOptions& opts = {}) const;
  // s = diag(v) conj(Y v + ybar V0)
  CVector injected_power(const CVector& v) const;
  int size() const { return static_cast<int>(Y_.rows()); }

 private:
  CMatrix Y_;
  CVector ybar_v0_;
  Eigen::PartialPivLU<CMatrix> lu_;
};

// c_n = a_n - sum_{i not in G} (r_{n,i} P_l,i + b_{n,i} Q_l,i) for n in M.
// load_p/load_q are length-N demand vectors; entries at DER nodes are ignored.
Vector constraint_offsets(const LinearModel& lm, const Vector& load_p, const Vector& load_q,
                          std::span<const int> der_nodes, std::span<const int> monitored_nodes);

}  // namespace opfp
