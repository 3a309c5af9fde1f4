#include "opfp/powerflow.hpp"

#include <cmath>
#include <sstream>
#include <unordered_set>

#include "opfp/error.hpp"

namespace opfp {

CVector PowerInjection::complex() const {
  CVector s(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) s[i] = Complex(p[i], q[i]);
  return s;
}

VoltageProfile VoltageProfile::from_complex(CVector v) {
  VoltageProfile out;
  out.rho = v.cwiseAbs();
  out.v = std::move(v);
  return out;
}

VoltageProfile VoltageProfile::flat(int n, Complex v0) {
  return from_complex(CVector::Constant(n, v0));
}

CMatrix LinearModel::H() const {
  return R.cast<Complex>() + Complex(0.0, 1.0) * B.cast<Complex>();
}

CMatrix LinearModel::J() const {
  return B.cast<Complex>() - Complex(0.0, 1.0) * R.cast<Complex>();
}

namespace {

Eigen::PartialPivLU<CMatrix> factorize(const AdmittanceMatrix& adm) {
  Eigen::PartialPivLU<CMatrix> lu(adm.Y);
  if (!(lu.rcond() > kMinReciprocalCondition)) throw DegenerateNetwork("degenerate network: Y is singular");
  return lu;
}

}  // namespace

CVector no_load_voltage(const AdmittanceMatrix& adm, Complex v0) {
  return -factorize(adm).solve(adm.ybar * v0);
}

LinearModel build_linear_model(const AdmittanceMatrix& adm, Complex v0) {
  const auto lu = factorize(adm);
  const int n = adm.size();
  const CMatrix Z = lu.inverse();

  LinearModel lm;
  lm.vbar = -lu.solve(adm.ybar * v0);
  lm.ZR = Z.real();
  lm.ZI = Z.imag();
  lm.a = lm.vbar.cwiseAbs();
  lm.xi_bar.resize(n);
  lm.theta_bar.resize(n);
  for (int i = 0; i < n; ++i) {
    const double th = std::arg(lm.vbar[i]);
    lm.xi_bar[i] = std::cos(th);
    lm.theta_bar[i] = std::sin(th);
  }
  const Vector cos_over_rho = lm.xi_bar.cwiseQuotient(lm.a);
  const Vector sin_over_rho = lm.theta_bar.cwiseQuotient(lm.a);
  lm.R = lm.ZR * cos_over_rho.asDiagonal();
  lm.R -= lm.ZI * sin_over_rho.asDiagonal();
  lm.B = lm.ZI * cos_over_rho.asDiagonal();
  lm.B += lm.ZR * sin_over_rho.asDiagonal();
  return lm;
}

Vector predict_voltage_magnitude(const LinearModel& lm, const PowerInjection& inj) {
  return lm.R * inj.p + lm.B * inj.q + lm.a;
}

AcPowerFlow::AcPowerFlow(const AdmittanceMatrix& adm, Complex v0)
    : Y_(adm.Y), ybar_v0_(adm.ybar * v0), lu_(factorize(adm)) {}

CVector AcPowerFlow::injected_power(const CVector& v) const {
  const CVector current = Y_ * v + ybar_v0_;
  return v.cwiseProduct(current.conjugate());
}

PFSolution AcPowerFlow::solve(const PowerInjection& inj, const VoltageProfile& init,
                              const PowerFlowOptions& opts) const {
  const int n = size();
  if (inj.p.size() != n || inj.q.size() != n || init.v.size() != n) {
    throw InvalidInput("solve_ac: dimension mismatch");
  }
  for (int i = 0; i < n; ++i) {
    if (!(std::abs(init.v[i]) >= opts.collapse_low)) {
      throw InvalidInput("solve_ac: initial voltage magnitude below the collapse guard");
    }
  }
  const CVector s = inj.complex();
  CVector v = init.v;
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= opts.max_iter; ++it) {
    const CVector rhs = s.cwiseQuotient(v).conjugate() - ybar_v0_;
    v = lu_.solve(rhs);
    for (int i = 0; i < n; ++i) {
      const double mag = std::abs(v[i]);
      if (!(mag >= opts.collapse_low && mag <= opts.collapse_high)) {
        std::ostringstream os;
        os << "collapse: |V| at node " << (i + 1) << " reached " << mag << " after " << it << " iterations";
        throw PlantFailure(os.str(), residual);
      }
    }
    residual = (injected_power(v) - s).cwiseAbs().maxCoeff();
    if (residual <= opts.tol) {
      PFSolution sol;
      sol.voltages = VoltageProfile::from_complex(v);
      sol.iterations = it;
      sol.residual = residual;
      return sol;
    }
  }
  std::ostringstream os;
  os << "power flow did not converge in " << opts.max_iter << " iterations (residual " << residual << ")";
  throw PlantFailure(os.str(), residual);
}

PFSolution solve_ac(const AdmittanceMatrix& adm, const PowerInjection& inj, Complex v0,
                    const VoltageProfile& init, const PowerFlowOptions& opts) {
  return AcPowerFlow(adm, v0).solve(inj, init, opts);
}

Vector constraint_offsets(const LinearModel& lm, const Vector& load_p, const Vector& load_q,
                          std::span<const int> der_nodes, std::span<const int> monitored_nodes) {
  const std::unordered_set<int> der(der_nodes.begin(), der_nodes.end());
  Vector c(static_cast<Eigen::Index>(monitored_nodes.size()));
  for (std::size_t m = 0; m < monitored_nodes.size(); ++m) {
    const int row = monitored_nodes[m] - 1;
    double acc = lm.a[row];
    for (int i = 0; i < lm.size(); ++i) {
      if (der.count(i + 1)) continue;
      acc -= lm.R(row, i) * load_p[i] + lm.B(row, i) * load_q[i];
    }
    c[static_cast<Eigen::Index>(m)] = acc;
  }
  return c;
}

}  // namespace opfp
