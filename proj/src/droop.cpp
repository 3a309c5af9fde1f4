#include "opfp/droop.hpp"

#include <algorithm>

#include "opfp/error.hpp"

namespace opfp {

void DroopCurve::validate() const {
  if (!(v_zero < v_sat)) throw InvalidInput("droop: v_zero must be below v_sat");
}

double droop_q(double v_meas, const OperatingRegion& region, const DroopCurve& curve) {
  const double q_max = region.q_headroom();
  const double width = curve.v_sat - curve.v_zero;
  if (v_meas >= curve.v_zero) {
    return -q_max * std::min(1.0, (v_meas - curve.v_zero) / width);
  }
  if (!curve.symmetric) return 0.0;
  return q_max * std::min(1.0, (curve.v_zero - v_meas) / width);
}

}  // namespace opfp
