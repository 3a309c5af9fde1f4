#pragma once

#include "opfp/region.hpp"

namespace opfp {

// Volt/VAr droop without deadband. Q is zero at v_zero and reaches the full
// absorbing headroom -sqrt(S^2 - P_av^2) at v_sat. With `symmetric`, the
// undervoltage side mirrors it (injecting) about v_zero.
struct DroopCurve {
  double v_zero = 1.0;
  double v_sat = 1.05;
  bool symmetric = true;

  void validate() const;
};

double droop_q(double v_meas, const OperatingRegion& region, const DroopCurve& curve);

// P is always the full available power in the baseline.
inline Setpoint droop_setpoint(double v_meas, const OperatingRegion& region, const DroopCurve& curve) {
  return {region.p_available, droop_q(v_meas, region, curve)};
}

}  // namespace opfp
