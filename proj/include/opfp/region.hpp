#pragma once

#include <string_view>

namespace opfp {

enum class RegionKind { real_only, reactive_only, joint };

RegionKind parse_region_kind(std::string_view name);
std::string_view to_string(RegionKind kind);

struct Setpoint {
  double p = 0.0;
  double q = 0.0;

  friend bool operator==(const Setpoint&, const Setpoint&) = default;
};

// Inverter feasible set at one time step:
//   real_only:     0 <= P <= P_av, Q = 0
//   reactive_only: P = P_av, |Q| <= sqrt(S^2 - P_av^2)
//   joint:         0 <= P <= P_av, P^2 + Q^2 <= S^2
// An optional minimum power factor adds |Q| <= pf_tan * P (joint only); that
// intersection has no closed form and is projected iteratively.
struct OperatingRegion {
  RegionKind kind = RegionKind::joint;
  double s_rating = 0.0;
  double p_available = 0.0;
  double pf_tan = 0.0;   // 0 disables the power-factor cone
  bool clipped = false;  // p_available was reduced to s_rating

  // Clamps p_available into [0, s_rating] and records whether that happened.
  static OperatingRegion make(RegionKind kind, double s_rating, double p_available);

  // sqrt(S^2 - P_av^2): reactive headroom at full available output.
  double q_headroom() const;
  bool contains(Setpoint u, double slack = 0.0) const;
};

Setpoint project_region(Setpoint u, const OperatingRegion& region);

struct ConeProjection {
  Setpoint point;
  int iterations = 0;
  bool approximate = true;
};

// Dykstra alternating projections onto joint region and power-factor cone.
ConeProjection project_region_with_pf(Setpoint u, const OperatingRegion& region, double tol = 1e-13,
                                      int max_iter = 10000);

// project_region, or the cone fallback when a joint region carries pf_tan > 0.
Setpoint project_feasible(Setpoint u, const OperatingRegion& region);

}  // namespace opfp
