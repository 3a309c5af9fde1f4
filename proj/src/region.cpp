#include "opfp/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "opfp/error.hpp"

namespace opfp {

RegionKind parse_region_kind(std::string_view name) {
  if (name == "real_only") return RegionKind::real_only;
  if (name == "reactive_only") return RegionKind::reactive_only;
  if (name == "joint") return RegionKind::joint;
  throw InvalidInput("unknown region kind \"" + std::string(name) + "\"");
}

std::string_view to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::real_only: return "real_only";
    case RegionKind::reactive_only: return "reactive_only";
    case RegionKind::joint: return "joint";
  }
  return "joint";
}

OperatingRegion OperatingRegion::make(RegionKind kind, double s_rating, double p_available) {
  OperatingRegion r;
  r.kind = kind;
  r.s_rating = s_rating;
  r.p_available = std::max(0.0, p_available);
  // real_only has no rating constraint
  if (kind != RegionKind::real_only && r.p_available > s_rating) {
    r.p_available = s_rating;
    r.clipped = true;
  }
  return r;
}

double OperatingRegion::q_headroom() const {
  return std::sqrt(std::max(0.0, s_rating * s_rating - p_available * p_available));
}

bool OperatingRegion::contains(Setpoint u, double slack) const {
  switch (kind) {
    case RegionKind::real_only:
      return u.p >= -slack && u.p <= p_available + slack && std::abs(u.q) <= slack;
    case RegionKind::reactive_only:
      return std::abs(u.p - p_available) <= slack && std::abs(u.q) <= q_headroom() + slack;
    case RegionKind::joint: {
      const bool box = u.p >= -slack && u.p <= p_available + slack;
      const bool disk = std::hypot(u.p, u.q) <= s_rating + slack;
      const bool cone = pf_tan <= 0.0 || std::abs(u.q) <= pf_tan * u.p + slack;
      return box && disk && cone;
    }
  }
  return false;
}

namespace {

double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

Setpoint project_joint(Setpoint u, double s, double p_av) {
  const double q_av = std::sqrt(std::max(0.0, s * s - p_av * p_av));
  const double norm = std::hypot(u.p, u.q);
  // interior; the few-ulp allowance keeps arc points fixed under reprojection
  if (u.p >= 0.0 && u.p <= p_av && norm <= s * (1.0 + 4.0 * std::numeric_limits<double>::epsilon())) return u;
  // D and E: left of the Q axis
  if (u.p < 0.0) return {0.0, std::clamp(u.q, -s, s)};
  const double abs_q = std::abs(u.q);
  // C: right of P_av inside the corner band
  if (abs_q <= q_av) return {p_av, u.q};
  // B: normal cone of the corner (P_av, +-q_av)
  if (u.p * q_av >= abs_q * p_av) return {p_av, sign_of(u.q) * q_av};
  // A: radial scaling onto the arc
  return {u.p * s / norm, u.q * s / norm};
}

// Projection onto {|Q| <= t P}.
Setpoint project_cone(Setpoint u, double t) {
  const double abs_q = std::abs(u.q);
  if (abs_q <= t * u.p) return u;
  if (u.p + t * abs_q <= 0.0) return {0.0, 0.0};
  const double scale = (u.p + t * abs_q) / (1.0 + t * t);
  return {scale, sign_of(u.q) * t * scale};
}

}  // namespace

Setpoint project_region(Setpoint u, const OperatingRegion& region) {
  switch (region.kind) {
    case RegionKind::real_only:
      return {std::max(0.0, std::min(u.p, region.p_available)), 0.0};
    case RegionKind::reactive_only: {
      const double q_av = region.q_headroom();
      return {region.p_available, sign_of(u.q) * std::min(std::abs(u.q), q_av)};
    }
    case RegionKind::joint:
      if (region.pf_tan > 0.0) return project_region_with_pf(u, region).point;
      return project_joint(u, region.s_rating, region.p_available);
  }
  return u;
}

ConeProjection project_region_with_pf(Setpoint u, const OperatingRegion& region, double tol, int max_iter) {
  ConeProjection out;
  if (region.pf_tan <= 0.0) {
    out.point = project_joint(u, region.s_rating, region.p_available);
    out.approximate = false;
    return out;
  }
  // Dykstra: x_k = P_A(y + p), y = P_B(x_k + q), with correction terms p, q.
  Setpoint y = u;
  Setpoint p{}, q{};
  for (int it = 1; it <= max_iter; ++it) {
    const Setpoint x = project_joint({y.p + p.p, y.q + p.q}, region.s_rating, region.p_available);
    p = {y.p + p.p - x.p, y.q + p.q - x.q};
    const Setpoint y_next = project_cone({x.p + q.p, x.q + q.q}, region.pf_tan);
    q = {x.p + q.p - y_next.p, x.q + q.q - y_next.q};
    const double change = std::hypot(y_next.p - y.p, y_next.q - y.q) + std::hypot(x.p - y_next.p, x.q - y_next.q);
    y = y_next;
    out.iterations = it;
    if (change <= tol) break;
  }
  // the cone iterate can sit marginally outside the joint set; land inside it
  out.point = project_joint(y, region.s_rating, region.p_available);
  return out;
}

Setpoint project_feasible(Setpoint u, const OperatingRegion& region) {
  if (region.kind == RegionKind::joint && region.pf_tan > 0.0) return project_region_with_pf(u, region).point;
  return project_region(u, region);
}

}  // namespace opfp
