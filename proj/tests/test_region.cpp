#include <doctest.h>

#include <random>

#include "opfp/error.hpp"
#include "opfp/region.hpp"
#include "oracles.hpp"

using namespace opfp;

namespace {

void check_point(Setpoint got, double p, double q, double tol = 1e-12) {
  CHECK(std::abs(got.p - p) <= tol);
  CHECK(std::abs(got.q - q) <= tol);
}

}  // namespace

TEST_CASE("joint region projections") {
  const auto r = OperatingRegion::make(RegionKind::joint, 1.0, 0.8);
  check_point(project_region({0.5, 0.3}, r), 0.5, 0.3);
  check_point(project_region({2.0, 0.0}, r), 0.8, 0.0);
  check_point(project_region({1.0, 1.0}, r), std::sqrt(0.5), std::sqrt(0.5));
  check_point(project_region({0.0, 2.0}, r), 0.0, 1.0);
  check_point(project_region({-1.0, -0.3}, r), 0.0, -0.3);
  check_point(project_region({1.5, -0.9}, r), 0.8, -0.6);
}

TEST_CASE("single-control regions") {
  const auto real = OperatingRegion::make(RegionKind::real_only, 1.0, 0.5);
  check_point(project_region({0.9, 0.4}, real), 0.5, 0.0);
  check_point(project_region({-0.2, 0.4}, real), 0.0, 0.0);
  const auto reactive = OperatingRegion::make(RegionKind::reactive_only, 1.0, 0.6);
  check_point(project_region({0.2, -0.95}, reactive), 0.6, -0.8);
  check_point(project_region({0.9, 0.1}, reactive), 0.6, 0.1);
}

TEST_CASE("available power above the rating is clipped and flagged") {
  const auto r = OperatingRegion::make(RegionKind::joint, 1.0, 1.3);
  CHECK(r.clipped);
  CHECK(r.p_available == 1.0);
  CHECK(r.q_headroom() == 0.0);
  CHECK_FALSE(OperatingRegion::make(RegionKind::joint, 1.0, 0.9).clipped);
  CHECK(OperatingRegion::make(RegionKind::joint, 1.0, -0.1).p_available == 0.0);
}

TEST_CASE("projection is idempotent and lands inside") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_real_distribution<double> s(0.1, 2.0);
  for (auto kind : {RegionKind::real_only, RegionKind::reactive_only, RegionKind::joint}) {
    for (int t = 0; t < 2000; ++t) {
      const double rating = s(rng);
      const auto r = OperatingRegion::make(kind, rating, rating * std::uniform_real_distribution<double>(0, 1)(rng));
      const Setpoint once = project_region({u(rng), u(rng)}, r);
      const Setpoint twice = project_region(once, r);
      CHECK(once == twice);
      CHECK(r.contains(once, 1e-12));
    }
  }
}

TEST_CASE("closed-form projection matches brute-force searches") {
  constexpr double h = 1e-3;
  std::mt19937_64 rng(12);
  for (auto kind : {RegionKind::real_only, RegionKind::reactive_only, RegionKind::joint}) {
    for (int pair = 0; pair < 8; ++pair) {
      // P_av on the lattice so single-row regions have lattice points
      const double s = 0.2 + 0.8 * std::uniform_real_distribution<double>(0, 1)(rng);
      const long p_ticks = static_cast<long>(rng() % static_cast<std::uint64_t>(std::floor(s / h) + 1));
      const auto r = OperatingRegion::make(kind, s, p_ticks * h);
      std::uniform_real_distribution<double> up(-0.5 * s, 1.5 * s);
      std::uniform_real_distribution<double> uq(-1.5 * s, 1.5 * s);
      for (int t = 0; t < 40; ++t) {
        const double p = up(rng);
        const double q = uq(rng);
        const Setpoint got = project_region({p, q}, r);
        const auto edge = oracle::boundary_nearest(p, q, r, h);
        const auto lattice = oracle::lattice_nearest(p, q, r, h);
        REQUIRE(std::isfinite(lattice.dist));
        CHECK(std::hypot(got.p - edge.p, got.q - edge.q) <= 2e-3);
        CHECK(std::hypot(got.p - p, got.q - q) <= lattice.dist + 1e-12);
        CHECK(std::hypot(got.p - p, got.q - q) <= edge.dist + 1e-12);
      }
    }
  }
}

TEST_CASE("lattice search agrees with a full scan of the lattice") {
  constexpr double h = 1e-2;
  std::mt19937_64 rng(5);
  for (auto kind : {RegionKind::real_only, RegionKind::reactive_only, RegionKind::joint}) {
    const auto r = OperatingRegion::make(kind, 0.8, 0.5);
    for (int t = 0; t < 50; ++t) {
      const double p = std::uniform_real_distribution<double>(-0.5, 1.5)(rng);
      const double q = std::uniform_real_distribution<double>(-1.2, 1.2)(rng);
      double best = std::numeric_limits<double>::infinity();
      for (int i = -100; i <= 200; ++i) {
        for (int j = -200; j <= 200; ++j) {
          if (oracle::feasible(i * h, j * h, r, 1e-9)) best = std::min(best, std::hypot(i * h - p, j * h - q));
        }
      }
      CHECK(oracle::lattice_nearest(p, q, r, h).dist == doctest::Approx(best).epsilon(1e-12));
    }
  }
}

TEST_CASE("power-factor cone falls back to an approximate iterative projection") {
  auto r = OperatingRegion::make(RegionKind::joint, 1.0, 0.8);
  r.pf_tan = 0.5;
  const auto inside = project_region_with_pf({0.6, 0.2}, r);
  CHECK(inside.approximate);
  check_point(inside.point, 0.6, 0.2, 1e-12);

  // nearest point of {|Q| <= 0.5 P} to (0.3, 0.6) lies on the cone edge
  const auto edge = project_region_with_pf({0.3, 0.6}, r);
  const double t = (0.3 + 0.5 * 0.6) / 1.25;
  CHECK(std::abs(edge.point.p - t) < 1e-9);
  CHECK(std::abs(edge.point.q - 0.5 * t) < 1e-9);
  CHECK(r.contains(edge.point, 1e-9));

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 200; ++k) {
    const Setpoint x{u(rng), u(rng)};
    const auto got = project_region_with_pf(x, r);
    CHECK(r.contains(got.point, 1e-9));
    // no sampled feasible point is closer
    const double d = std::hypot(got.point.p - x.p, got.point.q - x.q);
    for (int j = 0; j < 50; ++j) {
      const Setpoint y = project_region_with_pf({u(rng), u(rng)}, r).point;
      CHECK(std::hypot(y.p - x.p, y.q - x.q) >= d - 1e-9);
    }
  }
}

TEST_CASE("region names parse") {
  CHECK(parse_region_kind("joint") == RegionKind::joint);
  CHECK(parse_region_kind("real_only") == RegionKind::real_only);
  CHECK(parse_region_kind("reactive_only") == RegionKind::reactive_only);
  CHECK(to_string(RegionKind::reactive_only) == "reactive_only");
  CHECK_THROWS_AS(parse_region_kind("both"), InvalidInput);
}
