#include <doctest.h>

#include <random>

#include "opfp/error.hpp"
#include "opfp/powerflow.hpp"
#include "opfp/testbeds.hpp"
#include "oracles.hpp"

using namespace opfp;

namespace {

PowerInjection random_injection(int n, double amp, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-amp, amp);
  PowerInjection inj = PowerInjection::zero(n);
  for (int j = 0; j < n; ++j) {
    inj.p[j] = u(rng);
    inj.q[j] = u(rng);
  }
  return inj;
}

}  // namespace

TEST_CASE("no-load voltage") {
  SUBCASE("two-bus without shunt equals the slack") {
    const auto adm = build_admittance(testbeds::two_bus());
    const CVector v = no_load_voltage(adm, {1.0, 0.0});
    CHECK(std::abs(v[0] - Complex(1.0, 0.0)) < 1e-14);
  }
  SUBCASE("chain without shunts is flat") {
    const Complex v0 = std::polar(1.03, 0.1);
    const CVector v = no_load_voltage(build_admittance(testbeds::three_bus_chain()), v0);
    for (Eigen::Index i = 0; i < v.size(); ++i) CHECK(std::abs(v[i] - v0) < 1e-13);
  }
  SUBCASE("a shunt moves it, matching a direct solve") {
    // 0.1j total charging, half lands on node 1
    auto f = testbeds::two_bus({0.01, 0.01}, 0.2);
    const auto adm = build_admittance(f);
    const CVector v = no_load_voltage(adm, {1.0, 0.0});
    const Complex y11 = 1.0 / Complex(0.01, 0.01) + Complex(0.0, 0.1);
    const Complex expect = (1.0 / Complex(0.01, 0.01)) / y11;
    CHECK(std::abs(v[0] - Complex(1.0, 0.0)) > 1e-4);
    CHECK(std::abs(v[0] - expect) < 1e-13);
  }
}

TEST_CASE("two-bus linear model by hand") {
  const auto lm = build_linear_model(build_admittance(testbeds::two_bus()), {1.0, 0.0});
  CHECK(lm.ZR(0, 0) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(lm.ZI(0, 0) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(lm.a[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(lm.xi_bar[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(lm.theta_bar[0]) < 1e-14);
  CHECK(lm.R(0, 0) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(lm.B(0, 0) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("real no-load profile gives R = ZR and B = ZI") {
  const auto lm = build_linear_model(build_admittance(testbeds::random_radial(8, 5)), {1.0, 0.0});
  CHECK((lm.R - lm.ZR).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((lm.B - lm.ZI).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("linear model matches the explicit-inverse oracle") {
  SUBCASE("three-bus chain") {
    const auto f = testbeds::three_bus_chain();
    const auto lm = build_linear_model(build_admittance(f), f.slack_voltage);
    const auto ref = oracle::dense_linear_model(f);
    CHECK((lm.R - ref.R).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((lm.B - ref.B).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((lm.R - lm.R.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((lm.R.array() > 0.0).all());
  }
  SUBCASE("shunts and a rotated slack") {
    auto f = testbeds::random_radial(10, 9);
    for (auto& l : f.lines) l.shunt_admittance = {0.0, 0.05};
    f.slack_voltage = std::polar(1.01, 0.2);
    const auto lm = build_linear_model(build_admittance(f), f.slack_voltage);
    const auto ref = oracle::dense_linear_model(f);
    CHECK((lm.vbar - ref.vbar).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((lm.a - ref.a).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((lm.R - ref.R).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((lm.B - ref.B).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("complex-voltage form is built from R and B") {
  const auto lm = build_linear_model(build_admittance(testbeds::three_bus_chain()), {1.0, 0.0});
  const CMatrix H = lm.H();
  const CMatrix J = lm.J();
  CHECK((H.real() - lm.R).cwiseAbs().maxCoeff() == 0.0);
  CHECK((H.imag() - lm.B).cwiseAbs().maxCoeff() == 0.0);
  CHECK((J.real() - lm.B).cwiseAbs().maxCoeff() == 0.0);
  CHECK((J.imag() + lm.R).cwiseAbs().maxCoeff() == 0.0);
  CHECK((lm.b() - lm.vbar).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("predicted magnitudes") {
  const auto lm = build_linear_model(build_admittance(testbeds::two_bus()), {1.0, 0.0});
  PowerInjection inj = PowerInjection::zero(1);
  CHECK(predict_voltage_magnitude(lm, inj)[0] == doctest::Approx(1.0).epsilon(1e-15));
  inj.p[0] = -0.1;
  inj.q[0] = -0.05;
  CHECK(predict_voltage_magnitude(lm, inj)[0] == doctest::Approx(0.9985).epsilon(1e-12));
  inj.p[0] = 0.2;
  inj.q[0] = 0.0;
  CHECK(predict_voltage_magnitude(lm, inj)[0] == doctest::Approx(1.002).epsilon(1e-12));
}

TEST_CASE("prediction is affine in the injection") {
  const auto f = testbeds::random_radial(12, 2);
  const auto lm = build_linear_model(build_admittance(f), f.slack_voltage);
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const auto x = random_injection(12, 0.1, rng);
    const auto y = random_injection(12, 0.1, rng);
    const double lam = std::uniform_real_distribution<double>(-1.0, 2.0)(rng);
    const PowerInjection mix{lam * x.p + (1.0 - lam) * y.p, lam * x.q + (1.0 - lam) * y.q};
    const Vector lhs = predict_voltage_magnitude(lm, mix);
    const Vector rhs = lam * predict_voltage_magnitude(lm, x) + (1.0 - lam) * predict_voltage_magnitude(lm, y);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("solve_ac at zero injection returns the no-load profile") {
  const auto f = testbeds::three_bus_chain();
  const auto adm = build_admittance(f);
  const auto sol = solve_ac(adm, PowerInjection::zero(3), f.slack_voltage, VoltageProfile::flat(3, f.slack_voltage));
  CHECK(sol.iterations == 1);
  CHECK(sol.residual == doctest::Approx(0.0));
  CHECK((sol.voltages.v - no_load_voltage(adm, f.slack_voltage)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("two-bus load flow agrees with the scalar fixed point") {
  const Complex z(0.01, 0.01);
  const auto adm = build_admittance(testbeds::two_bus(z));
  PowerInjection inj = PowerInjection::zero(1);
  inj.p[0] = -0.1;
  inj.q[0] = -0.05;
  PowerFlowOptions opts;
  opts.tol = 1e-10;
  const auto sol = solve_ac(adm, inj, {1.0, 0.0}, VoltageProfile::flat(1, {1.0, 0.0}), opts);
  const Complex ref = oracle::two_bus_fixed_point(z, {-0.1, -0.05}, {1.0, 0.0}, 100);
  CHECK(std::abs(sol.voltages.v[0] - ref) < 1e-10);
  CHECK(sol.voltages.rho[0] == doctest::Approx(0.99850).epsilon(2e-5));
  CHECK(std::abs(sol.voltages.rho[0] - 0.9985) <= 2e-4);
  CHECK(sol.residual <= 1e-10);
}

TEST_CASE("absurd loading collapses") {
  const auto adm = build_admittance(testbeds::two_bus());
  PowerInjection inj = PowerInjection::zero(1);
  inj.p[0] = -60.0;
  CHECK_THROWS_AS(solve_ac(adm, inj, {1.0, 0.0}, VoltageProfile::flat(1, {1.0, 0.0})), PlantFailure);
}

TEST_CASE("iteration budget exhaustion is a plant failure carrying the residual") {
  const auto f = testbeds::random_radial(10, 4);
  const auto adm = build_admittance(f);
  std::mt19937_64 rng(1);
  PowerFlowOptions opts;
  opts.max_iter = 1;
  opts.tol = 1e-14;
  try {
    solve_ac(adm, random_injection(10, 0.1, rng), f.slack_voltage, VoltageProfile::flat(10, f.slack_voltage), opts);
    FAIL("expected PlantFailure");
  } catch (const PlantFailure& e) {
    CHECK(e.residual() > 1e-14);
  }
}

TEST_CASE("solve_ac solutions reproduce the injections") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 10; ++t) {
    auto f = testbeds::random_radial(15, 300 + t);
    for (auto& l : f.lines) l.shunt_admittance = {0.0, 0.01};
    const auto adm = build_admittance(f);
    const AcPowerFlow plant(adm, f.slack_voltage);
    const auto inj = random_injection(15, 0.1, rng);
    const auto sol = plant.solve(inj, VoltageProfile::flat(15, f.slack_voltage));
    CHECK(sol.residual <= 1e-9);
    // independent evaluation of s = diag(v) conj(Y_full [V0; v])
    const CMatrix full = oracle::stamp_admittance(f);
    CVector all(16);
    all[0] = f.slack_voltage;
    all.tail(15) = sol.voltages.v;
    const CVector s = all.cwiseProduct((full * all).conjugate()).tail(15);
    CHECK((s - inj.complex()).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((sol.voltages.rho - sol.voltages.v.cwiseAbs()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("linearization is first-order exact at zero injection") {
  for (int t = 0; t < 5; ++t) {
    const auto f = testbeds::random_radial(8, 700 + t);
    const auto adm = build_admittance(f);
    const auto lm = build_linear_model(adm, f.slack_voltage);
    PowerFlowOptions opts;
    opts.tol = 1e-13;
    const double h = 1e-5;
    const auto flat = VoltageProfile::flat(8, f.slack_voltage);
    for (int j = 0; j < 8; ++j) {
      for (int which = 0; which < 2; ++which) {
        PowerInjection plus = PowerInjection::zero(8);
        PowerInjection minus = PowerInjection::zero(8);
        (which == 0 ? plus.p : plus.q)[j] = h;
        (which == 0 ? minus.p : minus.q)[j] = -h;
        const Vector d = (solve_ac(adm, plus, f.slack_voltage, flat, opts).voltages.rho -
                          solve_ac(adm, minus, f.slack_voltage, flat, opts).voltages.rho) /
                         (2.0 * h);
        const Vector col = which == 0 ? Vector(lm.R.col(j)) : Vector(lm.B.col(j));
        CHECK((d - col).cwiseAbs().maxCoeff() <= 1e-3 * col.cwiseAbs().maxCoeff());
      }
    }
  }
}

TEST_CASE("linearization error stays small on random radial feeders") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    const int n = 2 + static_cast<int>(rng() % 19);
    const auto f = testbeds::random_radial(n, 900 + t);
    const auto adm = build_admittance(f);
    const auto lm = build_linear_model(adm, f.slack_voltage);
    for (const auto& [amp, tol] : {std::pair{0.1, 1e-2}, std::pair{0.02, 1e-3}}) {
      const auto inj = random_injection(n, amp, rng);
      const auto sol = solve_ac(adm, inj, f.slack_voltage, VoltageProfile::flat(n, f.slack_voltage));
      CHECK((predict_voltage_magnitude(lm, inj) - sol.voltages.rho).cwiseAbs().maxCoeff() <= tol);
    }
  }
}

TEST_CASE("constraint offsets") {
  SUBCASE("no non-DER loads gives the no-load magnitudes") {
    const auto f = testbeds::three_bus_chain();
    const auto lm = build_linear_model(build_admittance(f), f.slack_voltage);
    const std::vector<int> ders{3};
    const std::vector<int> mon{1, 2, 3};
    const Vector c = constraint_offsets(lm, Vector::Zero(3), Vector::Zero(3), ders, mon);
    for (int n = 0; n < 3; ++n) CHECK(c[n] == lm.a[n]);
  }
  SUBCASE("two-bus DER node has no non-DER sum") {
    const auto lm = build_linear_model(build_admittance(testbeds::two_bus()), {1.0, 0.0});
    const std::vector<int> ders{1};
    const std::vector<int> mon{1};
    const Vector c = constraint_offsets(lm, Vector::Constant(1, 0.3), Vector::Constant(1, 0.1), ders, mon);
    CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("one loaded non-DER node") {
    const auto f = testbeds::three_bus_chain();
    const auto lm = build_linear_model(build_admittance(f), f.slack_voltage);
    const auto ref = oracle::dense_linear_model(f);
    const std::vector<int> ders{3};
    const std::vector<int> mon{1, 2, 3};
    Vector lp = Vector::Zero(3);
    lp[1] = 0.1;
    const Vector c = constraint_offsets(lm, lp, Vector::Zero(3), ders, mon);
    for (int n = 0; n < 3; ++n) CHECK(c[n] == doctest::Approx(ref.a[n] - 0.1 * ref.R(n, 1)).epsilon(1e-13));
  }
}
