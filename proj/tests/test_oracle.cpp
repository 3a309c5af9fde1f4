#include <doctest.h>

#include <random>

#include "opfp/error.hpp"
#include "opfp/oracle.hpp"
#include "problems.hpp"

using namespace opfp;

TEST_CASE("unconstrained instance sits at full output with zero duals") {
  StaticProblem prob;
  prob.sens = {Matrix::Constant(1, 2, 0.01), Matrix::Constant(1, 2, 0.01)};
  prob.c = Vector::Constant(1, 1.0);
  prob.der_load_p = Vector::Zero(2);
  prob.der_load_q = Vector::Zero(2);
  prob.regions = {OperatingRegion::make(RegionKind::joint, 1.0, 0.6), OperatingRegion::make(RegionKind::joint, 1.0, 0.3)};
  prob.costs = {CostParams{}, CostParams{}};
  ControllerParams prm;
  const auto sp = solve_saddle_oracle(prob, prm);
  CHECK(sp.residual <= 1e-11);
  // nu pulls P slightly below P_av: P = 2 c_p P_av / (2 c_p + nu)
  for (int i = 0; i < 2; ++i) {
    const double pav = prob.regions[i].p_available;
    CHECK(sp.z.u[i].p == doctest::Approx(2.0 * 3.0 * pav / (6.0 + prm.nu)).epsilon(1e-10));
    CHECK(std::abs(sp.z.u[i].q) <= 1e-12);
  }
  CHECK(sp.z.duals.gamma.cwiseAbs().maxCoeff() == 0.0);
  CHECK(sp.z.duals.mu.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("constrained two-bus instance meets the KKT tolerance") {
  StaticProblem prob;
  prob.sens = {Matrix::Constant(1, 1, 0.01), Matrix::Constant(1, 1, 0.01)};
  prob.c = Vector::Constant(1, 1.045);
  prob.der_load_p = Vector::Zero(1);
  prob.der_load_q = Vector::Zero(1);
  prob.regions = {OperatingRegion::make(RegionKind::joint, 1.0, 0.9)};
  prob.costs = {CostParams{}};
  const ControllerParams prm;
  OracleOptions opts;
  opts.tol = 1e-10;
  const auto sp = solve_saddle_oracle(prob, prm, opts);
  CHECK(sp.residual <= 1e-10);
  CHECK(kkt_residual(prob, prm, sp.z) == sp.residual);
  CHECK(sp.z.duals.mu[0] > 0.0);
  CHECK(sp.z.u[0].q < 0.0);
}

TEST_CASE("saddle point does not depend on the starting point") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 5; ++t) {
    const auto prob = testprob::random_problem(rng);
    const auto prm = testprob::random_params(rng);
    OracleOptions opts;
    opts.tol = 1e-11;
    const Vector ref = solve_saddle_oracle(prob, prm, opts).z.flatten();
    for (int s = 0; s < 4; ++s) {
      opts.init = testprob::random_state(prob, rng);
      const auto sp = solve_saddle_oracle(prob, prm, opts);
      CHECK((sp.z.flatten() - ref).lpNorm<Eigen::Infinity>() <= 1e-8);
      CHECK(sp.residual <= 1e-11);
    }
  }
}

TEST_CASE("both oracle routes find the same saddle point") {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 5; ++t) {
    const auto prob = testprob::random_problem(rng, 2, 2);
    auto prm = testprob::random_params(rng);
    prm.nu = 0.2;
    prm.epsilon = 0.2;
    OracleOptions a;
    a.tol = 1e-12;
    OracleOptions b = a;
    b.method = OracleMethod::primal_dual;
    b.tol = 1e-14;
    const Vector za = solve_saddle_oracle(prob, prm, a).z.flatten();
    const auto sb = solve_saddle_oracle(prob, prm, b);
    CHECK((za - sb.z.flatten()).lpNorm<Eigen::Infinity>() <= 1e-9);
    CHECK(sb.residual <= 1e-10);
  }
}

TEST_CASE("saddle point is a fixed point of the error-free map") {
  std::mt19937_64 rng(47);
  const auto prob = testprob::random_problem(rng);
  const auto prm = testprob::random_params(rng);
  OracleOptions opts;
  opts.tol = 1e-12;
  const auto sp = solve_saddle_oracle(prob, prm, opts);
  const auto next = model_step(sp.z, prob, prm);
  CHECK((next.flatten() - sp.z.flatten()).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("exhausted iteration budget is an oracle failure") {
  std::mt19937_64 rng(53);
  const auto prob = testprob::random_problem(rng, 3, 3);
  const auto prm = testprob::random_params(rng);
  OracleOptions opts;
  opts.max_iter = 3;
  opts.tol = 1e-15;
  opts.init = testprob::random_state(prob, rng);
  CHECK_THROWS_AS(solve_saddle_oracle(prob, prm, opts), OracleFailure);
}
