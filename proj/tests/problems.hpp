#pragma once

// Random surrogate-problem instances shared by the unit and acceptance tests.

#include <random>

#include "opfp/controller.hpp"

namespace testprob {

using opfp::ControllerParams;
using opfp::ControllerState;
using opfp::CostParams;
using opfp::OperatingRegion;
using opfp::RegionKind;
using opfp::StaticProblem;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Positive sensitivities of distribution-feeder size, offsets around the
// voltage band, joint regions with a random share of the rating available.
inline StaticProblem random_problem(std::mt19937_64& rng, int n_der = 0, int n_mon = 0) {
  if (n_der == 0) n_der = 1 + static_cast<int>(rng() % 5);
  if (n_mon == 0) n_mon = 1 + static_cast<int>(rng() % 5);
  StaticProblem p;
  p.sens.r.resize(n_mon, n_der);
  p.sens.b.resize(n_mon, n_der);
  for (int n = 0; n < n_mon; ++n) {
    for (int i = 0; i < n_der; ++i) {
      p.sens.r(n, i) = uniform(rng, 0.002, 0.05);
      p.sens.b(n, i) = uniform(rng, 0.002, 0.05);
    }
  }
  p.c.resize(n_mon);
  for (int n = 0; n < n_mon; ++n) p.c[n] = uniform(rng, 0.94, 1.07);
  p.der_load_p.resize(n_der);
  p.der_load_q.resize(n_der);
  for (int i = 0; i < n_der; ++i) {
    const double s = uniform(rng, 0.5, 1.5);
    p.regions.push_back(OperatingRegion::make(RegionKind::joint, s, uniform(rng, 0.0, s)));
    p.costs.push_back(CostParams{uniform(rng, 0.5, 3.0), uniform(rng, 0.5, 3.0)});
    p.der_load_p[i] = uniform(rng, 0.0, 0.3);
    p.der_load_q[i] = uniform(rng, 0.0, 0.1);
  }
  return p;
}

inline ControllerParams random_params(std::mt19937_64& rng) {
  ControllerParams prm;
  prm.alpha = uniform(rng, 0.01, 0.5);
  prm.nu = uniform(rng, 1e-3, 0.2);
  prm.epsilon = uniform(rng, 1e-3, 0.2);
  prm.v_min = uniform(rng, 0.94, 0.96);
  prm.v_max = uniform(rng, 1.03, 1.06);
  return prm;
}

inline ControllerState random_state(const StaticProblem& p, std::mt19937_64& rng) {
  ControllerState z;
  for (const auto& r : p.regions) {
    z.u.push_back({uniform(rng, -0.2, 1.2) * r.s_rating, uniform(rng, -1.0, 1.0) * r.s_rating});
  }
  z.duals = opfp::DualState::zero(p.n_monitored());
  for (int n = 0; n < p.n_monitored(); ++n) {
    z.duals.gamma[n] = uniform(rng, 0.0, 2.0);
    z.duals.mu[n] = uniform(rng, 0.0, 2.0);
  }
  return z;
}

}  // namespace testprob
