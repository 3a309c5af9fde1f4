// Serial vs OpenMP timings for the per-DER primal step and per-step oracle
// sweeps. Results of both policies are compared bit for bit.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include "opfp/controller.hpp"
#include "opfp/sim.hpp"
#include "opfp/testbeds.hpp"
#include "opfp/tracking.hpp"

using namespace opfp;

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void report(const char* name, double serial, double parallel, bool same) {
  std::printf("%-28s serial %9.4f s  parallel %9.4f s  speedup %5.2fx  %s\n", name, serial, parallel,
              serial / parallel, same ? "identical" : "MISMATCH");
}

void bench_primal(int n_der, int n_mon, int reps) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Sensitivities sens{Matrix(n_mon, n_der), Matrix(n_mon, n_der)};
  for (int i = 0; i < n_der; ++i) {
    for (int n = 0; n < n_mon; ++n) {
      sens.r(n, i) = 0.002 + 0.05 * u01(rng);
      sens.b(n, i) = 0.002 + 0.05 * u01(rng);
    }
  }
  std::vector<Setpoint> u(n_der);
  std::vector<OperatingRegion> regions;
  for (int i = 0; i < n_der; ++i) {
    regions.push_back(OperatingRegion::make(RegionKind::joint, 1.0, u01(rng)));
    u[i] = {1.2 * u01(rng), u01(rng) - 0.5};
  }
  DualState duals{Vector::Random(n_mon).cwiseAbs(), Vector::Random(n_mon).cwiseAbs()};
  const std::vector<CostParams> costs(n_der, CostParams{});
  const ControllerParams prm;

  std::vector<Setpoint> a, b;
  const double ts = best_of(reps, [&] { a = primal_step(u, duals, costs, regions, sens, prm, Exec::serial); });
  const double tp = best_of(reps, [&] { b = primal_step(u, duals, costs, regions, sens, prm, Exec::parallel); });
  bool same = a.size() == b.size();
  for (std::size_t i = 0; same && i < a.size(); ++i) same = a[i].p == b[i].p && a[i].q == b[i].q;
  char name[64];
  std::snprintf(name, sizeof name, "primal_step N_G=%d M=%d", n_der, n_mon);
  report(name, ts, tp, same);
}

void bench_oracles(int n_steps) {
  const Network net(testbeds::feeder36());
  ScenarioParams p;
  p.kind = ScenarioKind::cloud_transient;
  p.duration_s = n_steps * p.tau;
  p.pv_level = 0.98;
  p.load_level = 0.4;
  p.n_clouds = 3;
  const auto s = generate_scenario(net.feeder, p, 1);
  const SimOptions opts;
  std::vector<int> steps(n_steps);
  for (int k = 0; k < n_steps; ++k) steps[k] = k;
  std::vector<SaddlePoint> a, b;
  const double ts = best_of(1, [&] { a = solve_oracles(net, s, opts, steps, 1e-10, Exec::serial); });
  const double tp = best_of(1, [&] { b = solve_oracles(net, s, opts, steps, 1e-10, Exec::parallel); });
  bool same = true;
  for (int k = 0; k < n_steps; ++k) same = same && a[k].z.flatten() == b[k].z.flatten();
  char name[64];
  std::snprintf(name, sizeof name, "oracle sweep, %d steps", n_steps);
  report(name, ts, tp, same);
}

}  // namespace

int main(int argc, char** argv) {
  const int scale = argc > 1 ? std::atoi(argv[1]) : 1;
  std::printf("threads: %d\n", omp_get_max_threads());
  bench_primal(2000, 36, 20);
  bench_primal(20000 * scale, 36, 10);
  bench_primal(100000 * scale, 8, 5);
  bench_oracles(32 * scale);
  return 0;
}
