#include "opfp/testbeds.hpp"

#include <algorithm>
#include <array>
#include <random>

namespace opfp::testbeds {

FeederModel two_bus(Complex z, double shunt_b) {
  FeederModel f;
  f.n_nodes = 1;
  f.lines.push_back({{0}, {1}, z, {0.0, shunt_b}});
  f.ders.push_back({{1}, 1.0});
  f.monitored.push_back({1});
  return f;
}

FeederModel three_bus_chain(Complex z) {
  FeederModel f;
  f.n_nodes = 3;
  for (int i = 0; i < 3; ++i) f.lines.push_back({{i}, {i + 1}, z, {}});
  f.ders.push_back({{3}, 1.0});
  f.monitored = {{1}, {2}, {3}};
  f.loads.push_back({{2}, 0.1, 0.0});
  return f;
}

FeederModel random_radial(int n_nodes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53); };

  FeederModel f;
  f.n_nodes = n_nodes;
  for (int j = 1; j <= n_nodes; ++j) {
    const int parent = static_cast<int>(rng() % static_cast<std::uint64_t>(j));
    const double mag = uniform(0.005, 0.05);
    const double r_over_x = uniform(0.5, 2.0);
    const double x = mag / std::sqrt(1.0 + r_over_x * r_over_x);
    f.lines.push_back({{parent}, {j}, {r_over_x * x, x}, {}});
    f.monitored.push_back({j});
    if (j % 3 == 1) f.ders.push_back({{j}, 0.2});
  }
  return f;
}

FeederModel feeder36() {
  // parent of node j (index j-1)
  constexpr std::array<int, 36> parent{0,  1,  2,  3,  3,  5,  6,  5,  8,  9,  8,  11, 12, 11, 14, 15, 16, 15,
                                       18, 19, 18, 21, 22, 21, 24, 25, 24, 27, 28, 29, 27, 31, 32, 33, 34, 35};
  // relative segment lengths
  constexpr std::array<double, 36> length{2.0, 1.2, 0.8, 0.6, 1.0, 0.7, 0.6, 1.0, 0.8, 0.6, 0.9, 0.7,
                                          0.6, 0.8, 0.9, 0.7, 0.6, 0.8, 0.7, 0.6, 0.9, 0.8, 0.6, 0.8,
                                          0.7, 0.6, 0.9, 0.8, 0.7, 0.6, 0.8, 0.7, 0.6, 0.7, 0.6, 0.5};
  constexpr std::array<int, 18> pv_nodes{4, 7, 10, 13, 17, 20, 22, 23, 26, 28, 29, 30, 31, 32, 33, 34, 35, 36};

  FeederModel f;
  f.n_nodes = 36;
  f.base_power = 10.0e6;
  f.slack_voltage = {1.02, 0.0};
  for (int j = 1; j <= 36; ++j) {
    const double len = length[j - 1];
    f.lines.push_back({{parent[j - 1]}, {j}, {0.018 * len, 0.013 * len}, {0.0, 1e-4 * len}});
    f.monitored.push_back({j});
    // 60-140 kW demands at 0.9 power factor, deterministic pattern
    const double p = (60.0 + 80.0 * ((j * 37) % 11) / 10.0) * 1e3 / f.base_power;
    f.loads.push_back({{j}, p, 0.484 * p});
  }
  for (std::size_t i = 0; i < pv_nodes.size(); ++i) {
    double kva = 200.0;
    if (i + 1 == 3) kva = 300.0;
    if (i + 1 == 15 || i + 1 == 16) kva = 350.0;
    f.ders.push_back({{pv_nodes[i]}, kva * 1e3 / f.base_power});
  }
  return f;
}

}  // namespace opfp::testbeds
