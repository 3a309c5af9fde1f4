#pragma once

#include <cstdint>

#include "opfp/feeder.hpp"

namespace opfp::testbeds {

// Slack plus one DER node behind z = 0.01 + j0.01 pu.
FeederModel two_bus(Complex z = {0.01, 0.01}, double shunt_b = 0.0);

// 0 - 1 - 2 - 3 chain with identical lines; DER at node 3, load node 2.
FeederModel three_bus_chain(Complex z = {0.01, 0.02});

// Random tree on n_nodes + 1 buses: node j attaches to a uniformly chosen
// earlier node, |z| in [0.005, 0.05] pu with r/x in [0.5, 2]. Every node is
// monitored; roughly a third host DERs rated 0.2 pu.
FeederModel random_radial(int n_nodes, std::uint64_t seed);

// 36-node single-phase stand-in for a 4.8 kV feeder at a 10 MVA base, with
// 18 PV inverters (200 kVA, 300 kVA for the 3rd, 350 kVA for the 15th and
// 16th) and every node monitored.
FeederModel feeder36();

}  // namespace opfp::testbeds
