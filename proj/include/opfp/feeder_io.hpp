#pragma once

#include <filesystem>
#include <string>

#include "opfp/feeder.hpp"

namespace opfp {

// Feeder description files are JSON objects:
//
//   {
//     "n_nodes": 2,
//     "base_power_va": 5.0e6,
//     "slack": {"magnitude": 1.0, "angle_deg": 0.0},
//     "lines": [{"from": 0, "to": 1, "r": 0.01, "x": 0.01, "b_shunt": 0.0}],
//     "ders": [{"node": 1, "s_rating": 1.0}],
//     "monitored": [1],
//     "loads": [{"node": 2, "p": 0.1, "q": 0.05}]
//   }
//
// r, x, b_shunt (total charging susceptance) and all powers are per-unit.
// "base_power_va", "slack", "b_shunt" and "loads" are optional. Any key not
// listed here is rejected.

// Throws IoError if the file cannot be read, InvalidInput on schema errors.
FeederModel read_feeder(const std::filesystem::path& path);
FeederModel parse_feeder(const std::string& text);
std::string serialize_feeder(const FeederModel& feeder);
void write_feeder(const FeederModel& feeder, const std::filesystem::path& path);

}  // namespace opfp
