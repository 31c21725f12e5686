#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace edgeemf {

struct BatteryCheck {
  std::string name;
  bool passed = false;
  std::size_t instances = 0;
  std::size_t failures = 0;
  double worst = 0.0; // largest observed deviation, in the check's own units
  std::string detail;
};

struct BatterySizes {
  std::size_t uplink_states = 1000;
  double uplink_resolution_w = 1e-6;
  std::size_t cpu_instances = 500;
  std::size_t slot_instances = 50;
  int slot_power_steps = 20;
};

/// Random-instance comparison of every closed-form solver with its brute-force
/// oracle: uplink power vs. grid scan, CPU scheduling vs. vertex enumeration,
/// and the composed slot decision vs. a joint grid over the DPP objective.
std::vector<BatteryCheck> run_oracle_battery(std::uint64_t seed, const BatterySizes& sizes = {});

} // namespace edgeemf
