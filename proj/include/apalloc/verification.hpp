#pragma once

// Small reference instances and the property suite behind `apalloc verify`.

#include "apalloc/harness.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace apalloc {

/// Two identical APs `separation` meters apart sharing two channels.
Networkd symmetric_pair_network(double separation = 30, double radius = 10);

/// Every AP on the given channel at its necessary power, assigned in id order.
Allocation co_channel_start(const Networkd& net, ChannelId k = 0);

/// Scenario with one coverage radius for all APs and a fixed area.
ScenarioConfig equal_radius_config(int num_aps, int num_channels, double radius, double area, std::uint64_t seed);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Properties that hold exactly for this model: exact potential under equal
/// radii and uniform power, Nash equilibrium at converged profiles, the
/// synchronous two-AP cycle, ordinal improvement with full knowledge and
/// exact gain estimates, and selfish convergence under equal radii.
std::vector<CheckResult> run_property_suite(std::uint64_t seed);

/// "PASS|FAIL <name>: <detail>" per check.
void write_checks(std::ostream& out, const std::vector<CheckResult>& checks);

}  // namespace apalloc
