#pragma once

#include "apalloc/schedulers.hpp"

#include <optional>
#include <random>
#include <span>
#include <vector>

namespace apalloc {

/// Each AP in id order takes a uniform channel from its set and the power it
/// needs against the APs already placed. No second pass.
Allocation random_allocation(const Networkd& net, std::mt19937_64& rng);

/// Channels only: uniform draws with every AP at the given power.
Allocation random_channels(const Networkd& net, double power, std::mt19937_64& rng);

/// Selfish dynamics from a random allocation.
RunResult run_selfish(const Networkd& net, const TimingModel& timing, int max_rounds, std::mt19937_64& rng,
                      const PowerPolicy& power = {}, bool record_trace = false);

/// Smallest powers that satisfy every AP of a co-channel group at once:
/// p = (I - F)^-1 u with F_ij = beta_i g_ji / g_ii and u_i = beta_i N0 / g_ii.
/// Empty when no positive solution within the power budgets exists.
std::optional<Eigen::VectorXd> joint_necessary_powers(const Networkd& net, std::span<const ApId> group);

struct AdmissionResult {
  Allocation state;
  std::vector<ApId> admitted;  // in admission order
  int satisfied = 0;
};

/// Heuristic lower bound on the number of simultaneously satisfiable APs
/// with global knowledge. APs are visited in random order; each tries the
/// channel where its necessary power is smallest and is admitted only if the
/// whole co-channel group stays feasible. Rejected APs stay off.
AdmissionResult greedy_admission_bound(const Networkd& net, std::mt19937_64& rng);

}  // namespace apalloc
