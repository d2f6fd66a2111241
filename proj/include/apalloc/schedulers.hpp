#pragma once

#include "apalloc/game.hpp"

#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace apalloc {

enum class Timing { RoundRobin, Random, Asynchronous, Synchronous };

struct TimingModel {
  Timing kind = Timing::RoundRobin;
  int subset_size = 1;  // asynchronous only

  static TimingModel round_robin() { return {Timing::RoundRobin, 1}; }
  static TimingModel random() { return {Timing::Random, 1}; }
  static TimingModel asynchronous(int subset) { return {Timing::Asynchronous, subset}; }
  static TimingModel synchronous() { return {Timing::Synchronous, 1}; }

  /// Activations that make up one round over n APs.
  long activations_per_round(int n) const;
  void validate(int n) const;
};

std::string to_string(Timing t);
Timing parse_timing(const std::string& name);

/// APs activated at the given iteration.
std::vector<ApId> next_movers(const TimingModel& timing, long iteration, int n, std::mt19937_64& rng);

/// Keeps a stable AP's SINR shortfall below kSatisfactionRelTol.
inline constexpr double kRelativePowerTolerance = 1e-10;

enum class Responder { BestResponse, Selfish, Random };

struct DynamicsOptions {
  TimingModel timing;
  Responder responder = Responder::BestResponse;
  int max_rounds = 50;
  PowerPolicy power;
  bool record_trace = true;
  PotentialFlavor flavor = PotentialFlavor::AppendixALocal;
  /// A profile is stable when no AP would switch channel and no power would
  /// move by more than this many watts, nor by more than
  /// kRelativePowerTolerance of its value.
  double power_tolerance = 1e-12;
  /// End the run at the first repeated channel vector.
  bool stop_on_cycle = true;
};

struct RunResult {
  bool converged = false;
  bool cycle_detected = false;
  int iterations = 0;    // rounds executed
  long activations = 0;  // mover-set activations executed
  DynamicsTrace trace;
  Allocation state;
};

/// Response of one AP and its utility before and after, all read from the
/// given profile. Selfish and random responders score channels by negated
/// measured interference.
struct Response {
  Strategy strategy;
  double utility_before = 0;
  double utility_after = 0;
};

Response compute_response(const Networkd& net, ApId i, const Allocation& state, const KnowledgeFn& knowledge,
                          Responder responder, const PowerPolicy& power, std::mt19937_64& rng);

/// Iterates responses under the timing model. Convergence is checked after
/// every round by a non-mutating pass over all APs. A changed channel vector
/// that repeats an earlier one ends the run with cycle_detected set.
RunResult run_dynamics(const Networkd& net, Allocation start, const KnowledgeFn& knowledge,
                       const DynamicsOptions& options, std::mt19937_64& rng);

/// True when no AP's response differs from its current strategy.
bool is_stable(const Networkd& net, const Allocation& state, const KnowledgeFn& knowledge, Responder responder,
               const PowerPolicy& power, double power_tolerance);

/// CSV with header "iteration,mover,old_channel,new_channel,u_before,u_after,P_value".
void write_trace_csv(std::ostream& out, const DynamicsTrace& trace);

}  // namespace apalloc
