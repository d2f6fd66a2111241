#pragma once

#include "apalloc/model.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace apalloc {

/// Sorted ids of the APs a player knows (the set R_i).
using NeighborSet = std::vector<ApId>;

/// Supplies R_i for player i given the allocation at activation time.
using KnowledgeFn = std::function<NeighborSet(ApId, const Allocation&)>;

KnowledgeFn no_knowledge();
KnowledgeFn full_knowledge(int n);
KnowledgeFn static_knowledge(std::vector<NeighborSet> sets);

/// How a responding AP picks its transmit power. Without a fixed value the
/// AP uses its necessary power on the chosen channel.
struct PowerPolicy {
  std::optional<double> fixed;
};

struct Strategy {
  ChannelId channel = kOff;
  double power = 0;

  friend bool operator==(const Strategy&, const Strategy&) = default;
};

/// Everything player i needs to score its channels: the interference it
/// measures (true gains, all of the network) and the estimated interference
/// it would cause at known neighbors per unit of power.
struct UtilityContext {
  ApId player = 0;
  NeighborSet known;
  Eigen::VectorXd interference;  // I_i(k) per global channel, watts
  Eigen::VectorXd outgoing;      // sum over active known j on k of g-bar_ij
  Eigen::VectorXd power;         // p_i^nec(k), or the fixed power
};

UtilityContext make_context(const Networkd& net, ApId i, NeighborSet known, const Allocation& state,
                            const PowerPolicy& policy = {});

/// u_i(k) = -I_i(k) - p_i^nec(k) * sum_{j in R_i} g-bar_ij l(p_j(k)).
double utility(const UtilityContext& ctx, ChannelId k);

/// Channel maximizing utility over the AP's channel set. Ties keep the
/// current channel, otherwise the lowest id wins.
Strategy best_response(const Networkd& net, const UtilityContext& ctx, const Allocation& state);

/// Channel with the least measured interference, same tie rule.
Strategy selfish_response(const Networkd& net, ApId i, const Allocation& state, const PowerPolicy& policy = {});

enum class PotentialFlavor { ExactFull, AppendixALocal, AppendixBSelfish };

std::string to_string(PotentialFlavor f);

struct PotentialValue {
  double value = 0;
  PotentialFlavor flavor = PotentialFlavor::ExactFull;
};

/// Half the interference every AP receives plus half the estimated
/// interference it causes, with all neighbors known. Transmit powers are
/// taken from the allocation.
PotentialValue exact_potential_full(const Networkd& net, const Allocation& state);

/// Sum of every AP's utility at its current channel under its own knowledge
/// set, with powers taken from the allocation.
PotentialValue appendix_a_potential(const Networkd& net, const Allocation& state, const KnowledgeFn& knowledge);

/// Sum over APs of sum_{j != i} g_ji P_j P_i over co-channel pairs.
PotentialValue appendix_b_potential(const Networkd& net, const Allocation& state);

PotentialValue evaluate_potential(PotentialFlavor flavor, const Networkd& net, const Allocation& state,
                                  const KnowledgeFn& knowledge);

/// Potential difference after minus before, summed pair by pair so terms
/// that did not change cancel exactly.
double potential_change(PotentialFlavor flavor, const Networkd& net, const Allocation& before, const Allocation& after,
                        const KnowledgeFn& knowledge);

/// Pure Nash check over channel deviations with re-optimized power. Off APs
/// are never in equilibrium. Throws std::length_error when N*K exceeds
/// kMaxNashDeviations.
inline constexpr long kMaxNashDeviations = 1'000'000;
bool is_nash_equilibrium(const Networkd& net, const Allocation& state, const KnowledgeFn& knowledge,
                         const PowerPolicy& policy = {});

struct MoveRecord {
  long iteration = 0;
  ApId mover = 0;
  Strategy before;
  Strategy after;
  double utility_before = 0;
  double utility_after = 0;
  double potential_before = 0;
  double potential_after = 0;
  double potential_change = 0;  // termwise, see potential_change()
  bool simultaneous = false;  // part of a synchronous update, not unilateral
};

struct DynamicsTrace {
  PotentialFlavor flavor = PotentialFlavor::AppendixALocal;
  std::vector<MoveRecord> moves;
};

/// One line of a verification report.
struct Finding {
  ApId mover = 0;
  double utility_change = 0;
  double potential_change = 0;
  bool ok = true;
  std::string note;
};

struct ExactPotentialReport {
  long trials = 0;
  long violations = 0;
  double max_violation = 0;
  /// Largest |raw appendix-B change| / |altered-payoff change| seen; 2 for a
  /// symmetric game.
  double raw_to_payoff_ratio = 0;
  std::vector<Finding> findings;

  bool exact() const { return violations == 0; }
};

/// Random unilateral channel deviations at fixed powers. Each trial compares
/// the mover's altered payoff -P_i sum_j g_ji P_j(k) against half the
/// negated appendix-B potential, then applies the deviation.
ExactPotentialReport verify_exact_potential(const Networkd& net, const Allocation& start, long trials, double tol,
                                            std::mt19937_64& rng);

struct OrdinalReport {
  long records = 0;
  long strict_improvements = 0;
  long skipped_simultaneous = 0;
  std::vector<Finding> violations;

  bool ok() const { return violations.empty(); }
};

/// Relative size below which a utility change counts as rounding noise.
inline constexpr double kOrdinalRelTol = 1e-9;

/// Every strict utility improvement in the trace must come with a strictly
/// positive recorded potential change. An improvement is strict when it exceeds rel_tol times
/// the larger utility magnitude.
OrdinalReport verify_ordinal_improvement(const DynamicsTrace& trace, PotentialFlavor flavor,
                                         double rel_tol = kOrdinalRelTol);

/// True iff some channel minimizes both the measured interference and the
/// estimated interference the AP would cause at its known neighbors.
bool local_optimality_check(const Networkd& net, ApId i, const Allocation& state, const NeighborSet& known);

/// Structured text: one finding per line, "mover=<id> du=<v> dP=<v> verdict=<ok|violation>".
void write_findings(std::ostream& out, const std::vector<Finding>& findings);

}  // namespace apalloc
