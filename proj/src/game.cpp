#include "apalloc/game.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <ostream>
#include <stdexcept>

namespace apalloc {

KnowledgeFn no_knowledge() {
  return [](ApId, const Allocation&) { return NeighborSet{}; };
}

KnowledgeFn full_knowledge(int n) {
  return [n](ApId i, const Allocation&) {
    NeighborSet out;
    out.reserve(n > 0 ? n - 1 : 0);
    for (int j = 0; j < n; ++j)
      if (j != i) out.push_back(j);
    return out;
  };
}

KnowledgeFn static_knowledge(std::vector<NeighborSet> sets) {
  auto shared = std::make_shared<const std::vector<NeighborSet>>(std::move(sets));
  return [shared](ApId i, const Allocation&) { return (*shared)[i]; };
}

UtilityContext make_context(const Networkd& net, ApId i, NeighborSet known, const Allocation& state,
                            const PowerPolicy& policy) {
  UtilityContext ctx;
  ctx.player = i;
  ctx.known = std::move(known);
  ctx.interference = interference_profile(net, i, state);
  ctx.outgoing = Eigen::VectorXd::Zero(net.num_channels());
  for (ApId j : ctx.known) {
    if (j == i) throw std::invalid_argument("knowledge set of AP " + std::to_string(i) + " contains itself");
    if (state.active(j)) ctx.outgoing(state.channel[j]) += net.estimated_gains()(i, j);
  }
  ctx.power.resize(net.num_channels());
  for (int k = 0; k < net.num_channels(); ++k)
    ctx.power(k) = policy.fixed ? *policy.fixed : necessary_power_for(net, i, ctx.interference(k));
  return ctx;
}

double utility(const UtilityContext& ctx, ChannelId k) { return -ctx.interference(k) - ctx.power(k) * ctx.outgoing(k); }

namespace {

// Argmax of score over the AP's channels; ties keep `current`, else lowest id.
template <typename Score>
ChannelId pick_channel(const AccessPointd& ap, ChannelId current, Score&& score) {
  ChannelId best = kOff;
  double best_value = -std::numeric_limits<double>::infinity();
  for (ChannelId k : ap.channels) {
    const double v = score(k);
    if (best == kOff || v > best_value) {
      best = k;
      best_value = v;
    }
  }
  if (current != kOff && current != best && ap.has_channel(current) && score(current) == best_value) return current;
  return best;
}

}  // namespace

Strategy best_response(const Networkd& net, const UtilityContext& ctx, const Allocation& state) {
  const ChannelId k = pick_channel(net.ap(ctx.player), state.channel[ctx.player],
                                   [&](ChannelId c) { return utility(ctx, c); });
  return {k, ctx.power(k)};
}

Strategy selfish_response(const Networkd& net, ApId i, const Allocation& state, const PowerPolicy& policy) {
  const Eigen::VectorXd interference = interference_profile(net, i, state);
  const ChannelId k =
      pick_channel(net.ap(i), state.channel[i], [&](ChannelId c) { return -interference(c); });
  return {k, policy.fixed ? *policy.fixed : necessary_power_for(net, i, interference(k))};
}

std::string to_string(PotentialFlavor f) {
  switch (f) {
    case PotentialFlavor::ExactFull: return "exact-full";
    case PotentialFlavor::AppendixALocal: return "appendix-A-local";
    case PotentialFlavor::AppendixBSelfish: return "appendix-B-selfish";
  }
  return "unknown";
}

namespace {

// Contribution of the ordered pair (i, j) to a potential. `knows` tells
// whether j is in R_i; only the appendix-A flavor reads it.
double pair_term(PotentialFlavor flavor, const Networkd& net, const Allocation& state, ApId i, ApId j, bool knows) {
  if (!state.active(i) || !state.active(j) || state.channel[i] != state.channel[j]) return 0;
  const double received = state.power(j) * net.true_gains()(j, i);
  switch (flavor) {
    case PotentialFlavor::ExactFull: return -0.5 * received - 0.5 * state.power(i) * net.estimated_gains()(i, j);
    case PotentialFlavor::AppendixALocal:
      return -received - (knows ? state.power(i) * net.estimated_gains()(i, j) : 0.0);
    case PotentialFlavor::AppendixBSelfish: return received * state.power(i);
  }
  throw std::invalid_argument("unknown potential flavor");
}

std::vector<char> known_row(const Networkd& net, ApId i, const Allocation& state, const KnowledgeFn* knowledge) {
  std::vector<char> row(net.size(), 0);
  if (knowledge)
    for (ApId j : (*knowledge)(i, state)) row.at(j) = 1;
  return row;
}

double sum_terms(PotentialFlavor flavor, const Networkd& net, const Allocation& state, const KnowledgeFn* knowledge) {
  double total = 0;
  for (int i = 0; i < net.size(); ++i) {
    if (!state.active(i)) continue;
    const auto row = known_row(net, i, state, knowledge);
    for (int j = 0; j < net.size(); ++j)
      if (j != i) total += pair_term(flavor, net, state, i, j, row[j]);
  }
  return total;
}

}  // namespace

PotentialValue exact_potential_full(const Networkd& net, const Allocation& state) {
  return {sum_terms(PotentialFlavor::ExactFull, net, state, nullptr), PotentialFlavor::ExactFull};
}

PotentialValue appendix_a_potential(const Networkd& net, const Allocation& state, const KnowledgeFn& knowledge) {
  return {sum_terms(PotentialFlavor::AppendixALocal, net, state, &knowledge), PotentialFlavor::AppendixALocal};
}

PotentialValue appendix_b_potential(const Networkd& net, const Allocation& state) {
  return {sum_terms(PotentialFlavor::AppendixBSelfish, net, state, nullptr), PotentialFlavor::AppendixBSelfish};
}

PotentialValue evaluate_potential(PotentialFlavor flavor, const Networkd& net, const Allocation& state,
                                  const KnowledgeFn& knowledge) {
  switch (flavor) {
    case PotentialFlavor::ExactFull: return exact_potential_full(net, state);
    case PotentialFlavor::AppendixALocal: return appendix_a_potential(net, state, knowledge);
    case PotentialFlavor::AppendixBSelfish: return appendix_b_potential(net, state);
  }
  throw std::invalid_argument("unknown potential flavor");
}

double potential_change(PotentialFlavor flavor, const Networkd& net, const Allocation& before, const Allocation& after,
                        const KnowledgeFn& knowledge) {
  const KnowledgeFn* k = flavor == PotentialFlavor::AppendixALocal ? &knowledge : nullptr;
  double total = 0;
  for (int i = 0; i < net.size(); ++i) {
    if (!before.active(i) && !after.active(i)) continue;
    const auto row_before = known_row(net, i, before, k);
    const auto row_after = known_row(net, i, after, k);
    for (int j = 0; j < net.size(); ++j) {
      if (j == i) continue;
      const double a = pair_term(flavor, net, after, i, j, row_after[j]);
      const double b = pair_term(flavor, net, before, i, j, row_before[j]);
      if (a != b) total += a - b;
    }
  }
  return total;
}

bool is_nash_equilibrium(const Networkd& net, const Allocation& state, const KnowledgeFn& knowledge,
                         const PowerPolicy& policy) {
  if (static_cast<long>(net.size()) * net.num_channels() > kMaxNashDeviations)
    throw std::length_error("is_nash_equilibrium: " + std::to_string(net.size()) + " APs x " +
                            std::to_string(net.num_channels()) + " channels exceeds the enumeration guard");
  for (int i = 0; i < net.size(); ++i) {
    if (!state.active(i)) return false;
    const UtilityContext ctx = make_context(net, i, knowledge(i, state), state, policy);
    const double current = utility(ctx, state.channel[i]);
    for (ChannelId k : net.ap(i).channels)
      if (k != state.channel[i] && utility(ctx, k) > current) return false;
  }
  return true;
}

ExactPotentialReport verify_exact_potential(const Networkd& net, const Allocation& start, long trials, double tol,
                                            std::mt19937_64& rng) {
  start.validate(net);
  for (int i = 0; i < net.size(); ++i)
    if (!start.active(i)) throw std::invalid_argument("verify_exact_potential: every AP must transmit");

  ExactPotentialReport report;
  Allocation state = start;
  std::uniform_int_distribution<int> pick_ap(0, net.size() - 1);
  for (long t = 0; t < trials; ++t) {
    const ApId i = pick_ap(rng);
    const auto& channels = net.ap(i).channels;
    std::uniform_int_distribution<std::size_t> pick_k(0, channels.size() - 1);
    const ChannelId to = channels[pick_k(rng)];
    const ChannelId from = state.channel[i];

    const double interference_from = interference_at(net, i, from, state);
    const double interference_to = interference_at(net, i, to, state);
    const double du = -state.power(i) * interference_to + state.power(i) * interference_from;

    const Allocation before = state;
    state.channel[i] = to;
    const double raw_change = potential_change(PotentialFlavor::AppendixBSelfish, net, before, state, no_knowledge());
    const double dp = -0.5 * raw_change;

    const double violation = std::abs(du - dp);
    Finding f{i, du, dp, violation <= tol, {}};
    if (!f.ok) {
      ++report.violations;
      f.note = "from=" + std::to_string(from) + " to=" + std::to_string(to);
    }
    report.max_violation = std::max(report.max_violation, violation);
    if (du != 0) report.raw_to_payoff_ratio = std::max(report.raw_to_payoff_ratio, std::abs(raw_change) / std::abs(du));
    report.findings.push_back(std::move(f));
    ++report.trials;
  }
  return report;
}

OrdinalReport verify_ordinal_improvement(const DynamicsTrace& trace, PotentialFlavor flavor, double rel_tol) {
  if (!trace.moves.empty() && trace.flavor != flavor)
    throw std::invalid_argument("trace records " + to_string(trace.flavor) + ", asked to verify " + to_string(flavor));
  OrdinalReport report;
  for (const auto& m : trace.moves) {
    ++report.records;
    if (m.simultaneous) {
      ++report.skipped_simultaneous;
      continue;
    }
    const double scale = std::max(std::abs(m.utility_before), std::abs(m.utility_after));
    if (!(m.utility_after - m.utility_before > rel_tol * scale)) continue;
    ++report.strict_improvements;
    if (!(m.potential_change > 0)) {
      report.violations.push_back({m.mover, m.utility_after - m.utility_before, m.potential_change,
                                   false,
                                   "iteration=" + std::to_string(m.iteration) + " from=" +
                                       std::to_string(m.before.channel) + " to=" + std::to_string(m.after.channel)});
    }
  }
  return report;
}

bool local_optimality_check(const Networkd& net, ApId i, const Allocation& state, const NeighborSet& known) {
  const UtilityContext ctx = make_context(net, i, known, state);
  const auto& channels = net.ap(i).channels;
  double min_received = std::numeric_limits<double>::infinity();
  double min_caused = std::numeric_limits<double>::infinity();
  for (ChannelId k : channels) {
    min_received = std::min(min_received, ctx.interference(k));
    min_caused = std::min(min_caused, ctx.outgoing(k));
  }
  for (ChannelId k : channels)
    if (ctx.interference(k) == min_received && ctx.outgoing(k) == min_caused) return true;
  return false;
}

void write_findings(std::ostream& out, const std::vector<Finding>& findings) {
  const auto old = out.precision(12);
  for (const auto& f : findings) {
    out << "mover=" << f.mover << " du=" << f.utility_change << " dP=" << f.potential_change
        << " verdict=" << (f.ok ? "ok" : "violation");
    if (!f.note.empty()) out << ' ' << f.note;
    out << '\n';
  }
  out.precision(old);
}

}  // namespace apalloc
