#include "apalloc/schedulers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>

namespace apalloc {

long TimingModel::activations_per_round(int n) const {
  switch (kind) {
    case Timing::RoundRobin:
    case Timing::Random: return std::max(n, 1);
    case Timing::Asynchronous: return std::max<long>(1, (n + subset_size - 1) / subset_size);
    case Timing::Synchronous: return 1;
  }
  return 1;
}

void TimingModel::validate(int n) const {
  if (kind == Timing::Asynchronous && (subset_size < 1 || subset_size > std::max(n, 1)))
    throw std::invalid_argument("asynchronous subset_size must lie in [1, N]");
}

std::string to_string(Timing t) {
  switch (t) {
    case Timing::RoundRobin: return "round-robin";
    case Timing::Random: return "random";
    case Timing::Asynchronous: return "asynchronous";
    case Timing::Synchronous: return "synchronous";
  }
  return "unknown";
}

Timing parse_timing(const std::string& name) {
  for (Timing t : {Timing::RoundRobin, Timing::Random, Timing::Asynchronous, Timing::Synchronous})
    if (to_string(t) == name) return t;
  throw std::invalid_argument("unknown timing model '" + name + "'");
}

std::vector<ApId> next_movers(const TimingModel& timing, long iteration, int n, std::mt19937_64& rng) {
  if (n <= 0) return {};
  switch (timing.kind) {
    case Timing::RoundRobin: return {static_cast<ApId>(iteration % n)};
    case Timing::Random: return {std::uniform_int_distribution<int>(0, n - 1)(rng)};
    case Timing::Asynchronous: {
      std::vector<ApId> all(n);
      std::iota(all.begin(), all.end(), 0);
      std::vector<ApId> out;
      out.reserve(timing.subset_size);
      std::sample(all.begin(), all.end(), std::back_inserter(out), timing.subset_size, rng);
      return out;
    }
    case Timing::Synchronous: {
      std::vector<ApId> all(n);
      std::iota(all.begin(), all.end(), 0);
      return all;
    }
  }
  return {};
}

Response compute_response(const Networkd& net, ApId i, const Allocation& state, const KnowledgeFn& knowledge,
                          Responder responder, const PowerPolicy& power, std::mt19937_64& rng) {
  const ChannelId current = state.channel[i];
  Response r;
  if (responder == Responder::BestResponse) {
    const UtilityContext ctx = make_context(net, i, knowledge(i, state), state, power);
    r.strategy = best_response(net, ctx, state);
    r.utility_after = utility(ctx, r.strategy.channel);
    // The old strategy is scored at the power actually in use, which can be
    // stale. Switching on is an activation, not a deviation.
    r.utility_before = current == kOff ? r.utility_after
                                       : -ctx.interference(current) - state.power(i) * ctx.outgoing(current);
    return r;
  }
  const Eigen::VectorXd interference = interference_profile(net, i, state);
  if (responder == Responder::Selfish) {
    r.strategy = selfish_response(net, i, state, power);
  } else {
    const auto& channels = net.ap(i).channels;
    const ChannelId k = channels[std::uniform_int_distribution<std::size_t>(0, channels.size() - 1)(rng)];
    r.strategy = {k, power.fixed ? *power.fixed : necessary_power_for(net, i, interference(k))};
  }
  r.utility_after = -interference(r.strategy.channel);
  r.utility_before = current == kOff ? r.utility_after : -interference(current);
  return r;
}

bool is_stable(const Networkd& net, const Allocation& state, const KnowledgeFn& knowledge, Responder responder,
               const PowerPolicy& power, double power_tolerance) {
  if (responder == Responder::Random) return net.size() == 0;
  std::mt19937_64 unused;
  for (int i = 0; i < net.size(); ++i) {
    const Strategy s = compute_response(net, i, state, knowledge, responder, power, unused).strategy;
    const double drift = std::abs(s.power - state.power(i));
    if (s.channel != state.channel[i] || drift > power_tolerance || drift > kRelativePowerTolerance * s.power)
      return false;
  }
  return true;
}

RunResult run_dynamics(const Networkd& net, Allocation start, const KnowledgeFn& knowledge,
                       const DynamicsOptions& options, std::mt19937_64& rng) {
  const int n = net.size();
  options.timing.validate(n);
  if (start.size() != n) throw std::invalid_argument("run_dynamics: allocation size mismatch");

  RunResult result;
  result.state = std::move(start);
  result.trace.flavor = options.flavor;
  Allocation& state = result.state;

  std::set<std::vector<ChannelId>> seen{state.channel};
  double potential = options.record_trace ? evaluate_potential(options.flavor, net, state, knowledge).value : 0.0;
  const long per_round = options.timing.activations_per_round(n);

  for (int round = 1; round <= options.max_rounds; ++round) {
    result.iterations = round;
    for (long a = 0; a < per_round; ++a) {
      const long iteration = result.activations++;
      const std::vector<ApId> movers = next_movers(options.timing, iteration, n, rng);
      const bool simultaneous = movers.size() > 1;

      std::vector<Response> responses;
      responses.reserve(movers.size());
      for (ApId i : movers)
        responses.push_back(compute_response(net, i, state, knowledge, options.responder, options.power, rng));

      const Allocation previous = options.record_trace ? state : Allocation{};
      bool channel_changed = false;
      bool changed = false;
      std::vector<Strategy> before;
      before.reserve(movers.size());
      for (std::size_t m = 0; m < movers.size(); ++m) {
        const ApId i = movers[m];
        before.push_back({state.channel[i], state.power(i)});
        const Strategy& s = responses[m].strategy;
        channel_changed |= s.channel != state.channel[i];
        changed |= s.channel != state.channel[i] || s.power != state.power(i);
        state.set(i, s.channel, s.power);
      }

      if (options.record_trace) {
        const double potential_before = potential;
        double delta = 0;
        if (changed) {
          potential = evaluate_potential(options.flavor, net, state, knowledge).value;
          delta = potential_change(options.flavor, net, previous, state, knowledge);
        }
        for (std::size_t m = 0; m < movers.size(); ++m)
          result.trace.moves.push_back({iteration, movers[m], before[m], responses[m].strategy,
                                        responses[m].utility_before, responses[m].utility_after, potential_before,
                                        potential, delta, simultaneous});
      }

      if (channel_changed && !seen.insert(state.channel).second) {
        result.cycle_detected = true;
        if (options.stop_on_cycle) return result;
      }
    }
    if (!result.cycle_detected &&
        is_stable(net, state, knowledge, options.responder, options.power, options.power_tolerance)) {
      result.converged = true;
      return result;
    }
  }
  return result;
}

void write_trace_csv(std::ostream& out, const DynamicsTrace& trace) {
  const auto old = out.precision(12);
  out << "iteration,mover,old_channel,new_channel,u_before,u_after,P_value\n";
  for (const auto& m : trace.moves)
    out << m.iteration << ',' << m.mover << ',' << m.before.channel << ',' << m.after.channel << ','
        << m.utility_before << ',' << m.utility_after << ',' << m.potential_after << '\n';
  out.precision(old);
}

}  // namespace apalloc
