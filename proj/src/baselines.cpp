#include "apalloc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace apalloc {

namespace {

ChannelId uniform_channel(const AccessPointd& ap, std::mt19937_64& rng) {
  return ap.channels[std::uniform_int_distribution<std::size_t>(0, ap.channels.size() - 1)(rng)];
}

}  // namespace

Allocation random_allocation(const Networkd& net, std::mt19937_64& rng) {
  Allocation state(net.size());
  for (int i = 0; i < net.size(); ++i) {
    const ChannelId k = uniform_channel(net.ap(i), rng);
    state.set(i, k, necessary_power(net, i, k, state));
  }
  return state;
}

Allocation random_channels(const Networkd& net, double power, std::mt19937_64& rng) {
  Allocation state(net.size());
  for (int i = 0; i < net.size(); ++i) state.set(i, uniform_channel(net.ap(i), rng), power);
  return state;
}

RunResult run_selfish(const Networkd& net, const TimingModel& timing, int max_rounds, std::mt19937_64& rng,
                      const PowerPolicy& power, bool record_trace) {
  Allocation start = power.fixed ? random_channels(net, *power.fixed, rng) : random_allocation(net, rng);
  DynamicsOptions options;
  options.timing = timing;
  options.responder = Responder::Selfish;
  options.max_rounds = max_rounds;
  options.power = power;
  options.record_trace = record_trace;
  options.flavor = PotentialFlavor::AppendixBSelfish;
  return run_dynamics(net, std::move(start), no_knowledge(), options, rng);
}

std::optional<Eigen::VectorXd> joint_necessary_powers(const Networkd& net, std::span<const ApId> group) {
  const auto m = static_cast<Eigen::Index>(group.size());
  if (m == 0) return Eigen::VectorXd{};
  const auto& g = net.true_gains();
  const double noise = net.model().noise_power;
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const ApId i = group[a];
    const double scale = net.ap(i).sinr_target / net.edge_gains()(i);
    rhs(a) = scale * noise;
    for (Eigen::Index b = 0; b < m; ++b)
      if (a != b) system(a, b) = -scale * g(group[b], i);
  }
  const Eigen::VectorXd p = system.partialPivLu().solve(rhs);
  for (Eigen::Index a = 0; a < m; ++a)
    if (!std::isfinite(p(a)) || !(p(a) > 0) || p(a) > net.ap(group[a]).max_power) return std::nullopt;
  return p;
}

AdmissionResult greedy_admission_bound(const Networkd& net, std::mt19937_64& rng) {
  const int n = net.size();
  std::vector<ApId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  AdmissionResult result;
  result.state = Allocation(n);
  std::vector<std::vector<ApId>> groups(net.num_channels());
  for (ApId i : order) {
    const Eigen::VectorXd interference = interference_profile(net, i, result.state);
    ChannelId best = net.ap(i).channels.front();
    for (ChannelId k : net.ap(i).channels)
      if (interference(k) < interference(best)) best = k;

    std::vector<ApId> group = groups[best];
    group.push_back(i);
    const auto powers = joint_necessary_powers(net, group);
    if (!powers) continue;
    groups[best] = std::move(group);
    for (std::size_t a = 0; a < groups[best].size(); ++a) result.state.set(groups[best][a], best, (*powers)(a));
    result.admitted.push_back(i);
  }
  result.satisfied = static_cast<int>(result.admitted.size());
  return result;
}

}  // namespace apalloc
