#include "apalloc/knowledge.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace apalloc {

bool candidate_test(const AccessPointd& a, const AccessPointd& b) {
  return (a.position - b.position).norm() < a.coordination_radius + b.coordination_radius;
}

NeighborSet nearest_cover_set(const Networkd& net, ApId i, const Allocation& state) {
  std::vector<char> used(net.num_channels(), 0);
  int required = 0;
  for (int j = 0; j < net.size(); ++j) {
    if (j == i || !state.active(j)) continue;
    if (!used[state.channel[j]]) {
      used[state.channel[j]] = 1;
      ++required;
    }
  }
  if (required == 0) return {};

  std::vector<ApId> order;
  order.reserve(net.size() - 1);
  for (int j = 0; j < net.size(); ++j)
    if (j != i) order.push_back(j);
  std::sort(order.begin(), order.end(), [&](ApId a, ApId b) {
    const double da = net.distance(i, a);
    const double db = net.distance(i, b);
    return da != db ? da < db : a < b;
  });

  NeighborSet prefix;
  for (ApId j : order) {
    prefix.push_back(j);
    if (state.active(j) && used[state.channel[j]] == 1) {
      used[state.channel[j]] = 2;
      if (--required == 0) break;
    }
  }
  std::sort(prefix.begin(), prefix.end());
  return prefix;
}

bool sufficiency_check(const Networkd& net, ApId i, const NeighborSet& known, const Allocation& state) {
  NeighborSet sorted_known = known;
  std::sort(sorted_known.begin(), sorted_known.end());
  const NeighborSet cover = nearest_cover_set(net, i, state);
  return std::includes(sorted_known.begin(), sorted_known.end(), cover.begin(), cover.end());
}

KnowledgeFn nearest_cover_knowledge(const Networkd& net, std::vector<NeighborSet> base) {
  auto shared_base = std::make_shared<const std::vector<NeighborSet>>(std::move(base));
  const Networkd* n = &net;
  return [n, shared_base](ApId i, const Allocation& state) {
    NeighborSet cover = nearest_cover_set(*n, i, state);
    if (shared_base->empty()) return cover;
    const NeighborSet& extra = (*shared_base)[i];
    NeighborSet out;
    std::set_union(cover.begin(), cover.end(), extra.begin(), extra.end(), std::back_inserter(out));
    return out;
  };
}

KnowledgeBase::KnowledgeBase(const Networkd& net) { extend(net); }

void KnowledgeBase::extend(const Networkd& net) {
  const int n = net.size();
  if (n < size()) throw std::invalid_argument("KnowledgeBase::extend: network shrank");
  known_.resize(n);
  candidates_.assign(n, {});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && candidate_test(net.ap(i), net.ap(j))) candidates_[i].push_back(j);
}

bool KnowledgeBase::learn(ApId i, ApId j) {
  if (i == j) return false;
  const auto& cand = candidates_[i];
  if (!std::binary_search(cand.begin(), cand.end(), j)) return false;
  auto& known = known_[i];
  auto it = std::lower_bound(known.begin(), known.end(), j);
  if (it != known.end() && *it == j) return false;
  known.insert(it, j);
  return true;
}

DiscoveryState::DiscoveryState(std::uint64_t seed, int num_aps, int samples_per_tick)
    : seed_(seed), samples_per_tick_(samples_per_tick) {
  if (samples_per_tick < 1) throw std::invalid_argument("samples_per_tick must be >= 1");
  extend(num_aps);
}

void DiscoveryState::extend(int num_aps) {
  for (int i = static_cast<int>(streams_.size()); i < num_aps; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                      static_cast<std::uint32_t>(i), 0xd15c0u};
    streams_.emplace_back(seq);
  }
}

void discovery_tick(DiscoveryState& dstate, KnowledgeBase& kb, const Networkd& net) {
  const int n = net.size();
  if (kb.size() != n) throw std::invalid_argument("discovery_tick: knowledge base size mismatch");
  dstate.extend(n);
  ++dstate.tick_;
  if (n < 2) return;
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (ApId i = 0; i < n; ++i) {
    for (int s = 0; s < dstate.samples_per_tick_; ++s) {
      const ApId j = pick(dstate.streams_[i]);
      if (j == i || !candidate_test(net.ap(i), net.ap(j))) continue;
      kb.learn(i, j);
      kb.learn(j, i);
      dstate.log_.push_back({dstate.tick_, i, j});
      const NeighborSet from_i = kb.known(i);
      const NeighborSet from_j = kb.known(j);
      for (ApId x : from_j) kb.learn(i, x);
      for (ApId x : from_i) kb.learn(j, x);
    }
  }
}

DiscoveryStatus discovery_complete(const KnowledgeBase& kb) {
  DiscoveryStatus status;
  for (int i = 0; i < kb.size(); ++i)
    if (kb.known(i).size() != kb.candidates(i).size()) ++status.missing;
  status.complete = status.missing == 0;
  return status;
}

long run_discovery_to_completion(DiscoveryState& dstate, KnowledgeBase& kb, const Networkd& net, long max_ticks) {
  const long start = dstate.tick();
  while (!discovery_complete(kb).complete) {
    if (dstate.tick() - start >= max_ticks) return -1;
    discovery_tick(dstate, kb, net);
  }
  return dstate.tick() - start;
}

void write_knowledge_csv(std::ostream& out, const KnowledgeBase& kb, const Networkd& net, const Allocation& state) {
  out << "ap_id,known_count,candidate_count,sufficient_flag\n";
  for (int i = 0; i < kb.size(); ++i)
    out << i << ',' << kb.known(i).size() << ',' << kb.candidates(i).size() << ','
        << (sufficiency_check(net, i, kb.known(i), state) ? 1 : 0) << '\n';
}

}  // namespace apalloc
