#pragma once

#include "apalloc/game.hpp"
#include "apalloc/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace apalloc {

/// Two APs are candidates of each other when their coordination areas
/// overlap: d_ij < c_i + c_j.
bool candidate_test(const AccessPointd& a, const AccessPointd& b);

/// N_i: the shortest distance-ordered prefix of the other APs that contains
/// a transmitter on every channel some other AP currently uses. Distance ties
/// break by id.
NeighborSet nearest_cover_set(const Networkd& net, ApId i, const Allocation& state);

/// N_i is contained in R_i.
bool sufficiency_check(const Networkd& net, ApId i, const NeighborSet& known, const Allocation& state);

/// Knowledge that always equals N_i for the current allocation, optionally
/// united with fixed base sets.
KnowledgeFn nearest_cover_knowledge(const Networkd& net, std::vector<NeighborSet> base = {});

/// Per-AP known sets R_i, kept inside the candidate sets C_i. Channel data of
/// known neighbors is read live from the allocation, so it is never stale.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;
  explicit KnowledgeBase(const Networkd& net);

  int size() const { return static_cast<int>(known_.size()); }
  const NeighborSet& known(ApId i) const { return known_[i]; }
  const NeighborSet& candidates(ApId i) const { return candidates_[i]; }
  const std::vector<NeighborSet>& known_sets() const { return known_; }

  /// Adds j to R_i if it is a candidate of i. Returns true if R_i grew.
  bool learn(ApId i, ApId j);

  /// Recomputes candidate sets after APs were appended to the network.
  /// Existing knowledge is kept.
  void extend(const Networkd& net);

  /// Copy of the current sets as a knowledge function.
  KnowledgeFn snapshot() const { return static_knowledge(known_); }

 private:
  std::vector<NeighborSet> known_;
  std::vector<NeighborSet> candidates_;
};

struct Exchange {
  long tick = 0;
  ApId from = 0;
  ApId to = 0;
};

/// Simulated peer sampling. One tick is one second.
class DiscoveryState {
 public:
  DiscoveryState() = default;
  DiscoveryState(std::uint64_t seed, int num_aps, int samples_per_tick = 1);

  long tick() const { return tick_; }
  int samples_per_tick() const { return samples_per_tick_; }
  const std::vector<Exchange>& log() const { return log_; }

  /// Adds sampling streams for newly inserted APs.
  void extend(int num_aps);

  friend void discovery_tick(DiscoveryState& dstate, KnowledgeBase& kb, const Networkd& net);

 private:
  std::uint64_t seed_ = 0;
  long tick_ = 0;
  int samples_per_tick_ = 1;
  std::vector<std::mt19937_64> streams_;
  std::vector<Exchange> log_;
};

/// Every AP draws samples_per_tick uniform ids from the whole network. A
/// drawn candidate and the sampler learn each other and swap their known
/// sets; gossiped ids are kept only if they are candidates of the receiver.
void discovery_tick(DiscoveryState& dstate, KnowledgeBase& kb, const Networkd& net);

struct DiscoveryStatus {
  bool complete = false;
  int missing = 0;  // APs with at least one undiscovered candidate
};

DiscoveryStatus discovery_complete(const KnowledgeBase& kb);

/// Runs ticks until discovery completes or max_ticks elapse. Returns the tick
/// count at completion, or -1.
long run_discovery_to_completion(DiscoveryState& dstate, KnowledgeBase& kb, const Networkd& net, long max_ticks);

/// CSV with header "ap_id,known_count,candidate_count,sufficient_flag".
void write_knowledge_csv(std::ostream& out, const KnowledgeBase& kb, const Networkd& net, const Allocation& state);

}  // namespace apalloc
