#include "apalloc/knowledge.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

using namespace apalloc;
using apalloc::test::line_network;

namespace {

Networkd scatter(int n, double side, double coordination, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0, side);
  std::vector<AccessPointd> aps(n);
  for (int i = 0; i < n; ++i) {
    aps[i].id = i;
    aps[i].position = {pos(rng), pos(rng)};
    aps[i].coverage_radius = 10;
    aps[i].coordination_radius = coordination;
    aps[i].channels = {0, 1, 2, 3};
  }
  return Networkd(std::move(aps), PropagationModeld{}, 4);
}

// Grows a distance-ordered prefix one AP at a time and stops at the first
// prefix whose channels cover every channel in use by the others.
NeighborSet prefix_scan(const Networkd& net, ApId i, const Allocation& s) {
  std::set<ChannelId> needed;
  for (int j = 0; j < net.size(); ++j)
    if (j != i && s.active(j)) needed.insert(s.channel[j]);
  std::vector<std::pair<double, ApId>> order;
  for (int j = 0; j < net.size(); ++j)
    if (j != i) {
      const double dx = net.ap(i).position.x() - net.ap(j).position.x();
      const double dy = net.ap(i).position.y() - net.ap(j).position.y();
      order.push_back({std::sqrt(dx * dx + dy * dy), j});
    }
  std::sort(order.begin(), order.end());
  for (std::size_t len = 0; len <= order.size(); ++len) {
    std::set<ChannelId> seen;
    for (std::size_t m = 0; m < len; ++m)
      if (s.active(order[m].second)) seen.insert(s.channel[order[m].second]);
    if (seen == needed) {
      NeighborSet out;
      for (std::size_t m = 0; m < len; ++m) out.push_back(order[m].second);
      std::sort(out.begin(), out.end());
      return out;
    }
  }
  return {};
}

}  // namespace

TEST_CASE("candidate test uses the sum of coordination radii") {
  const Networkd net = line_network({0, 39.9, 40}, {10, 10, 10}, 1);
  CHECK(candidate_test(net.ap(0), net.ap(1)));
  CHECK_FALSE(candidate_test(net.ap(0), net.ap(2)));
  CHECK(candidate_test(net.ap(1), net.ap(0)));
}

TEST_CASE("nearest cover set") {
  SUBCASE("no other transmitter") {
    const Networkd net = line_network({0, 10}, {5, 5}, 2);
    Allocation s(2);
    s.set(0, 0, 1e-3);
    CHECK(nearest_cover_set(net, 0, s).empty());
  }
  SUBCASE("line with repeated channels") {
    const Networkd net = line_network({0, 10, 20, 30, 40}, {5, 5, 5, 5, 5}, 3);
    Allocation s(5);
    s.set(1, 0, 1e-3);
    s.set(2, 0, 1e-3);
    s.set(3, 1, 1e-3);
    s.set(4, 0, 1e-3);
    CHECK(nearest_cover_set(net, 0, s) == NeighborSet{1, 2, 3});
  }
  SUBCASE("silent APs in the prefix are kept") {
    const Networkd net = line_network({0, 10, 20}, {5, 5, 5}, 2);
    Allocation s(3);
    s.set(2, 1, 1e-3);
    CHECK(nearest_cover_set(net, 0, s) == NeighborSet{1, 2});
  }
  SUBCASE("matches a brute-force prefix scan") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
      const Networkd net = scatter(15, 200, 20, seed);
      std::mt19937_64 rng(seed);
      Allocation s(15);
      for (int i = 0; i < 15; ++i)
        if (rng() % 4 != 0) s.set(i, static_cast<ChannelId>(rng() % 4), 1e-3);
      for (int i = 0; i < 15; ++i) {
        const NeighborSet cover = nearest_cover_set(net, i, s);
        CHECK(cover == prefix_scan(net, i, s));
        CHECK(sufficiency_check(net, i, cover, s));
        if (!cover.empty()) {
          NeighborSet partial(cover.begin(), cover.end() - 1);
          CHECK_FALSE(sufficiency_check(net, i, partial, s));
        }
      }
    }
  }
}

TEST_CASE("knowledge base keeps R_i inside C_i") {
  const Networkd net = line_network({0, 30, 200}, {10, 10, 10}, 1);
  KnowledgeBase kb(net);
  CHECK(kb.candidates(0) == NeighborSet{1});
  CHECK(kb.candidates(2).empty());
  CHECK(kb.learn(0, 1));
  CHECK_FALSE(kb.learn(0, 1));
  CHECK_FALSE(kb.learn(0, 2));
  CHECK_FALSE(kb.learn(0, 0));
  CHECK(kb.known(0) == NeighborSet{1});
  CHECK(kb.snapshot()(0, Allocation(3)) == NeighborSet{1});
  CHECK(discovery_complete(kb).missing == 1);

  const Networkd grown = line_network({0, 30, 200, 20}, {10, 10, 10, 10}, 1);
  kb.extend(grown);
  CHECK(kb.size() == 4);
  CHECK(kb.known(0) == NeighborSet{1});
  CHECK(kb.candidates(0) == NeighborSet{1, 3});
  CHECK_THROWS_AS(kb.extend(net), std::invalid_argument);
}

TEST_CASE("nearest cover knowledge unites the cover with base sets") {
  const Networkd net = line_network({0, 10, 20}, {5, 5, 5}, 2);
  Allocation s(3);
  s.set(1, 0, 1e-3);
  s.set(2, 0, 1e-3);
  CHECK(nearest_cover_knowledge(net)(0, s) == NeighborSet{1});
  CHECK(nearest_cover_knowledge(net, {{2}, {}, {}})(0, s) == NeighborSet{1, 2});
}

TEST_CASE("two mutual candidates meet after 4/3 ticks on average") {
  const Networkd net = line_network({0, 10}, {10, 10}, 1);
  const int trials = 20000;
  double total = 0;
  for (int t = 0; t < trials; ++t) {
    KnowledgeBase kb(net);
    DiscoveryState d(static_cast<std::uint64_t>(t) + 1, 2);
    total += static_cast<double>(run_discovery_to_completion(d, kb, net, 1000));
  }
  CHECK(total / trials == doctest::Approx(4.0 / 3.0).epsilon(0.02));
}

TEST_CASE("discovery invariants") {
  const Networkd net = scatter(60, 400, 30, 7);
  KnowledgeBase kb(net);
  DiscoveryState d(42, net.size(), 2);
  std::size_t known_before = 0;
  int missing_before = discovery_complete(kb).missing;
  for (int t = 0; t < 40; ++t) {
    discovery_tick(d, kb, net);
    std::size_t known = 0;
    for (int i = 0; i < kb.size(); ++i) {
      const auto& r = kb.known(i);
      const auto& c = kb.candidates(i);
      CHECK(std::is_sorted(r.begin(), r.end()));
      CHECK(std::includes(c.begin(), c.end(), r.begin(), r.end()));
      known += r.size();
    }
    CHECK(known >= known_before);
    CHECK(discovery_complete(kb).missing <= missing_before);
    known_before = known;
    missing_before = discovery_complete(kb).missing;
  }
  CHECK(d.tick() == 40);
  for (const auto& e : d.log()) CHECK(candidate_test(net.ap(e.from), net.ap(e.to)));

  const long more = run_discovery_to_completion(d, kb, net, 100000);
  CHECK(more >= 0);
  CHECK(discovery_complete(kb).complete);
  CHECK(run_discovery_to_completion(d, kb, net, 10) == 0);
}

TEST_CASE("gossip spreads knowledge beyond direct contacts") {
  // Every AP is a candidate of every other; with gossip some pair must end
  // up knowing each other without ever sampling each other.
  bool indirect = false;
  for (std::uint64_t seed = 1; seed <= 10 && !indirect; ++seed) {
    const Networkd net = scatter(12, 20, 50, seed);
    KnowledgeBase kb(net);
    DiscoveryState d(seed, 12);
    run_discovery_to_completion(d, kb, net, 10000);
    std::set<std::pair<ApId, ApId>> met;
    for (const auto& e : d.log()) met.insert({std::min(e.from, e.to), std::max(e.from, e.to)});
    indirect = met.size() < 12 * 11 / 2;
  }
  CHECK(indirect);
}

TEST_CASE("discovery is reproducible per seed") {
  const Networkd net = scatter(40, 300, 30, 3);
  auto run = [&](std::uint64_t seed) {
    KnowledgeBase kb(net);
    DiscoveryState d(seed, net.size());
    run_discovery_to_completion(d, kb, net, 100000);
    std::vector<std::tuple<long, ApId, ApId>> out;
    for (const auto& e : d.log()) out.emplace_back(e.tick, e.from, e.to);
    return out;
  };
  CHECK(run(5) == run(5));
  CHECK(run(5) != run(6));
  CHECK_THROWS_AS(DiscoveryState(1, 3, 0), std::invalid_argument);
}

TEST_CASE("knowledge CSV") {
  const Networkd net = line_network({0, 30, 200}, {10, 10, 10}, 2);
  KnowledgeBase kb(net);
  kb.learn(0, 1);
  Allocation s(3);
  s.set(1, 0, 1e-3);
  std::ostringstream out;
  write_knowledge_csv(out, kb, net, s);
  CHECK(out.str() == "ap_id,known_count,candidate_count,sufficient_flag\n0,1,1,1\n1,0,1,1\n2,0,0,0\n");
}
