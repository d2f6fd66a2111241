#include "apalloc/schedulers.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace apalloc;
using apalloc::test::line_network;

namespace {

// Random deployment in a square with sampled shadowing.
Networkd random_network(int n, int k, double side, std::uint64_t seed, bool equal_radii, double shadow_db = 8) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0, side), radius(3, 20), beta(1, 6);
  std::vector<AccessPointd> aps(n);
  for (int i = 0; i < n; ++i) {
    aps[i].id = i;
    aps[i].position = {pos(rng), pos(rng)};
    aps[i].coverage_radius = equal_radii ? 10 : radius(rng);
    aps[i].coordination_radius = 40;
    aps[i].sinr_target = beta(rng);
    for (int c = 0; c < k; ++c) aps[i].channels.push_back(c);
  }
  PropagationModeld model;
  model.shadow_std_db = shadow_db;
  model.mean_linear_gain = lognormal_linear_mean(0.0, shadow_db);
  model.shadow_samples = sample_shadowing(n, 0.0, shadow_db, rng);
  return Networkd(std::move(aps), std::move(model), k);
}

Allocation profile_from_index(const Networkd& net, long index, double power) {
  Allocation s(net.size());
  for (int i = 0; i < net.size(); ++i) {
    s.set(i, static_cast<ChannelId>(index % net.num_channels()), power);
    index /= net.num_channels();
  }
  return s;
}

// Independent utility: measured interference plus estimated caused
// interference towards every other AP, at the given own power.
double oracle_utility(const Networkd& net, const Allocation& s, ApId i, ChannelId k, double own_power) {
  double received = 0, caused = 0;
  for (int j = 0; j < net.size(); ++j) {
    if (j == i || s.channel[j] != k) continue;
    received += s.power(j) * net.true_gains()(j, i);
    caused += net.estimated_gains()(i, j);
  }
  return -received - own_power * caused;
}

double oracle_necessary(const Networkd& net, const Allocation& s, ApId i, ChannelId k) {
  double received = 0;
  for (int j = 0; j < net.size(); ++j)
    if (j != i && s.channel[j] == k) received += s.power(j) * net.true_gains()(j, i);
  const auto& ap = net.ap(i);
  const double edge = std::pow(ap.coverage_radius, -net.model().path_loss_exponent) * net.model().mean_linear_gain;
  return std::min(ap.sinr_target * (net.model().noise_power + received) / edge, ap.max_power);
}

bool oracle_nash(const Networkd& net, const Allocation& s, std::optional<double> fixed) {
  for (int i = 0; i < net.size(); ++i) {
    auto own = [&](ChannelId k) { return fixed ? *fixed : oracle_necessary(net, s, i, k); };
    const double here = oracle_utility(net, s, i, s.channel[i], own(s.channel[i]));
    for (int k = 0; k < net.num_channels(); ++k)
      if (k != s.channel[i] && oracle_utility(net, s, i, k, own(k)) > here) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("utility and best response") {
  const Networkd net = line_network({0, 30}, {10, 10}, 2);
  Allocation s(2);
  s.set(1, 0, 1e-3);
  s.set(0, 0, 1e-3);

  const UtilityContext ctx = make_context(net, 0, {1}, s);
  CHECK(ctx.interference(0) == doctest::Approx(1.25e-7));
  CHECK(ctx.outgoing(0) == doctest::Approx(1.25e-4));
  CHECK(ctx.outgoing(1) == 0);
  CHECK(ctx.power(0) == doctest::Approx(0.00027));
  CHECK(utility(ctx, 0) == doctest::Approx(-1.25e-7 - 0.00027 * 1.25e-4));
  CHECK(utility(ctx, 1) == 0);

  const Strategy br = best_response(net, ctx, s);
  CHECK(br.channel == 1);
  CHECK(br.power == doctest::Approx(2e-5));

  CHECK_THROWS_AS(make_context(net, 0, {0}, s), std::invalid_argument);
}

TEST_CASE("best response ties keep the current channel, otherwise the lowest id") {
  const Networkd net = line_network({0}, {10}, 3);
  Allocation s(1);
  CHECK(best_response(net, make_context(net, 0, {}, s), s).channel == 0);
  s.set(0, 2, 1e-3);
  CHECK(best_response(net, make_context(net, 0, {}, s), s).channel == 2);
  CHECK(selfish_response(net, 0, s).channel == 2);
}

TEST_CASE("selfish response ignores caused interference") {
  // AP 1 sits right at the coverage edge on channel 0 with tiny power; AP 2
  // is far on channel 1 with full power. Measured interference favors
  // channel 0, the interference caused at AP 1 favors channel 1.
  const Networkd net = line_network({0, 11, 100}, {10, 10, 10}, 2);
  Allocation s(3);
  s.set(1, 0, 1e-9);
  s.set(2, 1, 0.1);
  s.set(0, 1, 1e-3);
  CHECK(selfish_response(net, 0, s).channel == 0);
  CHECK(selfish_response(net, 0, s, {0.05}).power == 0.05);
  CHECK(best_response(net, make_context(net, 0, {1}, s), s).channel == 1);
}

TEST_CASE("two-AP potentials by hand") {
  const Networkd net = line_network({0, 30}, {10, 10}, 2);
  const double g = 1.25e-4;
  Allocation s(2);
  CHECK(exact_potential_full(net, s).value == 0);
  CHECK(appendix_b_potential(net, s).value == 0);

  s.set(0, 0, 0.01);
  s.set(1, 0, 0.02);
  CHECK(exact_potential_full(net, s).value == doctest::Approx(-g * 0.03));
  CHECK(appendix_b_potential(net, s).value == doctest::Approx(2 * g * 0.01 * 0.02));
  CHECK(appendix_a_potential(net, s, full_knowledge(2)).value == doctest::Approx(-2 * g * 0.03));
  CHECK(appendix_a_potential(net, s, no_knowledge()).value == doctest::Approx(-g * 0.03));
  CHECK(evaluate_potential(PotentialFlavor::AppendixBSelfish, net, s, no_knowledge()).flavor ==
        PotentialFlavor::AppendixBSelfish);

  s.set(1, 1, 0.02);
  CHECK(exact_potential_full(net, s).value == 0);
  CHECK(appendix_b_potential(net, s).value == 0);
  CHECK(appendix_a_potential(net, s, full_knowledge(2)).value == 0);
}

TEST_CASE("termwise potential change matches the difference of totals") {
  const Networkd net = random_network(12, 3, 80, 5, false);
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> ap(0, 11), ch(0, 2);
  std::uniform_real_distribution<double> p(1e-4, 0.1);
  Allocation s(12);
  for (int i = 0; i < 12; ++i) s.set(i, ch(rng), p(rng));
  const KnowledgeFn know = static_knowledge({{1, 2}, {0}, {}, {4, 5, 6}, {}, {}, {}, {}, {}, {}, {}, {0, 1, 2, 3}});
  for (int t = 0; t < 50; ++t) {
    Allocation next = s;
    next.set(ap(rng), ch(rng), p(rng));
    for (auto f : {PotentialFlavor::ExactFull, PotentialFlavor::AppendixALocal, PotentialFlavor::AppendixBSelfish}) {
      const double direct =
          evaluate_potential(f, net, next, know).value - evaluate_potential(f, net, s, know).value;
      CHECK(potential_change(f, net, s, next, know) == doctest::Approx(direct).epsilon(1e-9));
    }
    CHECK(potential_change(PotentialFlavor::ExactFull, net, s, s, know) == 0);
    s = next;
  }
}

TEST_CASE("nash equilibrium small cases") {
  SUBCASE("single AP") {
    const Networkd net = line_network({0}, {10}, 3);
    Allocation s(1);
    s.set(0, 1, necessary_power(net, 0, 1, s));
    CHECK(is_nash_equilibrium(net, s, full_knowledge(1)));
  }
  SUBCASE("orthogonal pair") {
    const Networkd net = line_network({0, 30}, {10, 10}, 2);
    Allocation s(2);
    s.set(0, 0, 1e-4);
    s.set(1, 1, 1e-4);
    CHECK(is_nash_equilibrium(net, s, full_knowledge(2)));
  }
  SUBCASE("forced co-channel") {
    const Networkd net = line_network({0, 30}, {10, 10}, 1);
    Allocation s(2);
    s.set(0, 0, 1e-4);
    s.set(1, 0, 1e-4);
    CHECK(is_nash_equilibrium(net, s, full_knowledge(2)));
  }
  SUBCASE("co-channel with a free channel") {
    const Networkd net = line_network({0, 30}, {10, 10}, 2);
    Allocation s(2);
    s.set(0, 0, 1e-4);
    s.set(1, 0, 1e-4);
    CHECK_FALSE(is_nash_equilibrium(net, s, full_knowledge(2)));
  }
  SUBCASE("an off AP is not in equilibrium") {
    const Networkd net = line_network({0, 30}, {10, 10}, 2);
    Allocation s(2);
    s.set(0, 0, 1e-4);
    CHECK_FALSE(is_nash_equilibrium(net, s, full_knowledge(2)));
  }
}

TEST_CASE("nash check refuses oversized instances") {
  std::vector<AccessPointd> aps(1000);
  for (int i = 0; i < 1000; ++i) {
    aps[i].id = i;
    aps[i].position = {i * 1.0, 0.0};
    aps[i].channels = {0};
  }
  const Networkd net(std::move(aps), PropagationModeld{}, 1001);
  CHECK_THROWS_AS(is_nash_equilibrium(net, Allocation(1000), no_knowledge()), std::length_error);
}

TEST_CASE("nash check agrees with brute-force enumeration") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const Networkd net = random_network(5, 3, 60, seed, seed % 2 == 0);
    const KnowledgeFn all = full_knowledge(5);
    int equilibria = 0;
    for (long idx = 0; idx < 243; ++idx) {
      const Allocation s = profile_from_index(net, idx, 0.01);
      const bool fixed = is_nash_equilibrium(net, s, all, {0.01});
      CHECK(fixed == oracle_nash(net, s, 0.01));
      CHECK(is_nash_equilibrium(net, s, all) == oracle_nash(net, s, std::nullopt));
      equilibria += fixed ? 1 : 0;
    }
    CHECK(equilibria > 0);
  }
}

TEST_CASE("exact potential under equal radii and uniform power") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Networkd net = random_network(6 + static_cast<int>(seed), 3, 100, seed, true);
    std::mt19937_64 rng(seed);
    Allocation s(net.size());
    for (int i = 0; i < net.size(); ++i) s.set(i, static_cast<ChannelId>(rng() % 3), 0.1);
    const auto report = verify_exact_potential(net, s, 500, 1e-9, rng);
    CHECK(report.trials == 500);
    CHECK(report.exact());
    CHECK(report.max_violation <= 1e-9);
    CHECK(report.raw_to_payoff_ratio == doctest::Approx(2.0).epsilon(1e-9));
  }
}

TEST_CASE("exact potential breaks with unequal radii") {
  const Networkd net = line_network({0, 30}, {5, 15}, 2);
  Allocation s(2);
  s.set(0, 0, 0.1);
  s.set(1, 0, 0.1);
  std::mt19937_64 rng(2);
  const auto report = verify_exact_potential(net, s, 200, 1e-12, rng);
  CHECK_FALSE(report.exact());
  CHECK(report.violations > 0);

  std::ostringstream out;
  write_findings(out, report.findings);
  CHECK(out.str().find("verdict=violation") != std::string::npos);
}

TEST_CASE("exact potential: same-channel deviations change nothing") {
  const Networkd net = line_network({0, 30, 60}, {10, 10, 10}, 1);
  Allocation s(3);
  for (int i = 0; i < 3; ++i) s.set(i, 0, 0.1);
  std::mt19937_64 rng(1);
  const auto report = verify_exact_potential(net, s, 20, 0.0, rng);
  CHECK(report.exact());
  for (const auto& f : report.findings) {
    CHECK(f.utility_change == 0);
    CHECK(f.potential_change == 0);
  }
  s.set(1, kOff, 0);
  CHECK_THROWS_AS(verify_exact_potential(net, s, 5, 1e-9, rng), std::invalid_argument);
}

TEST_CASE("ordinal improvement checker") {
  SUBCASE("empty trace passes") {
    CHECK(verify_ordinal_improvement(DynamicsTrace{}, PotentialFlavor::ExactFull).ok());
  }
  SUBCASE("flavor must match the trace") {
    DynamicsTrace t;
    t.flavor = PotentialFlavor::ExactFull;
    t.moves.push_back({});
    CHECK_THROWS_AS(verify_ordinal_improvement(t, PotentialFlavor::AppendixALocal), std::invalid_argument);
  }
  SUBCASE("hand-made records") {
    DynamicsTrace t;
    t.flavor = PotentialFlavor::AppendixALocal;
    MoveRecord up;
    up.utility_before = -2;
    up.utility_after = -1;
    up.potential_change = 0.5;
    MoveRecord bad = up;
    bad.potential_change = -0.5;
    MoveRecord flat = up;
    flat.utility_after = -2;
    flat.potential_change = -1;
    MoveRecord sync = bad;
    sync.simultaneous = true;
    MoveRecord noise = bad;
    noise.utility_after = -2 + 1e-12;
    t.moves = {up, bad, flat, sync, noise};
    const auto report = verify_ordinal_improvement(t, PotentialFlavor::AppendixALocal);
    CHECK(report.records == 5);
    CHECK(report.skipped_simultaneous == 1);
    CHECK(report.strict_improvements == 2);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].utility_change == doctest::Approx(1));
    CHECK(report.violations[0].potential_change == doctest::Approx(-0.5));
    CHECK(verify_ordinal_improvement(t, PotentialFlavor::AppendixALocal, 0.0).violations.size() == 2);
  }
  SUBCASE("full knowledge with exact gain estimates never violates") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Networkd net = random_network(25, 4, 300, seed, false, 0);
      std::mt19937_64 rng(seed);
      Allocation start(net.size());
      for (int i = 0; i < net.size(); ++i) start.set(i, static_cast<ChannelId>(rng() % 4), 0.01);
      DynamicsOptions o;
      o.flavor = PotentialFlavor::ExactFull;
      const RunResult r = run_dynamics(net, start, full_knowledge(net.size()), o, rng);
      const auto report = verify_ordinal_improvement(r.trace, PotentialFlavor::ExactFull);
      CHECK(report.strict_improvements > 0);
      CHECK(report.ok());
    }
  }
  SUBCASE("without neighbor knowledge the potential is not monotone") {
    bool witnessed = false;
    for (std::uint64_t seed = 1; seed <= 20 && !witnessed; ++seed) {
      const Networkd net = random_network(20, 3, 100, seed, false);
      std::mt19937_64 rng(seed);
      Allocation start(net.size());
      for (int i = 0; i < net.size(); ++i) start.set(i, static_cast<ChannelId>(rng() % 3), 0.01);
      const RunResult r = run_dynamics(net, start, no_knowledge(), DynamicsOptions{}, rng);
      witnessed = !verify_ordinal_improvement(r.trace, r.trace.flavor).ok() || !r.converged;
    }
    CHECK(witnessed);
  }
}

TEST_CASE("lowering power never hurts other APs") {
  const Networkd net = random_network(10, 2, 80, 4, false);
  const KnowledgeFn all = full_knowledge(10);
  Allocation s(10);
  for (int i = 0; i < 10; ++i) s.set(i, i % 2, 0.05);
  Allocation lower = s;
  lower.set(3, s.channel[3], 0.01);
  for (int j = 0; j < 10; ++j) {
    if (j == 3) continue;
    const double before = utility(make_context(net, j, all(j, s), s), s.channel[j]);
    const double after = utility(make_context(net, j, all(j, lower), lower), lower.channel[j]);
    CHECK(after >= before);
  }
}

TEST_CASE("local optimality") {
  SUBCASE("one co-channel neighbor") {
    const Networkd net = line_network({0, 30}, {10, 10}, 2);
    Allocation s(2);
    s.set(1, 0, 1e-3);
    CHECK(local_optimality_check(net, 0, s, {1}));
  }
  SUBCASE("equal radii, uniform power, exact estimates") {
    const Networkd net = random_network(8, 3, 60, 11, true, 0);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
      Allocation s(8);
      for (int i = 0; i < 8; ++i) s.set(i, static_cast<ChannelId>(rng() % 3), 0.02);
      for (int i = 0; i < 8; ++i) CHECK(local_optimality_check(net, i, s, full_knowledge(8)(i, s)));
    }
  }
  SUBCASE("near neighbor on the quiet channel") {
    const Networkd net = line_network({0, 30, 100}, {10, 10, 10}, 2);
    Allocation s(3);
    s.set(1, 0, 1e-6);
    s.set(2, 1, 0.1);
    CHECK_FALSE(local_optimality_check(net, 0, s, {1}));
  }
}

TEST_CASE("findings text format") {
  std::ostringstream out;
  write_findings(out, {{3, 0.5, 0.25, true, {}}, {4, 1, -2, false, "iteration=7"}});
  CHECK(out.str() == "mover=3 du=0.5 dP=0.25 verdict=ok\nmover=4 du=1 dP=-2 verdict=violation iteration=7\n");
}
