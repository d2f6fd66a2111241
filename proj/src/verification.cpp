#include "apalloc/verification.hpp"

#include <ostream>
#include <sstream>

namespace apalloc {

Networkd symmetric_pair_network(double separation, double radius) {
  std::vector<AccessPointd> aps(2);
  for (int i = 0; i < 2; ++i) {
    aps[i].id = i;
    aps[i].position = {i * separation, 0.0};
    aps[i].coverage_radius = radius;
    aps[i].coordination_radius = 2 * radius;
    aps[i].sinr_target = 2;
    aps[i].channels = {0, 1};
  }
  PropagationModeld model;
  model.shadow_std_db = 0;
  model.mean_linear_gain = 1;
  return Networkd(std::move(aps), std::move(model), 2);
}

Allocation co_channel_start(const Networkd& net, ChannelId k) {
  Allocation state(net.size());
  for (int i = 0; i < net.size(); ++i) state.set(i, k, necessary_power(net, i, k, state));
  return state;
}

ScenarioConfig equal_radius_config(int num_aps, int num_channels, double radius, double area, std::uint64_t seed) {
  ScenarioConfig c;
  c.num_aps = num_aps;
  c.num_channels = num_channels;
  c.coverage_radius_min = c.coverage_radius_max = radius;
  c.area_width = c.area_height = area;
  c.seed = seed;
  return c;
}

namespace {

CheckResult exact_potential_check(std::uint64_t seed) {
  long violations = 0;
  double worst = 0;
  for (int inst = 0; inst < 10; ++inst) {
    const ScenarioConfig c = equal_radius_config(6 + inst % 5, 3, 10, 100, seed + inst);
    auto topo = make_stream(c.seed, 1);
    const Networkd net = generate_topology(c, topo);
    auto rng = make_stream(c.seed, 2);
    const auto report = verify_exact_potential(net, random_channels(net, c.max_power, rng), 200, 1e-9, rng);
    violations += report.violations;
    worst = std::max(worst, report.max_violation);
  }
  std::ostringstream s;
  s << "10 instances x 200 deviations, violations=" << violations << " max|du-dP|=" << worst;
  return {"exact-potential", violations == 0, s.str()};
}

CheckResult nash_check(std::uint64_t seed) {
  int converged = 0;
  int equilibria = 0;
  for (int inst = 0; inst < 50; ++inst) {
    ScenarioConfig c;
    c.num_aps = 2 + inst % 5;
    c.num_channels = 3;
    c.area_width = c.area_height = 60;
    c.seed = seed + inst;
    auto topo = make_stream(c.seed, 1);
    const Networkd net = generate_topology(c, topo);
    auto rng = make_stream(c.seed, 2);
    const KnowledgeFn all = full_knowledge(net.size());
    const RunResult r = run_dynamics(net, random_allocation(net, rng), all, DynamicsOptions{}, rng);
    if (!r.converged) continue;
    ++converged;
    equilibria += is_nash_equilibrium(net, r.state, all) ? 1 : 0;
  }
  std::ostringstream s;
  s << equilibria << "/" << converged << " converged profiles are equilibria";
  return {"nash-at-convergence", converged > 0 && equilibria == converged, s.str()};
}

CheckResult synchronous_cycle_check() {
  const Networkd net = symmetric_pair_network();
  const Allocation start = co_channel_start(net);
  const KnowledgeFn all = full_knowledge(2);
  std::mt19937_64 rng(0);

  DynamicsOptions sync;
  sync.timing = TimingModel::synchronous();
  sync.max_rounds = 10;
  const RunResult a = run_dynamics(net, start, all, sync, rng);

  const RunResult b = run_dynamics(net, start, all, DynamicsOptions{}, rng);
  std::ostringstream s;
  s << "synchronous cycle=" << a.cycle_detected << " after " << a.activations
    << " iterations; round-robin converged=" << b.converged << " in " << b.iterations << " rounds";
  return {"synchronous-cycle", a.cycle_detected && !a.converged && b.converged && b.iterations <= 3, s.str()};
}

CheckResult ordinal_check(std::uint64_t seed) {
  long strict = 0;
  long violations = 0;
  int converged = 0;
  for (int inst = 0; inst < 10; ++inst) {
    ScenarioConfig c;
    c.num_aps = 30;
    c.num_channels = 5;
    c.shadow_std_db = 0;
    c.seed = seed + inst;
    auto topo = make_stream(c.seed, 1);
    const Networkd net = generate_topology(c, topo);
    auto rng = make_stream(c.seed, 2);
    const RunResult r = run_dynamics(net, random_allocation(net, rng), full_knowledge(net.size()), DynamicsOptions{}, rng);
    const OrdinalReport report = verify_ordinal_improvement(r.trace, r.trace.flavor);
    strict += report.strict_improvements;
    violations += static_cast<long>(report.violations.size());
    converged += r.converged ? 1 : 0;
  }
  std::ostringstream s;
  s << "full knowledge, no shadowing: " << violations << " violations in " << strict << " strict improvements, "
    << converged << "/10 converged";
  return {"ordinal-improvement", violations == 0, s.str()};
}

CheckResult selfish_check(std::uint64_t seed) {
  int converged = 0;
  for (int inst = 0; inst < 20; ++inst) {
    const ScenarioConfig c = equal_radius_config(30, 5, 20, 1000, seed + inst);
    auto topo = make_stream(c.seed, 1);
    const Networkd net = generate_topology(c, topo);
    auto rng = make_stream(c.seed, 3);
    converged += run_selfish(net, TimingModel::round_robin(), c.max_iterations, rng).converged ? 1 : 0;
  }
  std::ostringstream s;
  s << converged << "/20 equal-radius selfish runs converged";
  return {"selfish-equal-radii", converged == 20, s.str()};
}

}  // namespace

std::vector<CheckResult> run_property_suite(std::uint64_t seed) {
  return {exact_potential_check(seed), nash_check(seed), synchronous_cycle_check(), ordinal_check(seed),
          selfish_check(seed)};
}

void write_checks(std::ostream& out, const std::vector<CheckResult>& checks) {
  for (const auto& c : checks) out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
}

}  // namespace apalloc
