#include "apalloc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace apalloc {

void ScenarioConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("invalid config: " + what);
  };
  require(num_aps >= 1, "num_aps must be >= 1");
  require(area_width > 0 && area_height > 0, "area must be positive");
  require(num_channels >= 1, "num_channels must be >= 1");
  require(max_power > 0, "max_power must be > 0");
  require(sinr_target_low > 0 && sinr_target_low <= sinr_target_high, "need 0 < sinr_target_low <= sinr_target_high");
  require(coverage_radius_min > 0 && coverage_radius_min <= coverage_radius_max,
          "need 0 < coverage_radius_min <= coverage_radius_max");
  require(coverage_radius_max <= std::min(area_width, area_height), "coverage_radius_max exceeds the area");
  require(coordination_factor >= 1, "coordination_factor must be >= 1");
  require(path_loss_exponent >= 2, "path_loss_exponent must be >= 2");
  require(shadow_std_db >= 0, "shadow_std_db must be >= 0");
  require(min_separation > 0, "min_separation must be > 0");
  require(noise_power > 0, "noise_power must be > 0");
  require(max_iterations >= 1, "max_iterations must be >= 1");
  require(samples_per_tick >= 1, "samples_per_tick must be >= 1");
  require(duration > 0, "duration must be > 0");
  require(allocation_period >= 1, "allocation_period must be >= 1 s");
  require(placement == "uniform" || placement == "clustered", "placement must be uniform or clustered");
  require(num_clusters >= 1, "num_clusters must be >= 1");
  require(cluster_std > 0, "cluster_std must be > 0");
  try {
    TimingModel{parse_timing(timing), async_subset}.validate(num_aps);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
}

std::vector<std::pair<std::string, ConfigField>> config_fields(ScenarioConfig& c) {
  return {
      {"num_aps", &c.num_aps},
      {"area_width", &c.area_width},
      {"area_height", &c.area_height},
      {"num_channels", &c.num_channels},
      {"max_power", &c.max_power},
      {"sinr_target_low", &c.sinr_target_low},
      {"sinr_target_high", &c.sinr_target_high},
      {"coverage_radius_min", &c.coverage_radius_min},
      {"coverage_radius_max", &c.coverage_radius_max},
      {"coordination_factor", &c.coordination_factor},
      {"path_loss_exponent", &c.path_loss_exponent},
      {"shadow_mean_db", &c.shadow_mean_db},
      {"shadow_std_db", &c.shadow_std_db},
      {"min_separation", &c.min_separation},
      {"noise_power", &c.noise_power},
      {"max_iterations", &c.max_iterations},
      {"seed", &c.seed},
      {"samples_per_tick", &c.samples_per_tick},
      {"duration", &c.duration},
      {"allocation_period", &c.allocation_period},
      {"placement", &c.placement},
      {"num_clusters", &c.num_clusters},
      {"cluster_std", &c.cluster_std},
      {"timing", &c.timing},
      {"async_subset", &c.async_subset},
  };
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T value{};
  in >> value;
  if (in.fail() || !(in >> std::ws).eof()) throw ConfigError("invalid value '" + text + "' for " + key);
  return value;
}

}  // namespace

void set_config_value(ScenarioConfig& config, const std::string& key, const std::string& value) {
  for (auto& [name, field] : config_fields(config)) {
    if (name != key) continue;
    std::visit(
        [&](auto* p) {
          using T = std::remove_pointer_t<decltype(p)>;
          if constexpr (std::is_same_v<T, std::string>)
            *p = value;
          else
            *p = parse_number<T>(key, value);
        },
        field);
    return;
  }
  throw ConfigError("unknown config key '" + key + "'");
}

void apply_config_text(ScenarioConfig& config, std::istream& in, const std::string& origin) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(origin + ":" + std::to_string(number) + ": expected key = value");
    try {
      set_config_value(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

void apply_config_file(ScenarioConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  apply_config_text(config, in, path.string());
}

void write_config(std::ostream& out, const ScenarioConfig& config) {
  ScenarioConfig copy = config;
  const auto old = out.precision(12);
  for (auto& [name, field] : config_fields(copy))
    std::visit([&](auto* p) { out << name << " = " << *p << '\n'; }, field);
  out.precision(old);
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint32_t purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), purpose};
  return std::mt19937_64(seq);
}

namespace {

enum Stream : std::uint32_t {
  kTopology = 1,
  kInitialAllocation = 2,
  kSelfish = 3,
  kBound = 4,
  kGame = 5,
  kDiscovery = 6,
  kInsertion = 7,
};

// Draws one AP like generate_topology does. Cluster centers are drawn by the
// caller.
AccessPointd draw_ap(const ScenarioConfig& c, ApId id, const std::vector<Point2<double>>& centers,
                     std::mt19937_64& rng) {
  AccessPointd ap;
  ap.id = id;
  if (c.placement == "clustered") {
    const auto& center = centers[std::uniform_int_distribution<std::size_t>(0, centers.size() - 1)(rng)];
    std::normal_distribution<double> offset(0.0, c.cluster_std);
    ap.position.x() = std::clamp(center.x() + offset(rng), 0.0, c.area_width);
    ap.position.y() = std::clamp(center.y() + offset(rng), 0.0, c.area_height);
  } else {
    ap.position.x() = std::uniform_real_distribution<double>(0, c.area_width)(rng);
    ap.position.y() = std::uniform_real_distribution<double>(0, c.area_height)(rng);
  }
  ap.sinr_target = std::uniform_real_distribution<double>(c.sinr_target_low, c.sinr_target_high)(rng);
  ap.coverage_radius = std::uniform_real_distribution<double>(c.coverage_radius_min, c.coverage_radius_max)(rng);
  ap.coordination_radius = c.coordination_factor * c.coverage_radius_max;
  ap.max_power = c.max_power;
  ap.channels.resize(c.num_channels);
  for (int k = 0; k < c.num_channels; ++k) ap.channels[k] = k;
  return ap;
}

std::vector<Point2<double>> draw_centers(const ScenarioConfig& c, std::mt19937_64& rng) {
  std::vector<Point2<double>> centers;
  if (c.placement != "clustered") return centers;
  for (int m = 0; m < c.num_clusters; ++m)
    centers.emplace_back(std::uniform_real_distribution<double>(0, c.area_width)(rng),
                         std::uniform_real_distribution<double>(0, c.area_height)(rng));
  return centers;
}

PropagationModeld make_model(const ScenarioConfig& c) {
  PropagationModeld model;
  model.path_loss_exponent = c.path_loss_exponent;
  model.shadow_mean_db = c.shadow_mean_db;
  model.shadow_std_db = c.shadow_std_db;
  model.mean_linear_gain = lognormal_linear_mean(c.shadow_mean_db, c.shadow_std_db);
  model.min_separation = c.min_separation;
  model.noise_power = c.noise_power;
  return model;
}

}  // namespace

Networkd generate_topology(const ScenarioConfig& config, std::mt19937_64& rng) {
  config.validate();
  const auto centers = draw_centers(config, rng);
  std::vector<AccessPointd> aps;
  aps.reserve(config.num_aps);
  for (int i = 0; i < config.num_aps; ++i) aps.push_back(draw_ap(config, i, centers, rng));
  PropagationModeld model = make_model(config);
  model.shadow_samples = sample_shadowing(config.num_aps, config.shadow_mean_db, config.shadow_std_db, rng);
  return Networkd(std::move(aps), std::move(model), config.num_channels);
}

Networkd insert_aps(const Networkd& net, const ScenarioConfig& config, int count, std::mt19937_64& rng) {
  ScenarioConfig uniform = config;
  uniform.placement = "uniform";
  std::vector<AccessPointd> aps = net.aps();
  const int n = net.size() + count;
  for (int i = net.size(); i < n; ++i) aps.push_back(draw_ap(uniform, i, {}, rng));
  PropagationModeld model = net.model();
  model.shadow_samples = extend_shadowing(model.shadow_samples, n, model.shadow_mean_db, model.shadow_std_db, rng);
  return Networkd(std::move(aps), std::move(model), net.num_channels());
}

namespace {

DynamicsOptions game_options(const ScenarioConfig& c) {
  DynamicsOptions o;
  o.timing = {parse_timing(c.timing), c.async_subset};
  o.responder = Responder::BestResponse;
  o.max_rounds = c.max_iterations;
  o.record_trace = false;
  return o;
}

int count_channel_changes(const Allocation& before, const Allocation& after) {
  int changes = 0;
  const int n = std::min(before.size(), after.size());
  for (int i = 0; i < n; ++i) changes += before.channel[i] != after.channel[i] ? 1 : 0;
  return changes;
}

long ticks_per_period(const ScenarioConfig& c) { return std::max<long>(1, std::lround(c.allocation_period)); }

int num_periods(const ScenarioConfig& c) { return static_cast<int>(std::floor(c.duration / c.allocation_period + 1e-9)); }

}  // namespace

MetricsSeries run_experiment(const ScenarioConfig& config) {
  config.validate();
  auto topo_rng = make_stream(config.seed, kTopology);
  auto alloc_rng = make_stream(config.seed, kInitialAllocation);
  auto selfish_rng = make_stream(config.seed, kSelfish);
  auto bound_rng = make_stream(config.seed, kBound);
  auto game_rng = make_stream(config.seed, kGame);

  const Networkd net = generate_topology(config, topo_rng);
  KnowledgeBase kb(net);
  DiscoveryState discovery(make_stream(config.seed, kDiscovery)(), net.size(), config.samples_per_tick);

  const Allocation start = random_allocation(net, alloc_rng);
  const int random_satisfied = count_satisfied(net, start);
  const int bound_satisfied = greedy_admission_bound(net, bound_rng).satisfied;

  DynamicsOptions game_opts = game_options(config);
  DynamicsOptions selfish_opts = game_opts;
  selfish_opts.responder = Responder::Selfish;

  Allocation game = start;
  Allocation selfish = start;
  MetricsSeries series;
  for (int step = 1; step <= num_periods(config); ++step) {
    for (long t = 0; t < ticks_per_period(config); ++t) discovery_tick(discovery, kb, net);

    RunResult g = run_dynamics(net, game, kb.snapshot(), game_opts, game_rng);
    RunResult s = run_dynamics(net, selfish, no_knowledge(), selfish_opts, selfish_rng);

    MetricsRow row;
    row.time = step * config.allocation_period;
    row.num_aps = net.size();
    row.channel_changes = count_channel_changes(game, g.state);
    row.satisfied_game = count_satisfied(net, g.state);
    row.satisfied_selfish = count_satisfied(net, s.state);
    row.satisfied_random = random_satisfied;
    row.satisfied_bound = bound_satisfied;
    row.converged_game = g.converged ? 1 : 0;
    row.iterations_game = g.converged ? g.iterations : config.max_iterations;
    row.missing_candidates = discovery_complete(kb).missing;
    series.rows.push_back(row);

    game = std::move(g.state);
    selfish = std::move(s.state);
  }
  return series;
}

MetricsSeries domino_experiment(const ScenarioConfig& config, int num_inserted, double insert_time) {
  config.validate();
  if (num_inserted < 0) throw ConfigError("num_inserted must be >= 0");
  auto topo_rng = make_stream(config.seed, kTopology);
  auto alloc_rng = make_stream(config.seed, kInitialAllocation);
  auto game_rng = make_stream(config.seed, kGame);
  auto insert_rng = make_stream(config.seed, kInsertion);

  Networkd net = generate_topology(config, topo_rng);
  KnowledgeBase kb(net);
  DiscoveryState discovery(make_stream(config.seed, kDiscovery)(), net.size(), config.samples_per_tick);
  Allocation game = random_allocation(net, alloc_rng);
  const DynamicsOptions opts = game_options(config);

  bool inserted = false;
  MetricsSeries series;
  for (int step = 1; step <= num_periods(config); ++step) {
    const double time = step * config.allocation_period;
    Allocation previous = game;
    if (!inserted && time >= insert_time) {
      inserted = true;
      net = insert_aps(net, config, num_inserted, insert_rng);
      kb.extend(net);
      discovery.extend(net.size());
      Allocation grown(net.size());
      for (int i = 0; i < game.size(); ++i) grown.set(i, game.channel[i], game.power(i));
      for (int i = game.size(); i < net.size(); ++i) {
        const auto& channels = net.ap(i).channels;
        const ChannelId k = channels[std::uniform_int_distribution<std::size_t>(0, channels.size() - 1)(insert_rng)];
        grown.set(i, k, necessary_power(net, i, k, grown));
      }
      game = std::move(grown);
      previous = game;
    }
    for (long t = 0; t < ticks_per_period(config); ++t) discovery_tick(discovery, kb, net);

    RunResult g = run_dynamics(net, game, kb.snapshot(), opts, game_rng);
    MetricsRow row;
    row.time = time;
    row.num_aps = net.size();
    row.channel_changes = count_channel_changes(previous, g.state);
    row.satisfied_game = count_satisfied(net, g.state);
    row.converged_game = g.converged ? 1 : 0;
    row.iterations_game = g.converged ? g.iterations : config.max_iterations;
    row.missing_candidates = discovery_complete(kb).missing;
    series.rows.push_back(row);
    game = std::move(g.state);
  }
  return series;
}

std::vector<SweepRow> discovery_sweep(const ScenarioConfig& base, const std::vector<int>& densities,
                                      const std::vector<std::uint64_t>& seeds, long max_ticks) {
  std::vector<SweepRow> rows;
  for (int n : densities) {
    for (std::uint64_t seed : seeds) {
      ScenarioConfig c = base;
      c.num_aps = n;
      c.seed = seed;
      auto topo_rng = make_stream(seed, kTopology);
      const Networkd net = generate_topology(c, topo_rng);
      KnowledgeBase kb(net);
      DiscoveryState discovery(make_stream(seed, kDiscovery)(), net.size(), c.samples_per_tick);
      rows.push_back({n, seed, run_discovery_to_completion(discovery, kb, net, max_ticks)});
    }
  }
  return rows;
}

namespace {

constexpr const char* kMetricsHeader =
    "time,num_aps,satisfied_game,satisfied_selfish,satisfied_random,satisfied_bound,iterations_game,"
    "converged_game,missing_candidates,channel_changes";

}  // namespace

void write_metrics_csv(std::ostream& out, const MetricsSeries& series) {
  const auto old = out.precision(12);
  out << kMetricsHeader << '\n';
  for (const auto& r : series.rows)
    out << r.time << ',' << r.num_aps << ',' << r.satisfied_game << ',' << r.satisfied_selfish << ','
        << r.satisfied_random << ',' << r.satisfied_bound << ',' << r.iterations_game << ',' << r.converged_game << ','
        << r.missing_candidates << ',' << r.channel_changes << '\n';
  out.precision(old);
}

MetricsSeries parse_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kMetricsHeader) throw IoError("metrics CSV: unexpected header");
  MetricsSeries series;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(trim(cell));
    if (cells.size() != 10) throw IoError("metrics CSV line " + std::to_string(number) + ": expected 10 columns");
    try {
      MetricsRow r;
      r.time = std::stod(cells[0]);
      int* ints[] = {&r.num_aps,         &r.satisfied_game, &r.satisfied_selfish, &r.satisfied_random,
                     &r.satisfied_bound, &r.iterations_game, &r.converged_game,   &r.missing_candidates,
                     &r.channel_changes};
      for (int c = 0; c < 9; ++c) *ints[c] = std::stoi(cells[c + 1]);
      series.rows.push_back(r);
    } catch (const std::logic_error&) {
      throw IoError("metrics CSV line " + std::to_string(number) + ": malformed number");
    }
  }
  return series;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "num_aps,seed,completion_ticks\n";
  for (const auto& r : rows) out << r.num_aps << ',' << r.seed << ',' << r.completion_ticks << '\n';
}

std::vector<std::filesystem::path> export_results(const MetricsSeries& series, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, auto&& body) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.precision(12);
    body(out);
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
    written.push_back(path);
  };

  emit("metrics.csv", [&](std::ostream& out) { write_metrics_csv(out, series); });
  emit("satisfied.dat", [&](std::ostream& out) {
    out << "# time game selfish random bound\n";
    for (const auto& r : series.rows)
      out << r.time << ' ' << r.satisfied_game << ' ' << r.satisfied_selfish << ' ' << r.satisfied_random << ' '
          << r.satisfied_bound << '\n';
  });
  emit("convergence.dat", [&](std::ostream& out) {
    out << "# time iterations missing_candidates\n";
    for (const auto& r : series.rows) out << r.time << ' ' << r.iterations_game << ' ' << r.missing_candidates << '\n';
  });
  emit("domino.dat", [&](std::ostream& out) {
    out << "# time channel_changes satisfied_game\n";
    for (const auto& r : series.rows) out << r.time << ' ' << r.channel_changes << ' ' << r.satisfied_game << '\n';
  });
  return written;
}

}  // namespace apalloc
