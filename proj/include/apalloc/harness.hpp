#pragma once

#include "apalloc/baselines.hpp"
#include "apalloc/knowledge.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace apalloc {

/// Invalid scenario configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File read or write failure, message carries the path (CLI exit code 2).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  int num_aps = 305;
  double area_width = 1000;   // meters
  double area_height = 1000;  // meters
  int num_channels = 13;
  double max_power = 0.1;  // watts
  double sinr_target_low = 1;
  double sinr_target_high = 6;
  double coverage_radius_min = 3;
  double coverage_radius_max = 20;  // d_transmit
  double coordination_factor = 2;
  double path_loss_exponent = 3;
  double shadow_mean_db = 0;
  double shadow_std_db = 8;
  double min_separation = 0.1;
  double noise_power = 1e-8;
  int max_iterations = 50;  // rounds
  std::uint64_t seed = 1;
  int samples_per_tick = 1;
  double duration = 300;           // seconds
  double allocation_period = 10;   // seconds between reports
  std::string placement = "uniform";  // or "clustered"
  int num_clusters = 20;
  double cluster_std = 30;  // meters
  std::string timing = "round-robin";
  int async_subset = 1;

  void validate() const;
};

using ConfigField = std::variant<int*, double*, std::uint64_t*, std::string*>;

/// Name and storage of every ScenarioConfig field, in declaration order.
std::vector<std::pair<std::string, ConfigField>> config_fields(ScenarioConfig& config);

/// Assigns one field from text. Throws ConfigError for unknown keys or
/// unparsable values.
void set_config_value(ScenarioConfig& config, const std::string& key, const std::string& value);

/// Applies "key = value" lines; '#' starts a comment. Throws ConfigError or
/// IoError.
void apply_config_text(ScenarioConfig& config, std::istream& in, const std::string& origin = "<config>");
void apply_config_file(ScenarioConfig& config, const std::filesystem::path& path);

void write_config(std::ostream& out, const ScenarioConfig& config);

/// Independent generator for one named purpose of a scenario.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint32_t purpose);

Networkd generate_topology(const ScenarioConfig& config, std::mt19937_64& rng);

/// Appends count APs drawn like generate_topology's, extending the shadowing
/// matrix.
Networkd insert_aps(const Networkd& net, const ScenarioConfig& config, int count, std::mt19937_64& rng);

struct MetricsRow {
  double time = 0;  // seconds
  int num_aps = 0;
  int satisfied_game = 0;
  int satisfied_selfish = 0;
  int satisfied_random = 0;
  int satisfied_bound = 0;
  int iterations_game = 0;  // rounds; max_iterations when not converged
  int converged_game = 0;
  int missing_candidates = 0;
  int channel_changes = 0;

  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

struct MetricsSeries {
  std::vector<MetricsRow> rows;

  friend bool operator==(const MetricsSeries&, const MetricsSeries&) = default;
};

/// Discovery and allocation advance together: each reporting interval runs
/// that many discovery ticks, then best-response dynamics with the current
/// knowledge. Selfish dynamics evolve alongside; the random allocation and
/// the greedy bound are computed once.
MetricsSeries run_experiment(const ScenarioConfig& config);

/// Like run_experiment for the game alone, with num_inserted APs added at
/// random positions when the clock reaches insert_time.
MetricsSeries domino_experiment(const ScenarioConfig& config, int num_inserted, double insert_time);

struct SweepRow {
  int num_aps = 0;
  std::uint64_t seed = 0;
  long completion_ticks = -1;  // -1: did not complete within the budget
};

/// Discovery completion time per density level and seed.
std::vector<SweepRow> discovery_sweep(const ScenarioConfig& base, const std::vector<int>& densities,
                                      const std::vector<std::uint64_t>& seeds, long max_ticks = 1'000'000);

void write_metrics_csv(std::ostream& out, const MetricsSeries& series);
MetricsSeries parse_metrics_csv(std::istream& in);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Writes metrics.csv plus satisfied.dat, convergence.dat and domino.dat
/// into dir (created if missing). Returns the paths written.
std::vector<std::filesystem::path> export_results(const MetricsSeries& series, const std::filesystem::path& dir);

}  // namespace apalloc
