// Command-line front end: run, domino, verify and sweep.

#include "apalloc/harness.hpp"
#include "apalloc/verification.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <numeric>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitVerify = 3;

// Flags shared by every subcommand. Values stay as text until the config
// file has been applied so that flags win over the file.
struct CommonArgs {
  std::string seed;
  std::string config_file;
  std::string out_dir = ".";
  std::map<std::string, std::string> fields;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--seed", args.seed, "Random seed")->required();
  cmd->add_option("--config", args.config_file, "key = value scenario file");
  cmd->add_option("--out", args.out_dir, "Output directory")->capture_default_str();
  apalloc::ScenarioConfig defaults;
  for (auto& [name, field] : apalloc::config_fields(defaults)) {
    if (name == "seed") continue;
    std::ostringstream def;
    std::visit([&](auto* p) { def << *p; }, field);
    cmd->add_option("--" + name, args.fields[name], "default " + def.str());
  }
}

apalloc::ScenarioConfig resolve(const CommonArgs& args, const CLI::App* cmd) {
  apalloc::ScenarioConfig config;
  if (!args.config_file.empty()) apalloc::apply_config_file(config, args.config_file);
  for (const auto& [name, value] : args.fields)
    if (cmd->count("--" + name) > 0) apalloc::set_config_value(config, name, value);
  apalloc::set_config_value(config, "seed", args.seed);
  config.validate();
  return config;
}

void report(const std::vector<std::filesystem::path>& written) {
  for (const auto& p : written) std::cout << "wrote " << p.string() << '\n';
}

void print_summary(const apalloc::MetricsSeries& series, bool baselines) {
  if (series.rows.empty()) return;
  const auto& last = series.rows.back();
  std::cout << "t=" << last.time << "s aps=" << last.num_aps << " satisfied game=" << last.satisfied_game;
  if (baselines)
    std::cout << " selfish=" << last.satisfied_selfish << " random=" << last.satisfied_random
              << " bound=" << last.satisfied_bound;
  std::cout << " missing_candidates=" << last.missing_candidates << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Channel and power allocation among wireless access points"};
  app.require_subcommand(1);

  CommonArgs run_args, domino_args, verify_args, sweep_args;
  auto* run = app.add_subcommand("run", "Discovery plus allocation experiment");
  add_common(run, run_args);

  auto* domino = app.add_subcommand("domino", "Insert APs into a running network and count channel changes");
  add_common(domino, domino_args);
  int inserted = 10;
  double insert_time = 230;
  domino->add_option("--inserted", inserted, "APs to insert")->capture_default_str();
  domino->add_option("--insert-time", insert_time, "Insertion time in seconds")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Property suite for potentials, equilibria and timing");
  add_common(verify, verify_args);

  auto* sweep = app.add_subcommand("sweep", "Discovery completion time across densities");
  add_common(sweep, sweep_args);
  std::vector<int> densities{50, 150, 300};
  int replications = 20;
  sweep->add_option("--densities", densities, "AP counts")->delimiter(',')->capture_default_str();
  sweep->add_option("--replications", replications, "Seeds per density, counting up from --seed")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (run->parsed()) {
      const auto config = resolve(run_args, run);
      const auto series = apalloc::run_experiment(config);
      print_summary(series, true);
      report(apalloc::export_results(series, run_args.out_dir));
    } else if (domino->parsed()) {
      const auto config = resolve(domino_args, domino);
      const auto series = apalloc::domino_experiment(config, inserted, insert_time);
      print_summary(series, false);
      report(apalloc::export_results(series, domino_args.out_dir));
    } else if (verify->parsed()) {
      const auto config = resolve(verify_args, verify);
      const auto checks = apalloc::run_property_suite(config.seed);
      apalloc::write_checks(std::cout, checks);
      for (const auto& c : checks)
        if (!c.passed) return kExitVerify;
    } else if (sweep->parsed()) {
      const auto config = resolve(sweep_args, sweep);
      if (replications < 1) throw apalloc::ConfigError("--replications must be >= 1");
      std::vector<std::uint64_t> seeds(replications);
      std::iota(seeds.begin(), seeds.end(), config.seed);
      const auto rows = apalloc::discovery_sweep(config, densities, seeds);

      std::error_code ec;
      std::filesystem::create_directories(sweep_args.out_dir, ec);
      if (ec) throw apalloc::IoError("cannot create output directory " + sweep_args.out_dir + ": " + ec.message());
      const auto path = std::filesystem::path(sweep_args.out_dir) / "sweep.csv";
      std::ofstream out(path);
      if (!out) throw apalloc::IoError("cannot open " + path.string() + " for writing");
      apalloc::write_sweep_csv(out, rows);
      if (!out.flush()) throw apalloc::IoError("write failed for " + path.string());
      report({path});
    }
  } catch (const apalloc::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const apalloc::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}
