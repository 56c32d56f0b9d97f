// Command-line front end for the ISAC link simulator: ambiguity table,
// sensing runs, power-allocation sweeps and the built-in selfcheck.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "isac/pipeline.hpp"
#include "isac/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitRuntimeError = 2;
constexpr int kExitSelfcheckFailure = 3;

struct GlobalOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  int threads = 0;  // 0 = hardware concurrency
};

isac::ScenarioConfig load_effective_config(const GlobalOptions& opts) {
  isac::ScenarioConfig cfg = opts.config_path.empty()
                                 ? isac::default_config()
                                 : isac::load_config(opts.config_path);
  if (opts.seed) cfg.master_seed = *opts.seed;
  cfg.validate();
  return cfg;
}

int effective_threads(const GlobalOptions& opts) {
  if (opts.threads > 0) return opts.threads;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::ofstream open_output(const GlobalOptions& opts, const std::string& name) {
  std::filesystem::create_directories(opts.out_dir);
  std::filesystem::path path = std::filesystem::path(opts.out_dir) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path.string());
  return out;
}

int cmd_ambiguity_table(const GlobalOptions& opts, bool to_file) {
  isac::write_ambiguity_table_csv(std::cout);
  if (to_file) {
    auto out = open_output(opts, "ambiguity_table.csv");
    isac::write_ambiguity_table_csv(out);
  }
  return kExitOk;
}

int cmd_sense(const GlobalOptions& opts, bool dump_grid) {
  isac::ScenarioConfig cfg = load_effective_config(opts);
  isac::SenseOutput result = isac::run_sense(cfg);

  for (const auto& w : result.warnings) std::cerr << "advisory: " << w << '\n';

  {
    auto out = open_output(opts, "range_profile.csv");
    isac::write_range_profile_csv(out, result.profile);
  }
  for (std::size_t k = 0; k < result.velocity_profiles.size(); ++k) {
    auto out = open_output(opts,
                           "velocity_profile_target" + std::to_string(k) +
                               ".csv");
    isac::write_velocity_profile_csv(out, result.velocity_profiles[k]);
  }
  if (dump_grid) {
    isac::PdschConfig pdsch = cfg.pdsch;
    auto grid = isac::build_grid(cfg.grid_dims(), cfg.prs, cfg.dmrs, pdsch,
                                 cfg.split);
    auto out = open_output(opts, "grid_dump.csv");
    isac::dump_grid_csv(grid, out);
  }

  isac::OfdmParams params = cfg.ofdm_params();
  std::cout << "algorithm=" << isac::to_string(cfg.algorithm)
            << " targets=" << result.result.ranges_m.size()
            << " range_resolution_m="
            << isac::range_resolution(params, cfg.grid_dims().num_subcarriers)
            << " velocity_resolution_mps="
            << isac::velocity_bin_width(params, cfg.grid_dims().num_symbols,
                                        cfg.doppler_time_base)
            << " max_range_m=" << isac::max_range(params)
            << " max_velocity_mps="
            << isac::max_velocity(params, cfg.doppler_time_base) << '\n';
  for (std::size_t k = 0; k < result.result.ranges_m.size(); ++k) {
    std::cout << "target " << k << ": range_m=" << result.result.ranges_m[k]
              << " bin=" << result.result.peak_bins[k]
              << " velocity_mps=" << result.result.velocities_mps[k] << '\n';
  }
  return kExitOk;
}

int cmd_sweep_power(const GlobalOptions& opts) {
  isac::ScenarioConfig cfg = load_effective_config(opts);
  auto points = isac::run_power_sweep(cfg, effective_threads(opts));
  auto out = open_output(opts, "power_sweep.csv");
  isac::write_sweep_csv(out, points, cfg.channel.snr_db);
  isac::write_sweep_csv(std::cout, points, cfg.channel.snr_db);
  return kExitOk;
}

int cmd_selfcheck(const GlobalOptions& opts) {
  isac::ScenarioConfig cfg = load_effective_config(opts);
  isac::SelfcheckResult result = isac::run_selfcheck(cfg);
  for (const auto& item : result.items) {
    std::cout << (item.pass ? "[PASS] " : "[FAIL] ") << item.name;
    if (!item.detail.empty()) std::cout << " (" << item.detail << ")";
    std::cout << '\n';
  }
  for (const auto& info : result.infos) std::cout << "[INFO] " << info << '\n';
  if (!result.all_pass()) {
    std::cout << "selfcheck FAILED\n";
    return kExitSelfcheckFailure;
  }
  std::cout << "selfcheck passed\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ISAC downlink simulator: PRS/PDSCH superposition, "
               "range-Doppler sensing and PRS interference cancellation"};
  app.require_subcommand(1);
  app.fallthrough();  // accept global flags after the subcommand name

  GlobalOptions opts;
  app.add_option("--config", opts.config_path, "Scenario config file");
  app.add_option("--seed", opts.seed, "Override seeds.master_seed");
  app.add_option("--out", opts.out_dir, "Output directory for CSV files");
  app.add_option("--threads", opts.threads,
                 "Worker threads (affects speed only, never output bytes)");

  auto* amb = app.add_subcommand("ambiguity-table",
                                 "Print the ghost-spacing table per SCS/comb");
  bool amb_to_file = false;
  amb->add_flag("--write-csv", amb_to_file, "Also write ambiguity_table.csv");

  auto* sense = app.add_subcommand(
      "sense", "Run the sensing pipeline and write profile CSVs");
  bool dump_grid = false;
  sense->add_flag("--dump-grid", dump_grid,
                  "Also write the transmit grid as grid_dump.csv");
  auto* sweep = app.add_subcommand(
      "sweep-power", "Monte-Carlo BER sweep over power splits and combs");
  auto* self = app.add_subcommand("selfcheck", "Fast invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (amb->parsed()) return cmd_ambiguity_table(opts, amb_to_file);
    if (sense->parsed()) return cmd_sense(opts, dump_grid);
    if (sweep->parsed()) return cmd_sweep_power(opts);
    if (self->parsed()) return cmd_selfcheck(opts);
  } catch (const isac::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  return kExitOk;
}
