#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "coversim/engine.hpp"
#include "coversim/profiles.hpp"

// coversim CLI: single runs, paired mode comparisons, profile validation.
// Exit codes: 0 success, 1 config/usage error, 2 internal invariant breach.

namespace {

int do_run(const std::string& config_path, const std::string& mode,
           std::int64_t seed, const std::string& out_dir) {
  coversim::ScenarioConfig cfg = coversim::load_config(config_path);
  if (!mode.empty()) cfg.mode = mode;
  if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.validate();

  const coversim::Metrics m = coversim::run(cfg);
  coversim::write_run_outputs(m, cfg, out_dir);

  std::printf("mode=%s seed=%llu nodes=%d duration=%.0fs\n", cfg.mode.c_str(),
              static_cast<unsigned long long>(cfg.seed), cfg.nodes,
              cfg.duration_s);
  std::printf("coverage mean %.2f%% std %.2f%%, events %lld/%lld captured\n",
              100.0 * m.mean_coverage, 100.0 * m.std_coverage,
              static_cast<long long>(m.events_captured),
              static_cast<long long>(m.events_occurred));
  std::printf("tasks created %lld completed %lld offloaded %lld dropped %lld\n",
              static_cast<long long>(m.tasks_created),
              static_cast<long long>(m.tasks_completed),
              static_cast<long long>(m.tasks_offloaded),
              static_cast<long long>(m.tasks_dropped));
  std::printf("outputs written to %s\n", out_dir.c_str());
  return 0;
}

int do_compare(const std::string& config_path, int seeds,
               const std::string& out_dir) {
  coversim::ScenarioConfig cfg = coversim::load_config(config_path);
  const coversim::ComparisonReport report =
      coversim::compare_modes(cfg, seeds);
  coversim::write_comparison(report, out_dir);
  std::cout << coversim::comparison_text(report);
  std::printf("report written to %s\n", out_dir.c_str());
  return 0;
}

int do_validate(const std::string& profile_path) {
  const coversim::HardwareProfile p = coversim::load_profile(profile_path);
  std::printf("%s: ok (%d layers, %zu sensors, idle %.2f mW, full pass %.6f J)\n",
              profile_path.c_str(), p.layer_count(), p.sensors.size(),
              static_cast<double>(p.idle_power) / 1e3,
              coversim::joules(coversim::full_pass_energy(p)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coversim - coverage-first intermittent sensor network simulator"};
  app.require_subcommand(1);

  std::string config_path, mode, out_dir = "out";
  std::int64_t seed = -1;
  int seeds = 10;
  std::string profile_path;

  auto* run_cmd = app.add_subcommand("run", "simulate one mode");
  run_cmd->add_option("--config", config_path, "scenario config file")
      ->required();
  run_cmd->add_option("--mode", mode, "vanilla|algorithm (overrides config)");
  run_cmd->add_option("--seed", seed, "RNG seed (overrides config)");
  run_cmd->add_option("--out", out_dir, "output directory");

  auto* cmp_cmd = app.add_subcommand("compare", "paired vanilla/algorithm runs");
  cmp_cmd->add_option("--config", config_path, "scenario config file")
      ->required();
  cmp_cmd->add_option("--seeds", seeds, "number of paired seeds");
  cmp_cmd->add_option("--out", out_dir, "output directory");

  auto* val_cmd = app.add_subcommand("validate-profile", "check a profile file");
  val_cmd->add_option("profile", profile_path, "profile file")->required();

  try {
    app.parse(argc, argv);
    if (run_cmd->parsed()) return do_run(config_path, mode, seed, out_dir);
    if (cmp_cmd->parsed()) return do_compare(config_path, seeds, out_dir);
    if (val_cmd->parsed()) return do_validate(profile_path);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const coversim::InvariantError& e) {
    std::fprintf(stderr, "invariant breach: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
