#include <CLI11.hpp>

#include "../src/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"BDI multi-agent formation simulator"};
  app.require_subcommand(1);

  bdisim::cli::RunOptions run_opt;
  CLI::App* run = app.add_subcommand("run", "Run one seeded simulation");
  run->add_option("--config", run_opt.config_path, "YAML configuration file")
      ->required();
  run->add_option("--granularity", run_opt.granularity,
                  "Scheduling granularity: ama, acli, or aclp");
  run->add_option("--freq", run_opt.frequency, "Control-loop frequency (Hz)");
  run->add_option("--drift", run_opt.drift, "Frequency drift fraction (tau)");
  run->add_option("--seed", run_opt.seed, "Random seed");
  run->add_option("--out", run_opt.out_path, "Output CSV path");

  bdisim::cli::SweepOptions sweep_opt;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Run the configured grid; resumes past completed runs");
  sweep->add_option("--config", sweep_opt.config_path, "YAML configuration file")
      ->required();
  sweep->add_option("--out-dir", sweep_opt.out_dir, "Output directory");
  sweep->add_option("--max-runs", sweep_opt.max_runs,
                    "Execute at most this many pending runs, then stop");

  bdisim::cli::LiveOptions live_opt;
  CLI::App* live = app.add_subcommand("live", "Run the threaded live runtime");
  live->add_option("--config", live_opt.config_path, "YAML configuration file")
      ->required();
  live->add_option("--duration", live_opt.duration, "Wall-clock duration (s)");
  live->add_option("--freq", live_opt.frequency, "Target cycle frequency (Hz)");
  live->add_option("--out", live_opt.out_path, "Output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : bdisim::cli::kExitBadConfig;
  }

  if (run->parsed()) return bdisim::cli::cmd_run(run_opt);
  if (sweep->parsed()) return bdisim::cli::cmd_sweep(sweep_opt);
  if (live->parsed()) return bdisim::cli::cmd_live(live_opt);
  return bdisim::cli::kExitBadConfig;
}
