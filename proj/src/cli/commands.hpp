#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace bdisim::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRunFailure = 1;
inline constexpr int kExitBadConfig = 2;
inline constexpr int kExitInterrupted = 130;

struct RunOptions {
  std::string config_path;
  std::optional<std::string> granularity;  // ama | acli | aclp
  std::optional<double> frequency;         // Hz
  std::optional<double> drift;             // tau
  std::optional<std::uint64_t> seed;
  std::string out_path;  // empty: use output.path from the config
};

struct SweepOptions {
  std::string config_path;
  std::string out_dir;  // empty: use output.path from the config
  /// Upper bound on simulations executed this invocation; runs whose CSV
  /// already exists are skipped and do not count. Unset means unlimited.
  std::optional<int> max_runs;
};

struct LiveOptions {
  std::string config_path;
  std::optional<double> duration;   // s
  std::optional<double> frequency;  // target cycle Hz
  std::string out_path;
};

int cmd_run(const RunOptions& opt);
int cmd_sweep(const SweepOptions& opt);
int cmd_live(const LiveOptions& opt);

}  // namespace bdisim::cli
