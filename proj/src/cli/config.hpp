#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bdisim/uav.hpp"

namespace bdisim::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sweep grid: the Cartesian product of these lists times `repetitions`.
struct SweepGrid {
  std::vector<sim::Granularity> granularities;
  std::vector<double> frequencies;  // Hz
  std::vector<double> drifts;       // tau
  int repetitions = 100;
  std::uint64_t base_seed = 1;
};

/// One parsed YAML configuration file. Sections: scenario, execution,
/// sweep, output; unknown keys anywhere are errors.
struct ToolConfig {
  uav::ScenarioConfig scenario;  // scenario + execution fields
  std::uint64_t seed = 1;
  SweepGrid sweep;
  std::string output_path;  // file (run/live) or directory (sweep)
};

/// Parses and validates `path`. Throws ConfigError with a diagnostic
/// naming the offending key or value.
ToolConfig load_config(const std::string& path);

}  // namespace bdisim::cli
