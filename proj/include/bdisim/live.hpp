#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "bdisim/uav.hpp"

namespace bdisim::live {

using env::Vec2;

/// Wall-clock execution parameters. Durations are in real seconds.
struct LiveConfig {
  double duration = 60.0;
  double mover_tick = 0.05;     // movement integration step
  double sample_period = 1.0;   // metric sampling interval
  /// Target reasoning-cycle frequency (Hz). Unset runs flat out, so the
  /// effective frequency is whatever the host sustains.
  std::optional<double> cycle_frequency;
  /// When set, a true value ends the run early (e.g. from a signal handler).
  /// Collected samples up to that point are returned.
  const std::atomic<bool>* abort = nullptr;
};

struct LiveResult {
  std::vector<uav::ErrorSample> samples;           // t = seconds since start
  std::map<std::string, std::uint64_t> cycles;     // reasoning cycles per agent
  double elapsed = 0;                              // actual wall seconds
};

/// Runs the given agent specifications concurrently: one thread per agent,
/// plus a movement integrator and a metric sampler, against a mutex-guarded
/// shared world. The specs are the same objects the simulation backend
/// accepts; action names are validated before any thread starts.
LiveResult run_live(const uav::UavSpecs& specs, const uav::ScenarioConfig& cfg,
                    const LiveConfig& live_cfg, std::uint64_t seed);

}  // namespace bdisim::live
