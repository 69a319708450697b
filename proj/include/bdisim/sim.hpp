#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bdisim/agent.hpp"
#include "bdisim/des.hpp"
#include "bdisim/env.hpp"
#include "bdisim/timedist.hpp"

namespace bdisim::sim {

using des::SimTime;
using env::Vec2;

/// Straight-line movement at constant speed; position is a pure function of
/// time, no discretization.
struct MovementState {
  Vec2 origin;
  Vec2 target;
  SimTime depart = 0;
  double speed = 0;  // m/s, > 0
};

/// Exact interpolated position at time t >= depart, clamped at the target.
Vec2 position_at(const MovementState& m, SimTime t);

enum class Granularity { AMA, ACLI, ACLP };

const char* granularity_name(Granularity g);
std::optional<Granularity> granularity_from_name(const std::string& name);

enum class Phase { Sense, Deliberate, Act };

/// Per-agent composite time distribution: tracks the current control-loop
/// phase and schedules each phase from its own distribution. Phases fire
/// strictly in Sense -> Deliberate -> Act order with one in-flight event.
struct PhaseScheduler {
  dist::TimeDistribution sense_dist = dist::TimeDistribution::asap();
  dist::TimeDistribution deliberate_dist = dist::TimeDistribution::asap();
  dist::TimeDistribution act_dist = dist::TimeDistribution::asap();
  SimTime cycle_start = 0;
  std::uint64_t cycles_completed = 0;
};

class Simulation;
struct Device;

/// One agent hosted on a device, with its confined state and seeded streams.
struct AgentRuntime {
  Device* device = nullptr;
  bdi::AgentState state;
  PhaseScheduler sched;
  des::RngStream phase_rng;
  des::RngStream uniform_rng;
  std::optional<int> selected;  // between deliberate and act

  explicit AgentRuntime(des::RngStream phase, des::RngStream uniform)
      : phase_rng(std::move(phase)), uniform_rng(std::move(uniform)) {}

  const std::string& name() const { return state.spec->name; }
};

/// Situated node: position, movement state, key-value store, and a message
/// broker with one mailbox per hosted agent.
struct Device {
  int id = 0;
  std::string name;
  Vec2 rest_position;
  std::optional<MovementState> movement;
  std::map<std::string, bdi::Term> kv_store;  // keyed by functor
  std::map<std::string, std::deque<env::Message>> mailboxes;
  std::vector<std::unique_ptr<AgentRuntime>> agents;

  Vec2 position_at_time(SimTime t) const {
    return movement ? position_at(*movement, t) : rest_position;
  }
};

/// Re-targets the device's movement from its current interpolated position;
/// the effective speed is min(requested, v_max).
void apply_move_to(Device& dev, Vec2 target, SimTime t, double requested_speed,
                   double v_max);

/// DES backend: devices in 2D space, distance-based delivery, and BDI phases
/// scheduled as kernel events. Confined to one execution context.
class Simulation {
 public:
  Simulation(std::uint64_t seed, double comm_range, double v_max);

  Device& add_device(std::string name, Vec2 position);

  /// Registers an agent on a device. The first sense fires at `first_sense`;
  /// later phases follow the scheduler's distributions.
  AgentRuntime& add_agent(Device& dev, std::shared_ptr<const bdi::AgentSpec> spec,
                          PhaseScheduler sched, SimTime first_sense);

  env::ActionTable& actions() { return actions_; }
  des::Kernel& kernel() { return kernel_; }
  des::RngStream& root_rng() { return root_rng_; }
  SimTime now() const { return kernel_.now(); }
  double comm_range() const { return comm_range_; }
  double v_max() const { return v_max_; }

  std::vector<Device*> devices();
  Device* device(const std::string& name);
  AgentRuntime* agent(const std::string& name);

  /// Devices within r_c of `dev` (boundary inclusive), positions evaluated
  /// at the current clock. Excludes `dev` itself.
  std::vector<Device*> neighbors(const Device& dev, double r_c);

  void deliver_send(const Device& from, const std::string& sender,
                    const std::string& to, env::Performative perf,
                    const bdi::Term& payload);
  void deliver_broadcast(const Device& from, const std::string& sender,
                         env::Performative perf, const bdi::Term& payload);

  std::uint64_t run_until(SimTime t_end) { return kernel_.run_until(t_end); }

  /// Percept snapshot for a device: pos(x, y), time(t), plus any key-value
  /// store entries.
  std::vector<bdi::Term> gather_percepts(const Device& dev);

 private:
  void schedule_sense(AgentRuntime& agent, SimTime at);
  void schedule_next(AgentRuntime& agent, Phase phase,
                     const dist::TimeDistribution& dist);
  void on_sense(AgentRuntime& agent);
  void on_deliberate(AgentRuntime& agent);
  void on_act(AgentRuntime& agent);

  des::Kernel kernel_;
  des::RngStream root_rng_;
  double comm_range_;
  double v_max_;
  env::ActionTable actions_;
  std::vector<std::unique_ptr<Device>> devices_;
  std::map<std::string, AgentRuntime*> agents_by_name_;
  int next_device_id_ = 0;
};

}  // namespace bdisim::sim
