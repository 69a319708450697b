#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "bdisim/agent.hpp"
#include "bdisim/sim.hpp"

namespace bdisim::uav {

using env::Vec2;

/// Leader/follower formation scenario parameters.
struct ScenarioConfig {
  double leader_radius = 5.0;     // m, leader path radius
  double formation_radius = 2.5;  // m, follower distance from the leader
  double comm_range = 5.0;        // m
  double v_max = 1.0;             // m/s
  double leader_period = 600.0;   // s for a full circle
  int n_followers = 16;
  double arena_radius = 10.0;  // m, initial follower placement disc
  double frequency = 1.0;      // Hz, maximum control-loop frequency f
  double drift = 0.0;          // tau, relative sd of the loop frequency
  double duration = 1500.0;    // simulated seconds
  int repetitions = 100;
  sim::Granularity granularity = sim::Granularity::ACLP;

  /// Whether the Weibull models the loop frequency (interval = 1/phi) or
  /// the inter-cycle interval directly.
  enum class WeibullMode { Frequency, Interval };
  WeibullMode weibull_mode = WeibullMode::Frequency;

  /// Oracle rule: Fixed keeps claimed slots and matches unassigned followers
  /// to the nearest unclaimed slot; Greedy re-matches every follower.
  enum class OracleMatching { Fixed, Greedy };
  OracleMatching oracle_matching = OracleMatching::Fixed;

  /// A follower considers the leader lost when no invite arrived within
  /// this many seconds (3 nominal cycles).
  double invite_staleness() const { return 3.0 / frequency; }

  /// A slotless follower repeats its join request after this long.
  double rerequest_window() const { return 4.0 / frequency; }

  /// Throws std::invalid_argument listing every violated constraint.
  void validate() const;
};

/// Slot bookkeeping: injective follower -> slot map, claimed in join order
/// against a pre-sized ring of n slots.
class FormationState {
 public:
  explicit FormationState(int total_slots) : total_(total_slots) {}

  int total_slots() const { return total_; }
  int joined() const { return static_cast<int>(assignment_.size()); }
  bool full() const { return joined() >= total_; }
  bool has(const std::string& follower) const { return assignment_.count(follower); }
  int slot_of(const std::string& follower) const { return assignment_.at(follower); }

  /// Claims the next free slot; returns the existing slot on repeat calls.
  int claim(const std::string& follower);

  const std::map<std::string, int>& assignment() const { return assignment_; }

 private:
  int total_;
  std::map<std::string, int> assignment_;  // follower -> slot index
};

struct ErrorSample {
  double t = 0;
  double value = 0;  // sum of squared distance errors, m^2
};

/// Ideal position of slot k of `total` around the leader, angles anchored
/// to the global frame.
Vec2 slot_point(Vec2 leader_pos, int k, int total, double formation_radius);

/// Ideal position per follower. Assigned followers map to their slot;
/// unassigned ones to the nearest unclaimed slot (or everything re-matched
/// greedily under OracleMatching::Greedy).
std::map<std::string, Vec2> oracle_ideal_positions(
    Vec2 leader_pos, const FormationState& formation, const ScenarioConfig& cfg,
    const std::map<std::string, Vec2>& follower_positions);

/// Sum over followers of the squared distance to their ideal position.
double formation_error(Vec2 leader_pos, const FormationState& formation,
                       const ScenarioConfig& cfg,
                       const std::map<std::string, Vec2>& follower_positions);

std::shared_ptr<const bdi::AgentSpec> leader_spec(const ScenarioConfig& cfg);
std::shared_ptr<const bdi::AgentSpec> follower_spec(const ScenarioConfig& cfg,
                                                    const std::string& name);

struct UavSpecs {
  std::shared_ptr<const bdi::AgentSpec> leader;
  std::vector<std::shared_ptr<const bdi::AgentSpec>> followers;
};

UavSpecs build_specs(const ScenarioConfig& cfg);

/// Throws std::invalid_argument if any plan body references an action name
/// missing from the table.
void validate_plan_actions(const env::ActionTable& actions,
                           const UavSpecs& specs);

/// Registers circleStep and assignSlot against a backend's action table.
void register_scenario_actions(env::ActionTable& actions,
                               const ScenarioConfig& cfg,
                               std::shared_ptr<FormationState> formation);

struct UavSimulation {
  std::unique_ptr<sim::Simulation> sim;
  std::shared_ptr<FormationState> formation;
  std::shared_ptr<std::vector<ErrorSample>> samples;
  std::shared_ptr<void> keepalive;  // owns the self-rescheduling sampler
};

/// Wires devices, phase schedulers, actions, and the metric sampler for one
/// seeded simulation: leader at the origin, followers uniform in the arena
/// disc, per-agent start delay in [0, 1/f].
UavSimulation build_simulation(const ScenarioConfig& cfg, std::uint64_t seed,
                               const UavSpecs& specs);

struct RunResult {
  std::vector<ErrorSample> samples;
  std::uint64_t events = 0;
  std::vector<std::string> trace;
};

/// Builds and runs one simulation to cfg.duration.
RunResult run_simulation(const ScenarioConfig& cfg, std::uint64_t seed);

struct Aggregate {
  double t = 0;
  double mean = 0;
  double stddev = 0;
};

struct ExperimentResult {
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<ErrorSample>> runs;  // one series per seed
  std::vector<Aggregate> aggregate;            // per 1 s time bucket
};

/// One simulation per seed plus per-bucket mean and sample standard
/// deviation. Seeds must be distinct.
ExperimentResult run_experiment(const ScenarioConfig& cfg,
                                const std::vector<std::uint64_t>& seeds);

/// Mean of sample values with t in [t_begin, t_end].
double mean_error(const std::vector<ErrorSample>& samples, double t_begin,
                  double t_end);

}  // namespace bdisim::uav
