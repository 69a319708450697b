#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bdisim/env.hpp"
#include "bdisim/term.hpp"

namespace bdisim::bdi {

enum class EventType { BeliefAdded, BeliefRemoved, GoalAdded, GoalFailed };

struct InternalEvent {
  EventType type;
  Term term;  // ground at enqueue time
  std::optional<int> for_intention;  // set for sub-goal events
};

std::string describe(const InternalEvent& ev);

enum class Cmp { Lt, Le, Gt, Ge, Eq, Ne };

/// One conjunct of a plan context: a belief query, a negated belief query,
/// or an arithmetic comparison over bound terms.
struct Guard {
  enum class Kind { Query, NotQuery, Compare };
  Kind kind = Kind::Query;
  Term pattern;  // Query / NotQuery
  Cmp op = Cmp::Eq;
  Term lhs, rhs;  // Compare
};

struct Step {
  enum class Kind { Act, SubGoal, AddBelief, DropBelief, Send, Broadcast };
  Kind kind = Kind::Act;
  std::string action;      // Act
  Term term;               // goal / belief / payload
  std::vector<Term> args;  // Act
  Term recipient;          // Send
  env::Performative performative = env::Performative::Tell;
};

struct Plan {
  std::string name;
  EventType trigger_type = EventType::GoalAdded;
  Term trigger;  // pattern, may contain variables
  std::vector<Guard> context;
  std::vector<Step> body;
};

class PlanBuilder {
 public:
  PlanBuilder(std::string name, EventType trigger_type, Term trigger);

  PlanBuilder& query(Term pattern);
  PlanBuilder& not_query(Term pattern);
  PlanBuilder& compare(Term lhs, Cmp op, Term rhs);

  PlanBuilder& act(std::string action, std::vector<Term> args = {});
  PlanBuilder& subgoal(Term goal);
  PlanBuilder& add_belief(Term belief);
  PlanBuilder& drop_belief(Term pattern);
  PlanBuilder& send(Term recipient, env::Performative perf, Term payload);
  PlanBuilder& broadcast(env::Performative perf, Term payload);

  Plan build() { return std::move(plan_); }

 private:
  Plan plan_;
};

inline PlanBuilder on_goal(std::string name, Term trigger) {
  return PlanBuilder(std::move(name), EventType::GoalAdded, std::move(trigger));
}
inline PlanBuilder on_belief(std::string name, Term trigger) {
  return PlanBuilder(std::move(name), EventType::BeliefAdded, std::move(trigger));
}

/// Portable, backend-agnostic BDI program: initial beliefs, initial goals,
/// and an ordered plan library. Built once, runnable under any backend.
struct AgentSpec {
  std::string name;
  std::vector<Term> initial_beliefs;
  std::vector<Term> initial_goals;
  std::vector<Plan> plans;  // declaration order drives plan selection
};

class AgentSpecBuilder {
 public:
  explicit AgentSpecBuilder(std::string name) { spec_.name = std::move(name); }
  AgentSpecBuilder& belief(Term t);
  AgentSpecBuilder& goal(Term t);
  AgentSpecBuilder& plan(Plan p);
  std::shared_ptr<const AgentSpec> build();

 private:
  AgentSpec spec_;
};

struct Frame {
  const Plan* plan = nullptr;
  std::size_t pc = 0;
  Bindings env;
};

struct Intention {
  int id = 0;
  std::vector<Frame> stack;
  bool suspended = false;  // waiting for a sub-goal to be picked up
};

/// Mutable runtime state of one agent. Confined: exactly one execution
/// context mutates a given state at a time.
struct AgentState {
  std::shared_ptr<const AgentSpec> spec;
  std::vector<Term> beliefs;
  std::deque<InternalEvent> events;  // FIFO
  std::vector<Intention> intentions;
  int next_intention_id = 0;
  int last_selected = -1;  // round-robin cursor (intention id)
  std::vector<std::string>* trace = nullptr;  // optional observer sink

  /// Step counter for the one-step-per-act invariant.
  std::uint64_t steps_executed = 0;
};

AgentState make_agent_state(std::shared_ptr<const AgentSpec> spec);

/// Sense phase: percept reconciliation plus message intake. Percepts are
/// authoritative per functor; tell messages upsert per (functor, arity);
/// achieve messages enqueue goal-addition events.
void sense(AgentState& state, const env::ExternalInput& input);

/// Deliberation phase: consumes queued events until one yields an applicable
/// plan (at most one plan instantiation per cycle; dead events are dropped,
/// failed goals enqueue GoalFailed), then picks the next live intention
/// round-robin. Returns the selected intention id, if any.
std::optional<int> deliberate(AgentState& state);

/// Act phase: executes exactly one body step of the selected intention.
void act(AgentState& state, int intention_id, env::EnvironmentHandle& handle);

/// One full control-loop iteration: sense; deliberate; act.
void run_cycle(AgentState& state, const env::ExternalInput& input,
               env::EnvironmentHandle& handle);

}  // namespace bdisim::bdi
