#include "bdisim/agent.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace bdisim::bdi {

std::string describe(const InternalEvent& ev) {
  switch (ev.type) {
    case EventType::BeliefAdded:
      return "+" + ev.term.to_string();
    case EventType::BeliefRemoved:
      return "-" + ev.term.to_string();
    case EventType::GoalAdded:
      return "!" + ev.term.to_string();
    case EventType::GoalFailed:
      return "fail!" + ev.term.to_string();
  }
  return {};
}

PlanBuilder::PlanBuilder(std::string name, EventType trigger_type, Term trigger) {
  plan_.name = std::move(name);
  plan_.trigger_type = trigger_type;
  plan_.trigger = std::move(trigger);
}

PlanBuilder& PlanBuilder::query(Term pattern) {
  Guard g;
  g.kind = Guard::Kind::Query;
  g.pattern = std::move(pattern);
  plan_.context.push_back(std::move(g));
  return *this;
}

PlanBuilder& PlanBuilder::not_query(Term pattern) {
  Guard g;
  g.kind = Guard::Kind::NotQuery;
  g.pattern = std::move(pattern);
  plan_.context.push_back(std::move(g));
  return *this;
}

PlanBuilder& PlanBuilder::compare(Term lhs, Cmp op, Term rhs) {
  Guard g;
  g.kind = Guard::Kind::Compare;
  g.lhs = std::move(lhs);
  g.op = op;
  g.rhs = std::move(rhs);
  plan_.context.push_back(std::move(g));
  return *this;
}

PlanBuilder& PlanBuilder::act(std::string action, std::vector<Term> args) {
  Step s;
  s.kind = Step::Kind::Act;
  s.action = std::move(action);
  s.args = std::move(args);
  plan_.body.push_back(std::move(s));
  return *this;
}

PlanBuilder& PlanBuilder::subgoal(Term goal) {
  Step s;
  s.kind = Step::Kind::SubGoal;
  s.term = std::move(goal);
  plan_.body.push_back(std::move(s));
  return *this;
}

PlanBuilder& PlanBuilder::add_belief(Term belief) {
  Step s;
  s.kind = Step::Kind::AddBelief;
  s.term = std::move(belief);
  plan_.body.push_back(std::move(s));
  return *this;
}

PlanBuilder& PlanBuilder::drop_belief(Term pattern) {
  Step s;
  s.kind = Step::Kind::DropBelief;
  s.term = std::move(pattern);
  plan_.body.push_back(std::move(s));
  return *this;
}

PlanBuilder& PlanBuilder::send(Term recipient, env::Performative perf, Term payload) {
  Step s;
  s.kind = Step::Kind::Send;
  s.recipient = std::move(recipient);
  s.performative = perf;
  s.term = std::move(payload);
  plan_.body.push_back(std::move(s));
  return *this;
}

PlanBuilder& PlanBuilder::broadcast(env::Performative perf, Term payload) {
  Step s;
  s.kind = Step::Kind::Broadcast;
  s.performative = perf;
  s.term = std::move(payload);
  plan_.body.push_back(std::move(s));
  return *this;
}

AgentSpecBuilder& AgentSpecBuilder::belief(Term t) {
  spec_.initial_beliefs.push_back(std::move(t));
  return *this;
}

AgentSpecBuilder& AgentSpecBuilder::goal(Term t) {
  spec_.initial_goals.push_back(std::move(t));
  return *this;
}

AgentSpecBuilder& AgentSpecBuilder::plan(Plan p) {
  spec_.plans.push_back(std::move(p));
  return *this;
}

std::shared_ptr<const AgentSpec> AgentSpecBuilder::build() {
  return std::make_shared<const AgentSpec>(std::move(spec_));
}

AgentState make_agent_state(std::shared_ptr<const AgentSpec> spec) {
  AgentState st;
  st.spec = std::move(spec);
  st.beliefs = st.spec->initial_beliefs;
  for (const Term& g : st.spec->initial_goals) {
    st.events.push_back({EventType::GoalAdded, g, std::nullopt});
  }
  return st;
}

namespace {

void record(AgentState& state, std::string entry) {
  if (state.trace) state.trace->push_back(std::move(entry));
}

bool contains_belief(const std::vector<Term>& base, const Term& b) {
  return std::find(base.begin(), base.end(), b) != base.end();
}

void enqueue(AgentState& state, EventType type, Term term,
             std::optional<int> for_intention = std::nullopt) {
  state.events.push_back({type, std::move(term), for_intention});
}

/// Belief removals only become events when some plan can react to them.
/// Skipping them otherwise keeps the event queue bounded: belief churn from
/// periodic percepts would enqueue removal/addition pairs faster than the
/// one-instantiation-per-cycle deliberation can drain them.
bool wants_removal_events(const AgentState& state) {
  for (const Plan& p : state.spec->plans) {
    if (p.trigger_type == EventType::BeliefRemoved) return true;
  }
  return false;
}

void note_removed(AgentState& state, Term removed) {
  if (wants_removal_events(state)) {
    enqueue(state, EventType::BeliefRemoved, std::move(removed));
  }
}

/// Adds a belief with upsert semantics per (functor, arity): older beliefs
/// with the same shape are removed first. Each base mutation enqueues the
/// matching internal event. No-op when the belief is already present.
void upsert_belief(AgentState& state, const Term& b) {
  if (contains_belief(state.beliefs, b)) return;
  for (auto it = state.beliefs.begin(); it != state.beliefs.end();) {
    bool same_shape =
        it->kind() == b.kind() && it->functor() == b.functor() &&
        (b.kind() != Term::Kind::Compound || it->arity() == b.arity());
    if (same_shape) {
      Term removed = *it;
      it = state.beliefs.erase(it);
      note_removed(state, std::move(removed));
    } else {
      ++it;
    }
  }
  state.beliefs.push_back(b);
  enqueue(state, EventType::BeliefAdded, b);
}

bool compare_holds(double a, Cmp op, double b) {
  switch (op) {
    case Cmp::Lt: return a < b;
    case Cmp::Le: return a <= b;
    case Cmp::Gt: return a > b;
    case Cmp::Ge: return a >= b;
    case Cmp::Eq: return a == b;
    case Cmp::Ne: return a != b;
  }
  return false;
}

bool solve_guards(const std::vector<Guard>& guards, std::size_t i,
                  const std::vector<Term>& beliefs, Bindings& bindings) {
  if (i == guards.size()) return true;
  const Guard& g = guards[i];
  switch (g.kind) {
    case Guard::Kind::Query: {
      for (const Term& b : beliefs) {
        Bindings attempt = bindings;
        if (unify(g.pattern, b, attempt) &&
            solve_guards(guards, i + 1, beliefs, attempt)) {
          bindings = std::move(attempt);
          return true;
        }
      }
      return false;
    }
    case Guard::Kind::NotQuery: {
      for (const Term& b : beliefs) {
        Bindings attempt = bindings;
        if (unify(g.pattern, b, attempt)) return false;
      }
      return solve_guards(guards, i + 1, beliefs, bindings);
    }
    case Guard::Kind::Compare: {
      auto a = eval_number(g.lhs, bindings);
      auto b = eval_number(g.rhs, bindings);
      if (!a || !b || !compare_holds(*a, g.op, *b)) return false;
      return solve_guards(guards, i + 1, beliefs, bindings);
    }
  }
  return false;
}

/// First applicable plan in declaration order, or nullptr.
const Plan* select_plan(const AgentState& state, const InternalEvent& ev,
                        Bindings& out_bindings) {
  for (const Plan& p : state.spec->plans) {
    if (p.trigger_type != ev.type) continue;
    Bindings attempt;
    if (!unify(p.trigger, ev.term, attempt)) continue;
    if (!solve_guards(p.context, 0, state.beliefs, attempt)) continue;
    out_bindings = std::move(attempt);
    return &p;
  }
  return nullptr;
}

Intention* find_intention(AgentState& state, int id) {
  for (Intention& it : state.intentions) {
    if (it.id == id) return &it;
  }
  return nullptr;
}

void remove_intention(AgentState& state, int id) {
  std::erase_if(state.intentions, [&](const Intention& i) { return i.id == id; });
}

/// Pops exhausted plan instances; resumed parents are already past their
/// SubGoal step. An empty stack removes the intention.
void pop_exhausted(AgentState& state, Intention& intention) {
  while (!intention.stack.empty() &&
         intention.stack.back().pc >= intention.stack.back().plan->body.size()) {
    intention.stack.pop_back();
  }
  if (intention.stack.empty()) remove_intention(state, intention.id);
}

/// Fails an intention: removes it and enqueues GoalFailed for the innermost
/// goal-triggered plan instance, if any.
void fail_intention(AgentState& state, int id) {
  Intention* intention = find_intention(state, id);
  if (!intention) return;
  std::optional<Term> failed_goal;
  for (auto it = intention->stack.rbegin(); it != intention->stack.rend(); ++it) {
    if (it->plan->trigger_type == EventType::GoalAdded) {
      failed_goal = substitute(it->plan->trigger, it->env);
      break;
    }
  }
  remove_intention(state, id);
  if (failed_goal) enqueue(state, EventType::GoalFailed, std::move(*failed_goal));
}

std::string recipient_name(const Term& t) {
  if (t.kind() == Term::Kind::Atom || t.kind() == Term::Kind::Text) return t.name();
  throw std::runtime_error("message recipient must resolve to a name, got " +
                           t.to_string());
}

}  // namespace

void sense(AgentState& state, const env::ExternalInput& input) {
  for (const Term& p : input.percepts) {
    if (!p.is_ground()) {
      throw std::runtime_error("non-ground percept: " + p.to_string());
    }
  }

  // Percepts are authoritative per functor: for every functor present in the
  // snapshot, beliefs of that functor not re-perceived are removed; beliefs
  // with other functors are untouched.
  std::set<std::string> functors;
  for (const Term& p : input.percepts) functors.insert(p.functor());
  for (auto it = state.beliefs.begin(); it != state.beliefs.end();) {
    if (functors.count(it->functor()) &&
        std::find(input.percepts.begin(), input.percepts.end(), *it) ==
            input.percepts.end()) {
      Term removed = *it;
      it = state.beliefs.erase(it);
      note_removed(state, std::move(removed));
    } else {
      ++it;
    }
  }
  for (const Term& p : input.percepts) {
    if (!contains_belief(state.beliefs, p)) {
      state.beliefs.push_back(p);
      enqueue(state, EventType::BeliefAdded, p);
    }
  }

  // Messages map to events at sense time: achieve -> goal addition,
  // tell -> belief upsert.
  for (const env::Message& m : input.messages) {
    if (!m.payload.is_ground()) {
      throw std::runtime_error("non-ground message payload: " +
                               m.payload.to_string());
    }
    if (m.performative == env::Performative::Achieve) {
      enqueue(state, EventType::GoalAdded, m.payload);
    } else {
      upsert_belief(state, m.payload);
    }
  }
}

std::optional<int> deliberate(AgentState& state) {
  // Consume events until one instantiates a plan. Events with no applicable
  // plan are dropped (goal additions turn into GoalFailed) so stale percept
  // churn cannot starve the agent.
  while (!state.events.empty()) {
    InternalEvent ev = state.events.front();
    state.events.pop_front();

    // A belief-addition event whose term is no longer in the base was
    // superseded (e.g. by a fresher percept) before it was handled; reacting
    // to it would act on stale data, so it is dropped.
    if (ev.type == EventType::BeliefAdded &&
        !contains_belief(state.beliefs, ev.term)) {
      record(state, "stale:" + describe(ev));
      continue;
    }
    record(state, "event:" + describe(ev));

    if (ev.for_intention) {
      Intention* parent = find_intention(state, *ev.for_intention);
      if (!parent) continue;  // originating intention already gone
      Bindings bindings;
      const Plan* plan = select_plan(state, ev, bindings);
      if (plan) {
        // Frames parked past their SubGoal step have nothing left to run
        // once the subgoal is dispatched; popping them here keeps
        // tail-recursive goals at constant stack depth.
        while (!parent->stack.empty() &&
               parent->stack.back().pc >= parent->stack.back().plan->body.size()) {
          parent->stack.pop_back();
        }
        parent->stack.push_back({plan, 0, std::move(bindings)});
        parent->suspended = false;
        record(state, "plan:" + plan->name);
        break;
      }
      fail_intention(state, *ev.for_intention);
      continue;
    }

    Bindings bindings;
    const Plan* plan = select_plan(state, ev, bindings);
    if (plan) {
      Intention intention;
      intention.id = state.next_intention_id++;
      intention.stack.push_back({plan, 0, std::move(bindings)});
      state.intentions.push_back(std::move(intention));
      record(state, "plan:" + plan->name);
      break;
    }
    if (ev.type == EventType::GoalAdded) {
      enqueue(state, EventType::GoalFailed, ev.term);
    }
  }

  // Round-robin over live (non-suspended) intentions, resuming after the
  // last selected one.
  if (state.intentions.empty()) return std::nullopt;
  std::size_t start = 0;
  for (std::size_t i = 0; i < state.intentions.size(); ++i) {
    if (state.intentions[i].id == state.last_selected) {
      start = i + 1;
      break;
    }
    if (state.intentions[i].id > state.last_selected) {
      start = i;
      break;
    }
  }
  for (std::size_t off = 0; off < state.intentions.size(); ++off) {
    const Intention& cand =
        state.intentions[(start + off) % state.intentions.size()];
    if (!cand.suspended) {
      state.last_selected = cand.id;
      return cand.id;
    }
  }
  return std::nullopt;
}

void act(AgentState& state, int intention_id, env::EnvironmentHandle& handle) {
  Intention* intention = find_intention(state, intention_id);
  if (!intention || intention->stack.empty()) {
    throw std::runtime_error("act on a dead intention");
  }
  Frame& frame = intention->stack.back();
  const Step& step = frame.plan->body[frame.pc];
  ++state.steps_executed;

  switch (step.kind) {
    case Step::Kind::Act: {
      std::vector<Term> args;
      args.reserve(step.args.size());
      for (const Term& a : step.args) args.push_back(resolve(a, frame.env));
      record(state, "act:" + step.action);
      frame.pc++;
      try {
        handle.act(step.action, args);
      } catch (const env::UnknownActionError&) {
        fail_intention(state, intention_id);
        return;
      }
      break;
    }
    case Step::Kind::SubGoal: {
      Term goal = resolve(step.term, frame.env);
      record(state, "subgoal:" + goal.to_string());
      frame.pc++;
      intention->suspended = true;
      enqueue(state, EventType::GoalAdded, std::move(goal), intention_id);
      // Keep the frame (even if exhausted) until the subgoal is dispatched.
      return;
    }
    case Step::Kind::AddBelief: {
      Term b = resolve(step.term, frame.env);
      record(state, "add:" + b.to_string());
      frame.pc++;
      upsert_belief(state, b);
      break;
    }
    case Step::Kind::DropBelief: {
      Term pattern = substitute(step.term, frame.env);
      record(state, "drop:" + pattern.to_string());
      frame.pc++;
      for (auto it = state.beliefs.begin(); it != state.beliefs.end();) {
        Bindings scratch;
        if (unify(pattern, *it, scratch)) {
          Term removed = *it;
          it = state.beliefs.erase(it);
          note_removed(state, std::move(removed));
        } else {
          ++it;
        }
      }
      break;
    }
    case Step::Kind::Send: {
      Term to = resolve(step.recipient, frame.env);
      Term payload = resolve(step.term, frame.env);
      record(state, "send:" + payload.to_string());
      frame.pc++;
      handle.send(recipient_name(to), step.performative, payload);
      break;
    }
    case Step::Kind::Broadcast: {
      Term payload = resolve(step.term, frame.env);
      record(state, "broadcast:" + payload.to_string());
      frame.pc++;
      handle.broadcast(step.performative, payload);
      break;
    }
  }

  pop_exhausted(state, *intention);
}

void run_cycle(AgentState& state, const env::ExternalInput& input,
               env::EnvironmentHandle& handle) {
  sense(state, input);
  std::optional<int> selected = deliberate(state);
  if (selected) act(state, *selected, handle);
}

}  // namespace bdisim::bdi
