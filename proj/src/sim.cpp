#include "bdisim/sim.hpp"

#include <algorithm>
#include <stdexcept>

namespace bdisim::sim {

Vec2 position_at(const MovementState& m, SimTime t) {
  if (t < m.depart) {
    throw std::invalid_argument("position_at queried before departure");
  }
  Vec2 delta = m.target - m.origin;
  double full = delta.norm();
  if (full <= 0) return m.target;
  double travelled = std::min(m.speed * (t - m.depart), full);
  return m.origin + delta * (travelled / full);
}

const char* granularity_name(Granularity g) {
  switch (g) {
    case Granularity::AMA: return "ama";
    case Granularity::ACLI: return "acli";
    case Granularity::ACLP: return "aclp";
  }
  return "?";
}

std::optional<Granularity> granularity_from_name(const std::string& name) {
  if (name == "ama") return Granularity::AMA;
  if (name == "acli") return Granularity::ACLI;
  if (name == "aclp") return Granularity::ACLP;
  return std::nullopt;
}

void apply_move_to(Device& dev, Vec2 target, SimTime t, double requested_speed,
                   double v_max) {
  Vec2 current = dev.position_at_time(t);
  double speed = std::min(requested_speed, v_max);
  if (env::distance(current, target) <= des::kTimeEpsilon || speed <= 0) {
    dev.rest_position = target;
    dev.movement.reset();
    return;
  }
  dev.movement = MovementState{current, target, t, speed};
}

namespace {

/// EnvironmentHandle implementation for one agent inside the simulation.
class SimEnvHandle final : public env::EnvironmentHandle {
 public:
  SimEnvHandle(Simulation& sim, AgentRuntime& agent) : sim_(sim), agent_(agent) {}

  double now() override { return sim_.now(); }
  double random_uniform() override { return agent_.uniform_rng.next_uniform(); }
  std::vector<bdi::Term> perceive() override;
  void act(const std::string& name, const std::vector<bdi::Term>& args) override;
  void send(const std::string& to, env::Performative perf,
            const bdi::Term& payload) override {
    sim_.deliver_send(*agent_.device, agent_.name(), to, perf, payload);
  }
  void broadcast(env::Performative perf, const bdi::Term& payload) override {
    sim_.deliver_broadcast(*agent_.device, agent_.name(), perf, payload);
  }

 private:
  Simulation& sim_;
  AgentRuntime& agent_;
};

/// ActionContext for action implementations dispatched by a sim agent.
class SimActionContext final : public env::ActionContext {
 public:
  SimActionContext(Simulation& sim, AgentRuntime& agent) : sim_(sim), agent_(agent) {}

  double now() const override { return sim_.now(); }
  env::Vec2 self_position() const override {
    return agent_.device->position_at_time(sim_.now());
  }
  void move_to(env::Vec2 target) override {
    apply_move_to(*agent_.device, target, sim_.now(), sim_.v_max(), sim_.v_max());
  }
  void stop_movement() override {
    Device& dev = *agent_.device;
    dev.rest_position = dev.position_at_time(sim_.now());
    dev.movement.reset();
  }
  void send(const std::string& to, env::Performative perf,
            const bdi::Term& payload) override {
    sim_.deliver_send(*agent_.device, agent_.name(), to, perf, payload);
  }
  void broadcast(env::Performative perf, const bdi::Term& payload) override {
    sim_.deliver_broadcast(*agent_.device, agent_.name(), perf, payload);
  }

 private:
  Simulation& sim_;
  AgentRuntime& agent_;
};

}  // namespace

std::vector<bdi::Term> SimEnvHandle::perceive() {
  return sim_.gather_percepts(*agent_.device);
}

void SimEnvHandle::act(const std::string& name,
                       const std::vector<bdi::Term>& args) {
  SimActionContext ctx(sim_, agent_);
  sim_.actions().dispatch(name, ctx, args);
}

Simulation::Simulation(std::uint64_t seed, double comm_range, double v_max)
    : root_rng_(seed, "sim"), comm_range_(comm_range), v_max_(v_max) {
  env::register_builtin_actions(actions_);
}

Device& Simulation::add_device(std::string name, Vec2 position) {
  auto dev = std::make_unique<Device>();
  dev->id = next_device_id_++;
  dev->name = std::move(name);
  dev->rest_position = position;
  devices_.push_back(std::move(dev));
  return *devices_.back();
}

AgentRuntime& Simulation::add_agent(Device& dev,
                                    std::shared_ptr<const bdi::AgentSpec> spec,
                                    PhaseScheduler sched, SimTime first_sense) {
  const std::string agent_name = spec->name;
  if (agents_by_name_.count(agent_name)) {
    throw std::invalid_argument("duplicate agent name: " + agent_name);
  }
  auto rt = std::make_unique<AgentRuntime>(
      root_rng_.fork("agent/" + agent_name + "/phase"),
      root_rng_.fork("agent/" + agent_name + "/uniform"));
  rt->device = &dev;
  rt->state = bdi::make_agent_state(std::move(spec));
  rt->sched = std::move(sched);
  dev.mailboxes[agent_name];  // materialize the mailbox
  dev.agents.push_back(std::move(rt));
  AgentRuntime& ref = *dev.agents.back();
  agents_by_name_[agent_name] = &ref;
  schedule_sense(ref, first_sense);
  return ref;
}

std::vector<Device*> Simulation::devices() {
  std::vector<Device*> out;
  for (auto& d : devices_) out.push_back(d.get());
  return out;
}

Device* Simulation::device(const std::string& name) {
  for (auto& d : devices_) {
    if (d->name == name) return d.get();
  }
  return nullptr;
}

AgentRuntime* Simulation::agent(const std::string& name) {
  auto it = agents_by_name_.find(name);
  return it == agents_by_name_.end() ? nullptr : it->second;
}

std::vector<Device*> Simulation::neighbors(const Device& dev, double r_c) {
  if (!(r_c > 0)) throw std::invalid_argument("communication range must be positive");
  std::vector<Device*> out;
  Vec2 origin = dev.position_at_time(now());
  for (auto& d : devices_) {
    if (d.get() == &dev) continue;
    if (env::distance(origin, d->position_at_time(now())) <= r_c + des::kTimeEpsilon) {
      out.push_back(d.get());
    }
  }
  return out;
}

void Simulation::deliver_send(const Device& from, const std::string& sender,
                              const std::string& to, env::Performative perf,
                              const bdi::Term& payload) {
  AgentRuntime* target = agent(to);
  if (!target) return;  // unknown recipient silently misses
  Device& dest = *target->device;
  if (&dest != &from) {
    double d = env::distance(from.position_at_time(now()),
                             dest.position_at_time(now()));
    if (d > comm_range_ + des::kTimeEpsilon) return;  // out of range at send time
  }
  dest.mailboxes[to].push_back({sender, perf, payload});
}

void Simulation::deliver_broadcast(const Device& from, const std::string& sender,
                                   env::Performative perf,
                                   const bdi::Term& payload) {
  for (auto& d : devices_) {
    if (d.get() != &from) {
      double dist = env::distance(from.position_at_time(now()),
                                  d->position_at_time(now()));
      if (dist > comm_range_ + des::kTimeEpsilon) continue;
    }
    for (auto& a : d->agents) {
      if (a->name() == sender) continue;
      d->mailboxes[a->name()].push_back({sender, perf, payload});
    }
  }
}

std::vector<bdi::Term> Simulation::gather_percepts(const Device& dev) {
  Vec2 pos = dev.position_at_time(now());
  std::vector<bdi::Term> out;
  out.push_back(bdi::Term::compound(
      "pos", {bdi::Term::number(pos.x), bdi::Term::number(pos.y)}));
  out.push_back(bdi::Term::compound("time", {bdi::Term::number(now())}));
  for (const auto& [key, value] : dev.kv_store) out.push_back(value);
  return out;
}

void Simulation::schedule_sense(AgentRuntime& agent, SimTime at) {
  kernel_.schedule(at, des::kNormalTier, agent.name() + "/sense",
                   [this, &agent] { on_sense(agent); });
}

void Simulation::schedule_next(AgentRuntime& agent, Phase phase,
                               const dist::TimeDistribution& dist) {
  SimTime at = dist.next_occurrence(now(), agent.phase_rng);
  int tier = dist.is_asap() ? des::kChainedPhaseTier : des::kNormalTier;
  const char* label = phase == Phase::Deliberate ? "/deliberate" : "/act";
  auto handler = phase == Phase::Deliberate
                     ? std::function<void()>([this, &agent] { on_deliberate(agent); })
                     : std::function<void()>([this, &agent] { on_act(agent); });
  kernel_.schedule(at, tier, agent.name() + label, std::move(handler));
}

void Simulation::on_sense(AgentRuntime& agent) {
  agent.sched.cycle_start = now();
  env::ExternalInput input;
  input.percepts = gather_percepts(*agent.device);
  auto& box = agent.device->mailboxes[agent.name()];
  input.messages.assign(box.begin(), box.end());
  box.clear();
  bdi::sense(agent.state, input);
  schedule_next(agent, Phase::Deliberate, agent.sched.deliberate_dist);
}

void Simulation::on_deliberate(AgentRuntime& agent) {
  agent.selected = bdi::deliberate(agent.state);
  schedule_next(agent, Phase::Act, agent.sched.act_dist);
}

void Simulation::on_act(AgentRuntime& agent) {
  if (agent.selected) {
    SimEnvHandle handle(*this, agent);
    bdi::act(agent.state, *agent.selected, handle);
    agent.selected.reset();
  }
  agent.sched.cycles_completed++;
  // Next sense at max(act completion, cycle start + sampled interval): the
  // configured frequency is a maximum, an overrunning cycle delays the next.
  SimTime next =
      agent.sched.sense_dist.next_occurrence(agent.sched.cycle_start,
                                             agent.phase_rng);
  schedule_sense(agent, std::max(now(), next));
}

}  // namespace bdisim::sim
