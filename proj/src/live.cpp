#include "bdisim/live.hpp"

#include <atomic>
#include <chrono>
#include <deque>
#include <thread>

#include "bdisim/agent.hpp"
#include "bdisim/des.hpp"

namespace bdisim::live {

namespace {

using Clock = std::chrono::steady_clock;

/// Shared mutable world: one node per agent plus the mailboxes. Every access
/// happens under `mu`; the mutex is recursive because agent threads re-enter
/// through action callbacks while already holding it.
struct LiveWorld {
  struct Node {
    Vec2 pos;
    std::optional<Vec2> target;
    double speed = 0;
  };

  std::recursive_mutex mu;
  Clock::time_point start;
  std::map<std::string, Node> nodes;
  std::map<std::string, std::deque<env::Message>> mailboxes;
  double comm_range = 0;
  double v_max = 0;

  double now() const {
    return std::chrono::duration<double>(Clock::now() - start).count();
  }

  // Callers hold `mu`.
  void deliver(const std::string& sender, const std::string& to,
               env::Performative perf, const bdi::Term& payload) {
    auto it = nodes.find(to);
    if (it == nodes.end()) return;
    if (env::distance(nodes.at(sender).pos, it->second.pos) >
        comm_range + des::kTimeEpsilon) {
      return;
    }
    mailboxes[to].push_back({sender, perf, payload});
  }

  void broadcast(const std::string& sender, env::Performative perf,
                 const bdi::Term& payload) {
    Vec2 from = nodes.at(sender).pos;
    for (const auto& [name, node] : nodes) {
      if (name == sender) continue;
      if (env::distance(from, node.pos) > comm_range + des::kTimeEpsilon) continue;
      mailboxes[name].push_back({sender, perf, payload});
    }
  }
};

class LiveActionContext final : public env::ActionContext {
 public:
  LiveActionContext(LiveWorld& world, std::string self)
      : world_(world), self_(std::move(self)) {}

  double now() const override { return world_.now(); }
  Vec2 self_position() const override { return world_.nodes.at(self_).pos; }
  void move_to(Vec2 target) override {
    LiveWorld::Node& n = world_.nodes.at(self_);
    n.target = target;
    n.speed = world_.v_max;
  }
  void stop_movement() override {
    LiveWorld::Node& n = world_.nodes.at(self_);
    n.target.reset();
    n.speed = 0;
  }
  void send(const std::string& to, env::Performative perf,
            const bdi::Term& payload) override {
    world_.deliver(self_, to, perf, payload);
  }
  void broadcast(env::Performative perf, const bdi::Term& payload) override {
    world_.broadcast(self_, perf, payload);
  }

 private:
  LiveWorld& world_;
  std::string self_;
};

class LiveEnvHandle final : public env::EnvironmentHandle {
 public:
  LiveEnvHandle(LiveWorld& world, const env::ActionTable& actions,
                std::string self, des::RngStream rng)
      : world_(world), actions_(actions), self_(std::move(self)),
        rng_(std::move(rng)) {}

  double now() override { return world_.now(); }
  double random_uniform() override { return rng_.next_uniform(); }

  std::vector<bdi::Term> perceive() override {
    Vec2 pos = world_.nodes.at(self_).pos;
    return {bdi::Term::compound(
                "pos", {bdi::Term::number(pos.x), bdi::Term::number(pos.y)}),
            bdi::Term::compound("time", {bdi::Term::number(world_.now())})};
  }

  void act(const std::string& name,
           const std::vector<bdi::Term>& args) override {
    LiveActionContext ctx(world_, self_);
    actions_.dispatch(name, ctx, args);
  }

  void send(const std::string& to, env::Performative perf,
            const bdi::Term& payload) override {
    world_.deliver(self_, to, perf, payload);
  }
  void broadcast(env::Performative perf, const bdi::Term& payload) override {
    world_.broadcast(self_, perf, payload);
  }

 private:
  LiveWorld& world_;
  const env::ActionTable& actions_;
  std::string self_;
  des::RngStream rng_;
};

void sleep_for_seconds(double s) {
  std::this_thread::sleep_for(std::chrono::duration<double>(s));
}

}  // namespace

LiveResult run_live(const uav::UavSpecs& specs, const uav::ScenarioConfig& cfg,
                    const LiveConfig& live_cfg, std::uint64_t seed) {
  cfg.validate();
  if (!(live_cfg.duration > 0) || !(live_cfg.mover_tick > 0) ||
      !(live_cfg.sample_period > 0)) {
    throw std::invalid_argument("live durations must be positive");
  }

  auto formation = std::make_shared<uav::FormationState>(
      static_cast<int>(specs.followers.size()));
  env::ActionTable actions;
  env::register_builtin_actions(actions);
  uav::register_scenario_actions(actions, cfg, formation);
  uav::validate_plan_actions(actions, specs);

  LiveWorld world;
  world.comm_range = cfg.comm_range;
  world.v_max = cfg.v_max;

  des::RngStream root(seed, "live");
  std::vector<std::shared_ptr<const bdi::AgentSpec>> all;
  all.push_back(specs.leader);
  for (const auto& f : specs.followers) all.push_back(f);

  world.nodes[specs.leader->name] = {{0, 0}, std::nullopt, 0};
  for (const auto& f : specs.followers) {
    des::RngStream rng = root.fork("placement/" + f->name);
    double r = cfg.arena_radius;
    Vec2 p;
    do {
      p = {(2 * rng.next_uniform() - 1) * r, (2 * rng.next_uniform() - 1) * r};
    } while (p.norm() > r);
    world.nodes[f->name] = {p, std::nullopt, 0};
  }
  for (const auto& spec : all) world.mailboxes[spec->name];

  std::atomic<bool> stop{false};
  LiveResult result;
  std::mutex result_mu;
  world.start = Clock::now();

  std::vector<std::thread> threads;
  for (const auto& spec : all) {
    threads.emplace_back([&, spec] {
      bdi::AgentState state = bdi::make_agent_state(spec);
      LiveEnvHandle handle(world, actions, spec->name,
                           root.fork("agent/" + spec->name + "/uniform"));
      double period = live_cfg.cycle_frequency ? 1.0 / *live_cfg.cycle_frequency
                                               : 0.0;
      std::uint64_t cycles = 0;
      while (!stop.load(std::memory_order_relaxed)) {
        double cycle_start = world.now();
        {
          std::lock_guard<std::recursive_mutex> lock(world.mu);
          env::ExternalInput input;
          input.percepts = handle.perceive();
          auto& box = world.mailboxes[spec->name];
          input.messages.assign(box.begin(), box.end());
          box.clear();
          bdi::run_cycle(state, input, handle);
        }
        ++cycles;
        // The configured frequency is a ceiling: a cycle that overruns its
        // period starts the next one immediately.
        double wait = period > 0 ? cycle_start + period - world.now() : 1e-4;
        if (wait > 0) sleep_for_seconds(wait);
      }
      std::lock_guard<std::mutex> lock(result_mu);
      result.cycles[spec->name] = cycles;
    });
  }

  // Movement integrator: advances every node toward its target each tick.
  threads.emplace_back([&] {
    double prev = world.now();
    while (!stop.load(std::memory_order_relaxed)) {
      sleep_for_seconds(live_cfg.mover_tick);
      std::lock_guard<std::recursive_mutex> lock(world.mu);
      double t = world.now();
      double dt = t - prev;
      prev = t;
      for (auto& [name, node] : world.nodes) {
        if (!node.target) continue;
        Vec2 delta = *node.target - node.pos;
        double dist = delta.norm();
        double step = node.speed * dt;
        if (step >= dist || dist <= 0) {
          node.pos = *node.target;
          node.target.reset();
          node.speed = 0;
        } else {
          node.pos = node.pos + delta * (step / dist);
        }
      }
    }
  });

  // Metric sampler.
  threads.emplace_back([&] {
    while (!stop.load(std::memory_order_relaxed)) {
      double begin = world.now();
      {
        std::lock_guard<std::recursive_mutex> lock(world.mu);
        std::map<std::string, Vec2> followers;
        Vec2 leader_pos{0, 0};
        for (const auto& [name, node] : world.nodes) {
          if (name == specs.leader->name) {
            leader_pos = node.pos;
          } else {
            followers[name] = node.pos;
          }
        }
        double err = uav::formation_error(leader_pos, *formation, cfg, followers);
        std::lock_guard<std::mutex> rlock(result_mu);
        result.samples.push_back({world.now(), err});
      }
      double wait = begin + live_cfg.sample_period - world.now();
      if (wait > 0) sleep_for_seconds(wait);
    }
  });

  while (world.now() < live_cfg.duration) {
    if (live_cfg.abort && live_cfg.abort->load(std::memory_order_relaxed)) break;
    sleep_for_seconds(
        std::min(0.05, std::max(1e-3, live_cfg.duration - world.now())));
  }
  stop.store(true, std::memory_order_relaxed);
  for (std::thread& t : threads) t.join();
  result.elapsed = world.now();
  return result;
}

}  // namespace bdisim::live
