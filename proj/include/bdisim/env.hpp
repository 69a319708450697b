#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "bdisim/term.hpp"

namespace bdisim::env {

struct Vec2 {
  double x = 0;
  double y = 0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double norm() const { return std::hypot(x, y); }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

enum class Performative { Tell, Achieve };

struct Message {
  std::string sender;
  Performative performative = Performative::Tell;
  bdi::Term payload;  // ground
};

/// Everything an agent receives during one sense phase.
struct ExternalInput {
  std::vector<bdi::Term> percepts;  // ground beliefs
  std::vector<Message> messages;
};

class UnknownActionError : public std::runtime_error {
 public:
  explicit UnknownActionError(const std::string& name)
      : std::runtime_error("unknown action: " + name), action_(name) {}
  const std::string& action() const { return action_; }

 private:
  std::string action_;
};

/// The portable environment contract. This is the only surface an agent
/// program may touch: no system clock, no global RNG, no direct network
/// access. Implemented once per backend (simulated and live).
class EnvironmentHandle {
 public:
  virtual ~EnvironmentHandle() = default;

  /// Seconds since run start (virtual clock in simulation, wall clock live).
  /// Monotone non-decreasing across calls within one agent's lifetime.
  virtual double now() = 0;

  /// Uniform draw in [0, 1) from the agent's seeded stream.
  virtual double random_uniform() = 0;

  /// Snapshot of the current percepts; contains at least pos(x, y) and
  /// time(t) of the hosting device.
  virtual std::vector<bdi::Term> perceive() = 0;

  /// Dispatches a named action. Throws UnknownActionError when the name is
  /// not in the backend's action table.
  virtual void act(const std::string& name,
                   const std::vector<bdi::Term>& args) = 0;

  /// Unicast; recipients out of communication range silently miss the
  /// message (range checked once, at send time).
  virtual void send(const std::string& to, Performative performative,
                    const bdi::Term& payload) = 0;

  /// Delivered to exactly the agents within communication range.
  virtual void broadcast(Performative performative,
                         const bdi::Term& payload) = 0;
};

/// Capabilities an action implementation may use to affect the hosting
/// device and the world. Backends provide one per dispatch.
class ActionContext {
 public:
  virtual ~ActionContext() = default;

  virtual double now() const = 0;
  virtual Vec2 self_position() const = 0;

  /// Starts (or re-targets) movement toward `target`, capped at the
  /// backend's maximum speed.
  virtual void move_to(Vec2 target) = 0;

  /// Stops any ongoing movement at the current position.
  virtual void stop_movement() = 0;

  virtual void send(const std::string& to, Performative performative,
                    const bdi::Term& payload) = 0;
  virtual void broadcast(Performative performative,
                         const bdi::Term& payload) = 0;
};

using ActionFn =
    std::function<void(ActionContext&, const std::vector<bdi::Term>&)>;

/// Named action registry shared by both backends.
class ActionTable {
 public:
  void add(const std::string& name, ActionFn fn) { actions_[name] = std::move(fn); }
  bool contains(const std::string& name) const { return actions_.count(name) > 0; }

  void dispatch(const std::string& name, ActionContext& ctx,
                const std::vector<bdi::Term>& args) const {
    auto it = actions_.find(name);
    if (it == actions_.end()) throw UnknownActionError(name);
    it->second(ctx, args);
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : actions_) out.push_back(k);
    return out;
  }

 private:
  std::map<std::string, ActionFn> actions_;
};

/// Baseline movement actions every backend offers: moveTo(x, y) and hover().
inline void register_builtin_actions(ActionTable& actions) {
  actions.add("moveTo",
              [](ActionContext& ctx, const std::vector<bdi::Term>& args) {
                if (args.size() != 2 ||
                    args[0].kind() != bdi::Term::Kind::Number ||
                    args[1].kind() != bdi::Term::Kind::Number) {
                  throw std::runtime_error("moveTo expects two numeric arguments");
                }
                ctx.move_to({args[0].value(), args[1].value()});
              });
  actions.add("hover", [](ActionContext& ctx, const std::vector<bdi::Term>&) {
    ctx.stop_movement();
  });
}

}  // namespace bdisim::env
