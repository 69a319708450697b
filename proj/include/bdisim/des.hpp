#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bdisim::des {

/// Simulated time in seconds. Always finite and non-negative.
using SimTime = double;

/// Tolerance for timestamp equality checks.
inline constexpr double kTimeEpsilon = 1e-9;

/// Priority tier for events that must complete before other events
/// scheduled at the same instant (chained control-loop phases).
inline constexpr int kNormalTier = 0;
inline constexpr int kChainedPhaseTier = 1;

/// Deterministic splittable random stream.
///
/// A stream is fully identified by (seed, label): two streams built from the
/// same pair produce identical sample sequences, and streams with distinct
/// labels are statistically independent. Forking derives a child stream whose
/// label extends the parent's, so draws on one stream never perturb another.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string label);

  /// Derives a child stream labelled `parent_label + "/" + label`.
  RngStream fork(std::string_view label) const;

  std::uint64_t next_u64();

  /// Uniform draw in [0, 1).
  double next_uniform();

  /// Exponential inter-arrival with the given rate (inverse transform).
  double next_exponential(double rate);

  /// Weibull draw with the given shape k and scale s (inverse transform).
  double next_weibull(double shape, double scale);

  std::uint64_t seed() const { return seed_; }
  const std::string& label() const { return label_; }

 private:
  std::uint64_t seed_;
  std::string label_;
  std::uint64_t state_;
};

class SchedulingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an event handler throws; carries the offending event label.
class EventHandlerError : public std::runtime_error {
 public:
  EventHandlerError(std::string label, const std::string& what)
      : std::runtime_error("event '" + label + "' failed: " + what),
        event_label_(std::move(label)) {}
  const std::string& event_label() const { return event_label_; }

 private:
  std::string event_label_;
};

struct ScheduledEvent {
  SimTime fire_at = 0;
  int priority = kNormalTier;  // higher fires first at equal time
  std::uint64_t seq = 0;       // insertion order, assigned by the kernel
  std::string label;
  std::function<void()> handler;
};

struct EventOrder {
  // Min-heap: earliest time first, then higher priority, then FIFO by seq.
  bool operator()(const ScheduledEvent& a, const ScheduledEvent& b) const {
    if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
    if (a.priority != b.priority) return a.priority < b.priority;
    return a.seq > b.seq;
  }
};

/// Future-event list ordered by (fire_at, -priority, seq).
class EventQueue {
 public:
  std::uint64_t push(SimTime fire_at, int priority, std::string label,
                     std::function<void()> handler) {
    ScheduledEvent ev;
    ev.fire_at = fire_at;
    ev.priority = priority;
    ev.seq = next_seq_++;
    ev.label = std::move(label);
    ev.handler = std::move(handler);
    std::uint64_t id = ev.seq;
    heap_.push(std::move(ev));
    return id;
  }

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  const ScheduledEvent& top() const { return heap_.top(); }

  ScheduledEvent pop() {
    ScheduledEvent ev = heap_.top();
    heap_.pop();
    return ev;
  }

 private:
  std::priority_queue<ScheduledEvent, std::vector<ScheduledEvent>, EventOrder>
      heap_;
  std::uint64_t next_seq_ = 0;
};

/// Single-threaded discrete-event kernel: virtual clock plus future-event
/// list. One kernel instance is driven by exactly one execution context.
class Kernel {
 public:
  SimTime now() const { return clock_; }

  /// Schedules an event. Scheduling strictly in the past is rejected.
  std::uint64_t schedule(SimTime fire_at, int priority, std::string label,
                         std::function<void()> handler);

  std::uint64_t schedule(SimTime fire_at, std::string label,
                         std::function<void()> handler) {
    return schedule(fire_at, kNormalTier, std::move(label), std::move(handler));
  }

  /// Processes all events with fire_at <= t_end in key order, then advances
  /// the clock to t_end. Returns the number of events processed.
  std::uint64_t run_until(SimTime t_end);

  /// Ordered labels of processed events, "label@time".
  const std::vector<std::string>& trace() const { return trace_; }

  void set_trace_enabled(bool enabled) { trace_enabled_ = enabled; }

  std::size_t pending() const { return queue_.size(); }

 private:
  SimTime clock_ = 0;
  EventQueue queue_;
  std::vector<std::string> trace_;
  bool trace_enabled_ = true;
};

}  // namespace bdisim::des
