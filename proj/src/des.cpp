#include "bdisim/des.hpp"

#include <cmath>
#include <cstdio>

namespace bdisim::des {

namespace {

std::uint64_t splitmix64_step(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// FNV-1a over the label, then mixed with the seed so that (seed, label)
// pairs map to well-separated stream states.
std::uint64_t stream_state(std::uint64_t seed, const std::string& label) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  std::uint64_t x = seed ^ h;
  // Two scrambling rounds decorrelate nearby seeds and labels.
  splitmix64_step(x);
  return splitmix64_step(x) + (x ^ h);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::string label)
    : seed_(seed), label_(std::move(label)), state_(stream_state(seed, label_)) {}

RngStream RngStream::fork(std::string_view label) const {
  return RngStream(seed_, label_ + "/" + std::string(label));
}

std::uint64_t RngStream::next_u64() { return splitmix64_step(state_); }

double RngStream::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_exponential(double rate) {
  // -log(1 - u) is strictly positive since u < 1.
  double u = next_uniform();
  return -std::log1p(-u) / rate;
}

double RngStream::next_weibull(double shape, double scale) {
  double u = next_uniform();
  return scale * std::pow(-std::log1p(-u), 1.0 / shape);
}

std::uint64_t Kernel::schedule(SimTime fire_at, int priority, std::string label,
                               std::function<void()> handler) {
  if (!(fire_at >= clock_ - kTimeEpsilon)) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "cannot schedule '%s' at t=%.9g: clock is already at %.9g",
                  label.c_str(), fire_at, clock_);
    throw SchedulingError(buf);
  }
  if (!std::isfinite(fire_at)) {
    throw SchedulingError("cannot schedule '" + label + "' at non-finite time");
  }
  if (fire_at < clock_) fire_at = clock_;  // within epsilon of the clock
  return queue_.push(fire_at, priority, std::move(label), std::move(handler));
}

std::uint64_t Kernel::run_until(SimTime t_end) {
  if (t_end < clock_) {
    throw SchedulingError("run_until target precedes the current clock");
  }
  std::uint64_t processed = 0;
  while (!queue_.empty() && queue_.top().fire_at <= t_end) {
    ScheduledEvent ev = queue_.pop();
    clock_ = ev.fire_at;
    if (trace_enabled_) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "@%.9g", ev.fire_at);
      trace_.push_back(ev.label + buf);
    }
    try {
      ev.handler();
    } catch (const std::exception& e) {
      throw EventHandlerError(ev.label, e.what());
    }
    ++processed;
  }
  clock_ = t_end;
  return processed;
}

}  // namespace bdisim::des
