#include <doctest.h>

#include <vector>

#include "bdisim/des.hpp"

using namespace bdisim::des;

TEST_CASE("rng streams are reproducible per (seed, label)") {
  RngStream a(42, "x");
  RngStream b(42, "x");
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("rng streams with distinct labels differ") {
  RngStream a(42, "x");
  RngStream b(42, "y");
  int same = 0;
  for (int i = 0; i < 64; ++i) {
    if (a.next_u64() == b.next_u64()) ++same;
  }
  CHECK(same == 0);
}

TEST_CASE("fork extends the label and is independent of parent draws") {
  RngStream parent(7, "root");
  RngStream child = parent.fork("sub");
  CHECK(child.label() == "root/sub");
  // Draws on the parent do not shift the child's sequence.
  RngStream parent2(7, "root");
  (void)parent2.next_u64();
  (void)parent2.next_u64();
  RngStream child2 = parent2.fork("sub");
  for (int i = 0; i < 32; ++i) CHECK(child.next_u64() == child2.next_u64());
}

TEST_CASE("uniform draws stay in [0, 1)") {
  RngStream r(1, "u");
  for (int i = 0; i < 10000; ++i) {
    double u = r.next_uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("kernel fires events in (time, priority, fifo) order") {
  Kernel k;
  std::vector<int> order;
  k.schedule(2.0, "a", [&] { order.push_back(1); });
  k.schedule(1.0, "b", [&] { order.push_back(2); });
  k.schedule(1.0, "c", [&] { order.push_back(3); });           // FIFO after b
  k.schedule(1.0, kChainedPhaseTier, "d", [&] { order.push_back(4); });  // jumps queue
  k.run_until(5.0);
  CHECK(order == std::vector<int>{4, 2, 3, 1});
  CHECK(k.now() == 5.0);
}

TEST_CASE("events scheduled from handlers run in the same sweep") {
  Kernel k;
  std::vector<std::string> seen;
  k.schedule(1.0, "outer", [&] {
    seen.push_back("outer");
    k.schedule(1.0, "inner", [&] { seen.push_back("inner"); });
  });
  k.run_until(1.0);
  CHECK(seen == std::vector<std::string>{"outer", "inner"});
}

TEST_CASE("scheduling strictly in the past is rejected") {
  Kernel k;
  k.schedule(1.0, "tick", [] {});
  k.run_until(2.0);
  CHECK_THROWS_AS(k.schedule(1.5, "late", [] {}), SchedulingError);
  // Within epsilon of the clock is clamped, not rejected.
  CHECK_NOTHROW(k.schedule(k.now() - kTimeEpsilon / 2, "close", [] {}));
}

TEST_CASE("run_until stops at the horizon and advances the clock") {
  Kernel k;
  int fired = 0;
  k.schedule(1.0, "in", [&] { ++fired; });
  k.schedule(3.0, "out", [&] { ++fired; });
  std::uint64_t n = k.run_until(2.0);
  CHECK(n == 1);
  CHECK(fired == 1);
  CHECK(k.now() == 2.0);
  CHECK(k.pending() == 1);
  k.run_until(3.0);
  CHECK(fired == 2);
}

TEST_CASE("trace records label@time in firing order") {
  Kernel k;
  k.schedule(0.5, "first", [] {});
  k.schedule(1.5, "second", [] {});
  k.run_until(2.0);
  REQUIRE(k.trace().size() == 2);
  CHECK(k.trace()[0] == "first@0.5");
  CHECK(k.trace()[1] == "second@1.5");
}

TEST_CASE("handler exceptions surface as EventHandlerError with the label") {
  Kernel k;
  k.schedule(1.0, "boom", [] { throw std::runtime_error("bad"); });
  try {
    k.run_until(2.0);
    FAIL("expected EventHandlerError");
  } catch (const EventHandlerError& e) {
    CHECK(e.event_label() == "boom");
  }
}
