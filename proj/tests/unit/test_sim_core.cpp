#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <tuple>
#include <vector>

#include "ringsim/sim_core.hpp"

using namespace ringsim;

TEST_CASE("equal-time events dispatch in insertion order") {
  Engine e;
  e.schedule(nanoseconds(5), EventKind::FlowStart, {1, 0, 0});
  e.schedule(nanoseconds(5), EventKind::FlowStart, {2, 0, 0});
  std::vector<std::uint32_t> seen;
  e.run_until(nanoseconds(10), [&](const Event& ev) { seen.push_back(ev.payload.a); });
  CHECK(seen == std::vector<std::uint32_t>{1, 2});
}

TEST_CASE("event at now dispatches before the clock moves") {
  Engine e;
  e.schedule(nanoseconds(0), EventKind::FlowStart);
  SimTime at{-1};
  e.run_until(nanoseconds(100), [&](const Event&) { at = e.now(); });
  CHECK(at == nanoseconds(0));
  CHECK(e.now() == nanoseconds(100));
}

TEST_CASE("run_until boundaries") {
  Engine empty;
  CHECK(empty.run_until(seconds(1), [](const Event&) {}) == 0);
  CHECK(empty.now() == seconds(1));

  Engine e;
  for (int us : {1, 2, 3}) e.schedule(microseconds(us), EventKind::FlowStart);
  CHECK(e.run_until(microseconds(2), [](const Event&) {}) == 2);
  CHECK(e.pending() == 1);
}

TEST_CASE("scheduling in the past is a contract violation") {
  Engine e;
  e.schedule(microseconds(5), EventKind::FlowStart);
  e.run_until(microseconds(5), [](const Event&) {});
  CHECK_THROWS_AS(e.schedule(microseconds(4), EventKind::FlowStart), ContractViolation);
}

TEST_CASE("1e6 random events dispatch in (fire_at, seq) order") {
  Engine e;
  Rng rng(7);
  std::vector<std::pair<std::int64_t, std::uint64_t>> expect;
  for (int i = 0; i < 1'000'000; ++i) {
    const auto t = static_cast<std::int64_t>(rng.below(50'000));
    const std::uint64_t seq = e.schedule(nanoseconds(t), EventKind::FlowStart);
    expect.emplace_back(t, seq);
  }
  std::sort(expect.begin(), expect.end());
  std::vector<std::pair<std::int64_t, std::uint64_t>> got;
  got.reserve(expect.size());
  SimTime last{};
  bool monotone = true;
  e.run_until(seconds(1), [&](const Event& ev) {
    monotone = monotone && ev.fire_at >= last;
    last = ev.fire_at;
    got.emplace_back(ev.fire_at.ns, ev.seq);
  });
  CHECK(monotone);
  CHECK(got == expect);
}

TEST_CASE("handlers may schedule more work") {
  Engine e;
  e.schedule(nanoseconds(1), EventKind::FlowStart);
  int n = 0;
  e.run_until(nanoseconds(100), [&](const Event&) {
    if (++n < 10) e.schedule_in(nanoseconds(3), EventKind::FlowStart);
  });
  CHECK(n == 10);
}

TEST_CASE("engine copy is an independent snapshot") {
  Engine a;
  a.schedule(nanoseconds(10), EventKind::FlowStart, {1, 0, 0});
  a.schedule(nanoseconds(20), EventKind::FlowStart, {2, 0, 0});
  a.run_until(nanoseconds(10), [](const Event&) {});
  Engine b = a;
  std::vector<std::uint32_t> ra, rb;
  a.run_until(nanoseconds(30), [&](const Event& ev) { ra.push_back(ev.payload.a); });
  b.run_until(nanoseconds(30), [&](const Event& ev) { rb.push_back(ev.payload.a); });
  CHECK(ra == rb);
  CHECK(ra == std::vector<std::uint32_t>{2});
}

TEST_CASE("rng determinism and range") {
  Rng a(42), b(42);
  CHECK(a.uniform01() == b.uniform01());
  CHECK(a.uniform01() == b.uniform01());
  Rng c(43);
  CHECK(Rng(42).uniform01() != c.uniform01());

  Rng r(1);
  double sum = 0;
  for (int i = 0; i < 100'000; ++i) {
    const double u = r.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / 100'000 - 0.5) < 0.01);
}

TEST_CASE("named substreams are independent") {
  Rng root(99);
  Rng mark = root.substream("marking");
  Rng ecmp = root.substream("ecmp");
  // Drawing on one stream must not move the other.
  Rng ecmp2 = root.substream("ecmp");
  for (int i = 0; i < 10; ++i) mark.uniform01();
  CHECK(ecmp.next_u64() == ecmp2.next_u64());

  Rng x = root.substream("marking");
  Rng y = root.substream("ecmp");
  const int n = 100'000;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double u = x.uniform01(), v = y.uniform01();
    sx += u;
    sy += v;
    sxx += u * u;
    syy += v * v;
    sxy += u * v;
  }
  const double cov = sxy / n - (sx / n) * (sy / n);
  const double corr = cov / std::sqrt((sxx / n - sx * sx / n / n) * (syy / n - sy * sy / n / n));
  CHECK(std::abs(corr) < 0.05);
}

TEST_CASE("exponential draws have the requested mean") {
  Rng r(5);
  double sum = 0;
  for (int i = 0; i < 100'000; ++i) sum += r.exponential(1000.0);
  CHECK(std::abs(sum / 100'000 - 1000.0) < 15.0);
}
