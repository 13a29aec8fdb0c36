#include <doctest.h>

#include <cmath>

#include "../common/reference_marker.hpp"
#include "ringsim/symphony.hpp"

using namespace ringsim;
using namespace ringsim::symphony;

namespace {

SymphonyParams defaults() { return SymphonyParams{}; }

PerJobStateBlock block(std::uint32_t step_min, std::uint32_t psn_rec, std::uint32_t alpha = 1) {
  PerJobStateBlock s;
  s.step_min = step_min;
  s.psn_rec = psn_rec;
  s.psn_rec_window = psn_rec;
  s.alpha = alpha;
  return s;
}

}  // namespace

TEST_CASE("LAST advances step_min and clears the reference") {
  Rng coin(1);
  auto s = block(5, 300);
  const auto d = process_packet(s, 5, 301, true, defaults(), coin);
  CHECK(s.step_min == 6);
  CHECK(s.psn_rec == 0);
  CHECK(s.psn_rec_window == 0);
  CHECK_FALSE(d.mark);
}

TEST_CASE("a straggler step corrects step_min immediately") {
  Rng coin(1);
  auto s = block(5, 300);
  const auto d = process_packet(s, 3, 17, false, defaults(), coin);
  CHECK(s.step_min == 3);
  CHECK(s.psn_rec == 17);
  CHECK_FALSE(d.mark);
  CHECK(d.classified_as == Classification::lagging);
}

TEST_CASE("outpacing packet probability") {
  Rng coin(1);
  auto s = block(5, 200, 2);
  const auto d = process_packet(s, 6, 400, false, defaults(), coin);
  CHECK(d.classified_as == Classification::outpacing);
  CHECK(d.delta == doctest::Approx(4.0));
  CHECK(d.probability == doctest::Approx(0.04));
}

TEST_CASE("warmup guard") {
  Rng coin(1);
  auto s = block(5, 50);
  const auto d = process_packet(s, 6, 400, false, defaults(), coin);
  CHECK(d.classified_as == Classification::warmup);
  CHECK_FALSE(d.mark);
}

TEST_CASE("coins are drawn only for outpacing packets") {
  Rng a(9), b(9);
  auto s = block(5, 50);
  process_packet(s, 5, 60, false, defaults(), a);   // lagging
  process_packet(s, 6, 61, false, defaults(), a);   // warmup
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("progress gap and probability") {
  CHECK(progress_gap(1, 77, 77) == 1.0);
  CHECK(progress_gap(3, 100, 50) == 6.0);
  CHECK_THROWS_AS(progress_gap(1, 1, 0), ContractViolation);
  CHECK(marking_probability(0.0, 0.01) == 0.0);
  CHECK(marking_probability(200.0, 0.01) == 1.0);
  CHECK(marking_probability(4.0, 0.01) == doctest::Approx(0.04));

  Rng r(4);
  for (int i = 0; i < 1000; ++i) {
    const auto alpha = static_cast<std::uint32_t>(1 + r.below(20));
    const auto psn = static_cast<std::uint32_t>(1 + r.below(5000));
    const auto rec = static_cast<std::uint32_t>(1 + r.below(5000));
    const double d = progress_gap(alpha, psn, rec);
    CHECK(progress_gap(alpha, psn + 1, rec) > d);
    CHECK(progress_gap(alpha + 1, psn, rec) > d);
    CHECK(progress_gap(alpha, psn, rec + 1) < d);
  }
}

TEST_CASE("outpacing check examples") {
  const DyadicRatio quarter{1, 2};
  CHECK(outpacing_check(30, 100, quarter));
  CHECK_FALSE(outpacing_check(24, 100, quarter));
  CHECK(outpacing_check(25, 100, quarter));
}

TEST_CASE("window tick") {
  const auto p = defaults();
  SUBCASE("alpha grows when outpacing share is high") {
    PerJobStateBlock s;
    s.cnt_op = 300;
    s.cnt_total = 1000;
    window_tick(s, p, p.t_win);
    CHECK(s.alpha == 2);
    CHECK(s.cnt_total == 0);
    CHECK(s.cnt_op == 0);
  }
  SUBCASE("alpha floors at 1") {
    PerJobStateBlock s;
    s.cnt_op = 100;
    s.cnt_total = 1000;
    window_tick(s, p, p.t_win);
    CHECK(s.alpha == 1);
  }
  SUBCASE("sparse windows leave alpha alone") {
    PerJobStateBlock s;
    s.alpha = 4;
    s.cnt_op = 10;
    s.cnt_total = 10;
    window_tick(s, p, p.t_win);
    CHECK(s.alpha == 4);
  }
  SUBCASE("ten saturated windows from alpha 1") {
    PerJobStateBlock s;
    for (int w = 1; w <= 10; ++w) {
      s.cnt_op = 1000;
      s.cnt_total = 1000;
      window_tick(s, p, nanoseconds(p.t_win.ns * w));
    }
    CHECK(s.alpha == 11);
  }
  SUBCASE("the reference rolls") {
    PerJobStateBlock s;
    s.psn_rec = 10;
    s.psn_rec_window = 40;
    window_tick(s, p, p.t_win);
    CHECK(s.psn_rec == 40);
    CHECK(s.psn_rec_window == 0);
  }
  SUBCASE("early tick is a contract violation") {
    PerJobStateBlock s;
    s.last_window_start = microseconds(50);
    CHECK_THROWS_AS(window_tick(s, p, microseconds(100)), ContractViolation);
  }
}

TEST_CASE("table approximation stays within 25% and keeps the clamps") {
  const double k = 0.01;
  CHECK(hw_marking_probability(0.0, k) == 0.0);
  CHECK(hw_marking_probability(1000.0, k) == 1.0);
  double worst = 0.0;
  for (int i = 0; i <= 400; ++i) {
    // delta from 1e-3/k up to saturation, 40 points per octave
    const double delta = 1e-3 / k * std::pow(2.0, i / 40.0);
    const double exact = marking_probability(delta, k);
    const double approx = hw_marking_probability(delta, k);
    if (exact >= 1.0) {
      CHECK(approx == 1.0);
      continue;
    }
    worst = std::max(worst, std::abs(approx - exact) / exact);
  }
  CHECK(worst <= 0.25);
}

TEST_CASE("dyadic tau") {
  CHECK(DyadicRatio::from_double(0.25).value() == 0.25);
  CHECK(DyadicRatio::from_double(0.375).value() == 0.375);
  CHECK_THROWS_AS(DyadicRatio::from_double(0.3), std::invalid_argument);
  SymphonyParams p;
  p.tau = DyadicRatio{0, 2};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("job table isolation and pass-through") {
  JobTable t;
  t.register_job(1);
  t.register_job(2);
  Rng coin(1);
  const auto p = defaults();
  const auto d = t.process(99, 7, 500, false, p, coin);
  CHECK_FALSE(d.mark);
  CHECK(d.classified_as == Classification::lagging);

  // Interleave two jobs; each must match a block that saw only its own packets.
  PerJobStateBlock solo1, solo2;
  Rng c1(3), c2(3);
  Rng rng(11);
  for (int i = 0; i < 20'000; ++i) {
    const std::uint32_t job = 1 + static_cast<std::uint32_t>(rng.below(2));
    const auto step = static_cast<std::uint32_t>(rng.below(4));
    const auto psn = static_cast<std::uint32_t>(1 + rng.below(800));
    const bool last = rng.below(200) == 0;
    t.process(job, step, psn, last, p, c1);
    process_packet(job == 1 ? solo1 : solo2, step, psn, last, p, c2);
  }
  CHECK(*t.lookup(1) == solo1);
  CHECK(*t.lookup(2) == solo2);

  JobTable big;
  for (std::uint32_t j = 0; j < 16'384; ++j) big.register_job(j);
  CHECK(big.state_bytes() <= 1024 * 1024);
}

TEST_CASE("invariants on random traces") {
  const auto p = defaults();
  Rng rng(21), coin(22);
  PerJobStateBlock s;
  std::int64_t now = 0;
  for (int i = 0; i < 100'000; ++i) {
    const auto step = static_cast<std::uint32_t>(rng.below(8));
    const auto psn = static_cast<std::uint32_t>(1 + rng.below(2000));
    const bool last = rng.below(300) == 0;
    const std::uint32_t before_min = s.step_min;
    const auto d = process_packet(s, step, psn, last, p, coin);
    if (step <= s.step_min) CHECK_FALSE(d.mark);
    if (!last && step < before_min) CHECK(s.step_min == step);
    CHECK(d.probability <= 1.0);
    if (d.classified_as != Classification::outpacing) CHECK(d.probability == 0.0);
    if (!last) {
      // duplicate of a non-LAST packet leaves the reference untouched
      const auto copy = s;
      process_packet(s, step, psn, false, p, coin);
      CHECK(s.step_min == copy.step_min);
      CHECK(s.psn_rec == copy.psn_rec);
      CHECK(s.cnt_total == copy.cnt_total + 1);
    }
    if (rng.below(500) == 0) {
      now += p.t_win.ns;
      window_tick(s, p, nanoseconds(now));
      CHECK(s.alpha >= 1);
    }
  }
}

TEST_CASE("engine agrees with the reference on a short randomized trace") {
  SymphonyParams p;
  ref::Params rp;
  Rng gen(5), ca(6), cb(6);
  PerJobStateBlock s;
  ref::State r;
  std::int64_t now = 0;
  for (int i = 0; i < 20'000; ++i) {
    const auto step = static_cast<std::uint32_t>(gen.below(6));
    const auto psn = static_cast<std::uint32_t>(1 + gen.below(1500));
    const bool last = gen.below(400) == 0;
    const auto d = process_packet(s, step, psn, last, p, ca);
    const auto e = ref::process(r, step, psn, last, rp, cb);
    REQUIRE(d.mark == e.mark);
    REQUIRE(d.probability == e.p);
    REQUIRE(s.step_min == r.step_min);
    REQUIRE(s.psn_rec == r.psn_rec);
    if (gen.below(700) == 0) {
      now += p.t_win.ns;
      window_tick(s, p, nanoseconds(now));
      ref::tick(r, rp);
      REQUIRE(s.alpha == r.alpha);
    }
  }
}
