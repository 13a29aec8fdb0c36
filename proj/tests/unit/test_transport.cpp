#include <doctest.h>

#include <algorithm>

#include "ringsim/transport.hpp"

using namespace ringsim;

TEST_CASE("packetization") {
  CHECK(packet_count(1 << 20) == 1024);
  CHECK(packet_count(1025) == 2);
  CHECK(packet_size(1025, 1) == 1024);
  CHECK(packet_size(1025, 2) == 1);
  CHECK(packet_size(1 << 20, 1024) == 1024);
}

TEST_CASE("cnp cut from alpha 0 at 10G") {
  DcqcnParams p;
  RateState s = initial_rate_state(10e9, p);
  s.cc_alpha = 0.0;
  on_cnp(s, p);
  CHECK(s.cc_alpha == doctest::Approx(1.0 / 256));
  CHECK(s.current_rate == doctest::Approx(10e9 * (1 - 1.0 / 512)));
  CHECK(s.current_rate / 1e9 == doctest::Approx(9.98).epsilon(0.001));
  CHECK(s.target_rate == 10e9);
}

TEST_CASE("rate floor holds at r_min") {
  DcqcnParams p;
  RateState s = initial_rate_state(10e9, p);
  s.current_rate = p.r_min_bps;
  on_cnp(s, p);
  CHECK(s.current_rate == p.r_min_bps);
}

TEST_CASE("20 consecutive CNPs follow the hand-iterated recurrence") {
  DcqcnParams p;
  RateState s = initial_rate_state(10e9, p);
  double a = p.alpha_init, r = 10e9;
  for (int i = 0; i < 20; ++i) {
    on_cnp(s, p);
    a = a * 255.0 / 256.0 + 1.0 / 256.0;
    r = r * (1.0 - a / 2.0);
    if (r < 10e6) r = 10e6;
    CHECK(s.cc_alpha == doctest::Approx(a).epsilon(1e-12));
    CHECK(s.current_rate == doctest::Approx(r).epsilon(1e-12));
  }
}

TEST_CASE("rate increase phases") {
  DcqcnParams p;
  RateState s = initial_rate_state(10e9, p);
  s.current_rate = 5e9;
  s.target_rate = 9e9;
  rate_increase_tick(s, 10e9, p);
  CHECK(s.current_rate == doctest::Approx(7e9));

  RateState top = initial_rate_state(10e9, p);
  top.recovery_stage = p.fast_recovery_steps;
  rate_increase_tick(top, 10e9, p);
  CHECK(top.current_rate == 10e9);
}

TEST_CASE("quiet recovery from 1G is monotone and reaches line rate within 10 ms") {
  DcqcnParams p;
  RateState s = initial_rate_state(10e9, p);
  s.current_rate = 1e9;
  s.target_rate = 10e9;
  double prev = s.current_rate;
  const int ticks = static_cast<int>(milliseconds(10).ns / p.rate_timer.ns);
  for (int i = 0; i < ticks; ++i) {
    rate_increase_tick(s, 10e9, p);
    REQUIRE(s.current_rate >= prev);
    REQUIRE(s.current_rate <= 10e9);
    prev = s.current_rate;
  }
  CHECK(s.current_rate == 10e9);
}

TEST_CASE("alpha decay skips periods with a CNP") {
  DcqcnParams p;
  RateState s = initial_rate_state(10e9, p);
  on_cnp(s, p);
  const double a = s.cc_alpha;
  alpha_decay_tick(s, p);
  CHECK(s.cc_alpha == a);
  alpha_decay_tick(s, p);
  CHECK(s.cc_alpha == doctest::Approx(a * (1 - p.g)));
  CHECK(s.cc_alpha >= 0.0);
  CHECK(s.cc_alpha <= 1.0);
}

TEST_CASE("byte counter") {
  DcqcnParams p;
  RateState s;
  CHECK_FALSE(count_sent_bytes(s, 1 << 20, p));  // off by default
  p.byte_counter_bytes = 4096;
  CHECK_FALSE(count_sent_bytes(s, 3000, p));
  CHECK(count_sent_bytes(s, 2000, p));
  CHECK(s.byte_counter == 0);
}

TEST_CASE("cnp limiter") {
  CnpLimiter lim;
  CHECK(lim.admit(microseconds(0), microseconds(50)));
  CHECK_FALSE(lim.admit(microseconds(10), microseconds(50)));
  CHECK(lim.admit(microseconds(50), microseconds(50)));
  // steady CE stream every 1 us -> CNPs exactly 50 us apart
  CnpLimiter l2;
  std::vector<std::int64_t> at;
  for (int us = 0; us < 500; ++us) {
    if (l2.admit(microseconds(us), microseconds(50))) at.push_back(us);
  }
  REQUIRE(at.size() == 10);
  for (std::size_t i = 1; i < at.size(); ++i) CHECK(at[i] - at[i - 1] == 50);
}

TEST_CASE("serialization clock carries remainders") {
  SerializationClock c;
  std::int64_t total = 0;
  for (int i = 0; i < 3; ++i) total += c.next(8, 3'000'000'000ULL).ns;  // 8/3 ns each
  CHECK(total == 8);
}

TEST_CASE("dcqcn param validation") {
  DcqcnParams p;
  p.g = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  DcqcnParams q;
  q.alpha_init = 1.5;
  CHECK_THROWS_AS(q.validate(), std::invalid_argument);
}
