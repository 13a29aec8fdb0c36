#pragma once

#include <cstdint>
#include <vector>

#include "ringsim/fabric.hpp"
#include "ringsim/sim_core.hpp"

namespace ringsim {

using JobId = std::uint32_t;
using FlowId = std::uint32_t;
using RingId = std::uint32_t;

/// Payload bytes per packet; header overhead is not modeled.
constexpr std::uint32_t kMtuBytes = 1024;

/// Job id carried by packets that belong to no collective.
constexpr JobId kNonCollectiveJob = 0xffffffffu;

struct Packet {
  JobId job_id = 0;
  FlowId flow_id = 0;
  RingId ring_id = 0;
  std::uint32_t step = 0;
  std::uint32_t psn = 1;  // 1-based
  std::uint32_t size = kMtuBytes;
  bool last = false;
  bool ecn_ce = false;
  bool red_mark = false;
  bool symphony_mark = false;
  std::uint8_t priority = 1;
  std::uint8_t hop = 0;
};

struct FlowSpec {
  FlowId id = 0;
  JobId job_id = 0;
  RingId ring_id = 0;
  std::uint32_t step = 0;  // global step index within the job
  std::uint32_t pass = 0;
  HostId src = 0;
  HostId dst = 0;
  std::uint64_t bytes = 0;
  std::vector<FlowId> depends_on;
};

/// ceil(bytes / mtu).
constexpr std::uint32_t packet_count(std::uint64_t bytes, std::uint32_t mtu = kMtuBytes) {
  return static_cast<std::uint32_t>((bytes + mtu - 1) / mtu);
}

/// Payload size of packet `psn` (1-based) of a flow of `bytes`.
constexpr std::uint32_t packet_size(std::uint64_t bytes, std::uint32_t psn, std::uint32_t mtu = kMtuBytes) {
  const std::uint64_t before = static_cast<std::uint64_t>(psn - 1) * mtu;
  return static_cast<std::uint32_t>(bytes - before < mtu ? bytes - before : mtu);
}

struct DcqcnParams {
  double g = 1.0 / 256.0;
  SimTime cnp_interval = microseconds(50);
  SimTime alpha_period = microseconds(55);
  SimTime rate_timer = microseconds(55);
  std::uint32_t fast_recovery_steps = 5;
  double r_ai_bps = 40e6;
  double r_min_bps = 10e6;
  double alpha_init = 1.0;
  // Bytes sent between byte-counter increase events; 0 disables the counter.
  std::uint64_t byte_counter_bytes = 0;
  SimTime retransmit_timeout = microseconds(500);

  void validate() const;
};

/// Reaction-point state of one sender.
struct RateState {
  double current_rate = 0.0;
  double target_rate = 0.0;
  double cc_alpha = 0.0;
  std::uint64_t byte_counter = 0;
  std::uint32_t recovery_stage = 0;  // increase events since the last cut
  bool cnp_since_alpha_update = false;
};

RateState initial_rate_state(double link_rate_bps, const DcqcnParams& p);

/// Multiplicative decrease on a congestion notification.
void on_cnp(RateState& s, const DcqcnParams& p);

/// One increase event: fast recovery for the first F events, additive after.
void rate_increase_tick(RateState& s, double link_rate_bps, const DcqcnParams& p);

/// Periodic alpha decay; a period that saw a CNP leaves alpha alone.
void alpha_decay_tick(RateState& s, const DcqcnParams& p);

/// Counts sent bytes; returns true when the byte counter fires an increase.
bool count_sent_bytes(RateState& s, std::uint32_t bytes, const DcqcnParams& p);

/// Receiver-side CNP pacing for one flow.
class CnpLimiter {
 public:
  /// True when a CE packet at `now` should produce a CNP.
  bool admit(SimTime now, SimTime interval) {
    if (sent_any_ && now - last_ < interval) return false;
    sent_any_ = true;
    last_ = now;
    return true;
  }

 private:
  SimTime last_{};
  bool sent_any_ = false;
};

/// Serialization time of `bits` at `rate_bps`, carrying the sub-nanosecond
/// remainder so long runs do not drift.
class SerializationClock {
 public:
  SimTime next(std::uint64_t bits, std::uint64_t rate_bps) {
    const unsigned __int128 num = static_cast<unsigned __int128>(bits) * 1'000'000'000ULL + remainder_;
    const auto ns = static_cast<std::uint64_t>(num / rate_bps);
    remainder_ = static_cast<std::uint64_t>(num % rate_bps);
    return nanoseconds(static_cast<std::int64_t>(ns));
  }
  void reset() { remainder_ = 0; }

 private:
  std::uint64_t remainder_ = 0;
};

}  // namespace ringsim
