#pragma once

// Per-job progress tracking and selective ECN throttling of outpacing flows.
//
// A switch keeps one PerJobStateBlock per registered job. Every dequeued
// packet of that job is run through process_packet(), which updates the
// progress anchors (step_min, psn_rec), the windowed traffic counters, and
// returns whether the packet should carry a throttling CE mark. Once per
// window, window_tick() folds the counters into the aggressiveness factor.

#include <cstdint>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ringsim/sim_core.hpp"

namespace ringsim::symphony {

enum class HwMode : std::uint8_t { exact, table_approx };

/// num / 2^shift. Keeps the outpacing check a shift-and-compare.
struct DyadicRatio {
  std::uint32_t num = 1;
  std::uint32_t shift = 2;

  double value() const { return static_cast<double>(num) / static_cast<double>(1ULL << shift); }

  /// Exact dyadic representation with shift <= 20; throws std::invalid_argument otherwise.
  static DyadicRatio from_double(double v);
};

struct SymphonyParams {
  double k = 0.01;
  DyadicRatio tau{1, 2};
  SimTime t_win = microseconds(100);
  std::uint32_t n_warmup = 100;
  std::uint32_t n_sample = 50;
  HwMode hw_mode = HwMode::exact;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

enum class Classification : std::uint8_t { lagging, outpacing, warmup };

std::string_view to_string(Classification c);

struct MarkDecision {
  bool mark = false;
  double delta = 0.0;
  double probability = 0.0;
  Classification classified_as = Classification::lagging;
};

struct PerJobStateBlock {
  std::uint32_t step_min = 0;
  std::uint32_t psn_rec = 0;         // marking reference: max step_min PSN over previous + current window
  std::uint32_t psn_rec_window = 0;  // max step_min PSN seen in the current window
  std::uint32_t alpha = 1;
  std::uint32_t cnt_total = 0;
  std::uint32_t cnt_op = 0;
  SimTime last_window_start{};

  bool operator==(const PerJobStateBlock&) const = default;
};

/// alpha * psn / psn_rec. psn_rec must be non-zero.
double progress_gap(std::uint32_t alpha, std::uint32_t psn, std::uint32_t psn_rec);

/// min(1, k * delta).
double marking_probability(double delta, double k);

/// Lookup-table approximation of min(1, k * delta): the product is split
/// into a power-of-two exponent and a 4-bit mantissa bucket, and the
/// bucket's log-midpoint is read back from a 16-entry table.
double hw_marking_probability(double delta, double k);

/// cnt_op >= tau * cnt_total, evaluated without division.
bool outpacing_check(std::uint32_t cnt_op, std::uint32_t cnt_total, DyadicRatio tau);

/// Closes the current window: adjusts alpha (subject to the sample guard),
/// clears the counters, and rolls the PSN reference.
void window_tick(PerJobStateBlock& state, const SymphonyParams& params, SimTime now);

/// One dequeued packet. Draws exactly one coin from `coin` iff the packet is
/// classified as outpacing.
MarkDecision process_packet(PerJobStateBlock& state, std::uint32_t step, std::uint32_t psn,
                            bool is_last, const SymphonyParams& params, Rng& coin);

/// Job_ID -> state block for one switch. Unknown jobs pass through untouched.
class JobTable {
 public:
  void register_job(std::uint32_t job_id, SimTime window_start = {});
  bool contains(std::uint32_t job_id) const { return index_.contains(job_id); }
  std::size_t size() const { return blocks_.size(); }

  PerJobStateBlock* lookup(std::uint32_t job_id);
  const PerJobStateBlock* lookup(std::uint32_t job_id) const;

  MarkDecision process(std::uint32_t job_id, std::uint32_t step, std::uint32_t psn, bool is_last,
                       const SymphonyParams& params, Rng& coin);

  std::vector<PerJobStateBlock>& blocks() { return blocks_; }
  const std::vector<PerJobStateBlock>& blocks() const { return blocks_; }

  void clear() {
    blocks_.clear();
    index_.clear();
  }

  /// Bytes held by the state blocks themselves (the register-memory analogue).
  std::size_t state_bytes() const { return blocks_.size() * sizeof(PerJobStateBlock); }

 private:
  std::vector<PerJobStateBlock> blocks_;
  std::unordered_map<std::uint32_t, std::uint32_t> index_;
};

}  // namespace ringsim::symphony
