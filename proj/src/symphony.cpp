#include "ringsim/symphony.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ringsim::symphony {

namespace {

// Log-domain fixed point: 1.0 == 256.
constexpr int kLogOne = 256;
constexpr int kMantissaBuckets = 16;

// log2 of the geometric midpoint of mantissa bucket j, i.e. of
// [1 + j/16, 1 + (j+1)/16), in Q8.
const std::array<int, kMantissaBuckets>& log_table() {
  static const auto table = [] {
    std::array<int, kMantissaBuckets> t{};
    for (int j = 0; j < kMantissaBuckets; ++j) {
      const double lo = 1.0 + static_cast<double>(j) / kMantissaBuckets;
      const double hi = 1.0 + static_cast<double>(j + 1) / kMantissaBuckets;
      t[j] = static_cast<int>(std::lround(std::log2(std::sqrt(lo * hi)) * kLogOne));
    }
    return t;
  }();
  return table;
}

// 2^((b + 0.5) / 16) for each sixteenth of an octave.
const std::array<double, kMantissaBuckets>& exp_table() {
  static const auto table = [] {
    std::array<double, kMantissaBuckets> t{};
    for (int b = 0; b < kMantissaBuckets; ++b) {
      t[b] = std::exp2((static_cast<double>(b) + 0.5) / kMantissaBuckets);
    }
    return t;
  }();
  return table;
}

// Bucketed log2 of a positive value: exponent from the leading bit, the
// fraction from the next four mantissa bits.
int log2_q(double x) {
  int e = 0;
  const double m = std::frexp(x, &e);  // x = m * 2^e, m in [0.5, 1)
  const int j = std::min(kMantissaBuckets - 1,
                         static_cast<int>((2.0 * m - 1.0) * kMantissaBuckets));
  return (e - 1) * kLogOne + log_table()[j];
}

double exp2_q(int q) {
  const int whole = q >= 0 ? q / kLogOne : -((-q + kLogOne - 1) / kLogOne);
  const int frac = q - whole * kLogOne;  // [0, 256)
  const int bucket = frac / (kLogOne / kMantissaBuckets);
  return std::ldexp(exp_table()[bucket], whole);
}

double table_probability_from_log(int log_p) {
  if (log_p >= 0) return 1.0;
  return std::min(1.0, exp2_q(log_p));
}

}  // namespace

DyadicRatio DyadicRatio::from_double(double v) {
  for (std::uint32_t shift = 0; shift <= 20; ++shift) {
    const double scaled = std::ldexp(v, static_cast<int>(shift));
    if (scaled == std::floor(scaled) && scaled >= 0 && scaled < 4294967296.0) {
      return DyadicRatio{static_cast<std::uint32_t>(scaled), shift};
    }
  }
  throw std::invalid_argument("tau must be a dyadic rational (m / 2^s, s <= 20)");
}

void SymphonyParams::validate() const {
  if (!(k >= 0.0) || !std::isfinite(k)) throw std::invalid_argument("symphony.k must be >= 0");
  const double t = tau.value();
  if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("symphony.tau must lie in (0, 1)");
  if (t_win.ns <= 0) throw std::invalid_argument("symphony.t_win must be > 0");
}

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::lagging:
      return "lagging";
    case Classification::outpacing:
      return "outpacing";
    case Classification::warmup:
      return "warmup";
  }
  return "?";
}

double progress_gap(std::uint32_t alpha, std::uint32_t psn, std::uint32_t psn_rec) {
  if (psn_rec == 0) throw ContractViolation("progress_gap with psn_rec == 0");
  return static_cast<double>(alpha) * static_cast<double>(psn) / static_cast<double>(psn_rec);
}

double marking_probability(double delta, double k) { return std::min(1.0, k * delta); }

double hw_marking_probability(double delta, double k) {
  if (!(delta > 0.0) || !(k > 0.0)) return 0.0;
  if (k * delta >= 1.0) return 1.0;
  return table_probability_from_log(log2_q(k) + log2_q(delta));
}

bool outpacing_check(std::uint32_t cnt_op, std::uint32_t cnt_total, DyadicRatio tau) {
  return (static_cast<std::uint64_t>(cnt_op) << tau.shift) >=
         static_cast<std::uint64_t>(tau.num) * cnt_total;
}

void window_tick(PerJobStateBlock& s, const SymphonyParams& params, SimTime now) {
  if (now - s.last_window_start < params.t_win) {
    throw ContractViolation("window_tick before the window elapsed");
  }
  if (s.cnt_total > params.n_sample) {
    if (outpacing_check(s.cnt_op, s.cnt_total, params.tau)) {
      ++s.alpha;
    } else if (s.alpha > 1) {
      --s.alpha;
    }
  }
  s.cnt_total = 0;
  s.cnt_op = 0;
  s.psn_rec = s.psn_rec_window;
  s.psn_rec_window = 0;
  s.last_window_start = now;
}

MarkDecision process_packet(PerJobStateBlock& s, std::uint32_t step, std::uint32_t psn,
                            bool is_last, const SymphonyParams& params, Rng& coin) {
  // Traffic stats classify against step_min as it stood on arrival.
  ++s.cnt_total;
  if (step > s.step_min) ++s.cnt_op;

  if (is_last) {
    s.step_min = step + 1;
    s.psn_rec = 0;
    s.psn_rec_window = 0;
  } else if (step < s.step_min) {
    s.step_min = step;
    s.psn_rec = psn;
    s.psn_rec_window = psn;
  } else if (step == s.step_min) {
    s.psn_rec = std::max(s.psn_rec, psn);
    s.psn_rec_window = std::max(s.psn_rec_window, psn);
  }

  MarkDecision d;
  if (step <= s.step_min) {
    d.classified_as = Classification::lagging;
    return d;
  }
  if (s.psn_rec <= params.n_warmup) {
    d.classified_as = Classification::warmup;
    return d;
  }
  d.classified_as = Classification::outpacing;
  d.delta = progress_gap(s.alpha, psn, s.psn_rec);
  if (params.hw_mode == HwMode::table_approx) {
    d.probability = params.k > 0.0 ? table_probability_from_log(
                                         log2_q(params.k) + log2_q(s.alpha) + log2_q(psn) -
                                         log2_q(s.psn_rec))
                                   : 0.0;
  } else {
    d.probability = marking_probability(d.delta, params.k);
  }
  d.mark = coin.uniform01() < d.probability;
  return d;
}

void JobTable::register_job(std::uint32_t job_id, SimTime window_start) {
  if (index_.contains(job_id)) return;
  index_.emplace(job_id, static_cast<std::uint32_t>(blocks_.size()));
  PerJobStateBlock block;
  block.last_window_start = window_start;
  blocks_.push_back(block);
}

PerJobStateBlock* JobTable::lookup(std::uint32_t job_id) {
  auto it = index_.find(job_id);
  return it == index_.end() ? nullptr : &blocks_[it->second];
}

const PerJobStateBlock* JobTable::lookup(std::uint32_t job_id) const {
  auto it = index_.find(job_id);
  return it == index_.end() ? nullptr : &blocks_[it->second];
}

MarkDecision JobTable::process(std::uint32_t job_id, std::uint32_t step, std::uint32_t psn,
                               bool is_last, const SymphonyParams& params, Rng& coin) {
  PerJobStateBlock* block = lookup(job_id);
  if (block == nullptr) return MarkDecision{};
  return process_packet(*block, step, psn, is_last, params, coin);
}

}  // namespace ringsim::symphony
