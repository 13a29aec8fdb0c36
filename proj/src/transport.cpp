#include "ringsim/transport.hpp"

#include <algorithm>
#include <stdexcept>

namespace ringsim {

void DcqcnParams::validate() const {
  if (!(g > 0.0 && g <= 1.0)) throw std::invalid_argument("cc.g must lie in (0, 1]");
  if (cnp_interval.ns < 0) throw std::invalid_argument("cc.cnp_interval must be >= 0");
  if (alpha_period.ns <= 0) throw std::invalid_argument("cc.alpha_period must be > 0");
  if (rate_timer.ns <= 0) throw std::invalid_argument("cc.rate_timer must be > 0");
  if (!(r_min_bps > 0.0)) throw std::invalid_argument("cc.r_min must be > 0");
  if (!(r_ai_bps >= 0.0)) throw std::invalid_argument("cc.r_ai must be >= 0");
  if (!(alpha_init >= 0.0 && alpha_init <= 1.0)) throw std::invalid_argument("cc.alpha_init must lie in [0, 1]");
  if (retransmit_timeout.ns <= 0) throw std::invalid_argument("cc.retransmit_timeout must be > 0");
}

RateState initial_rate_state(double link_rate_bps, const DcqcnParams& p) {
  RateState s;
  s.current_rate = link_rate_bps;
  s.target_rate = link_rate_bps;
  s.cc_alpha = p.alpha_init;
  return s;
}

void on_cnp(RateState& s, const DcqcnParams& p) {
  s.cc_alpha = (1.0 - p.g) * s.cc_alpha + p.g;
  s.target_rate = s.current_rate;
  s.current_rate = std::max(p.r_min_bps, s.current_rate * (1.0 - s.cc_alpha / 2.0));
  s.recovery_stage = 0;
  s.byte_counter = 0;
  s.cnp_since_alpha_update = true;
}

void rate_increase_tick(RateState& s, double link_rate_bps, const DcqcnParams& p) {
  if (s.recovery_stage < p.fast_recovery_steps) {
    s.current_rate = (s.current_rate + s.target_rate) / 2.0;
  } else {
    s.current_rate = std::min(link_rate_bps, s.current_rate + p.r_ai_bps);
    s.target_rate = std::max(s.target_rate, s.current_rate);
  }
  s.current_rate = std::clamp(s.current_rate, p.r_min_bps, link_rate_bps);
  ++s.recovery_stage;
}

void alpha_decay_tick(RateState& s, const DcqcnParams& p) {
  if (!s.cnp_since_alpha_update) s.cc_alpha *= (1.0 - p.g);
  s.cnp_since_alpha_update = false;
}

bool count_sent_bytes(RateState& s, std::uint32_t bytes, const DcqcnParams& p) {
  if (p.byte_counter_bytes == 0) return false;
  s.byte_counter += bytes;
  if (s.byte_counter < p.byte_counter_bytes) return false;
  s.byte_counter = 0;
  return true;
}

}  // namespace ringsim
