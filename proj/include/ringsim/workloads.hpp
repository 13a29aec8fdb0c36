#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ringsim/fabric.hpp"
#include "ringsim/sim_core.hpp"
#include "ringsim/transport.hpp"

namespace ringsim {

class WorkloadError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Rings that run concurrently. Every ring in a phase has the same size.
struct RingPhase {
  std::vector<std::vector<HostId>> rings;

  std::uint32_t ring_size() const { return rings.empty() ? 0 : static_cast<std::uint32_t>(rings.front().size()); }
  std::uint32_t steps() const { return ring_size() < 2 ? 0 : 2 * (ring_size() - 1); }
};

struct JobSpec {
  JobId job_id = 0;
  std::vector<HostId> hosts;
  // Phases run back to back at every node; a 1D job has one phase, a 2D
  // job has a row phase followed by a column phase.
  std::vector<RingPhase> phases;
  std::uint64_t chunk_bytes = 8ULL * 1024 * 1024;
  std::uint32_t passes = 1;
  SimTime start_at{};
  SimTime compute_gap{};

  std::uint32_t steps_per_pass() const;
  std::uint32_t total_steps() const { return steps_per_pass() * passes; }
  /// Global step of (pass, phase, local step).
  std::uint32_t global_step(std::uint32_t pass, std::uint32_t phase, std::uint32_t step) const;
  /// Longest ring in the job; drives the lockstep lower bound.
  std::uint32_t max_ring_size() const;
};

/// Rank -> host so that consecutive ranks land on different ToRs (rank j on
/// ToR j mod T). With 4 hosts per ToR, ranks 0..3 map to hosts 0, 4, 8, 12.
std::vector<HostId> round_robin_placement(const FabricSpec& fabric);

/// `rings_count` disjoint rings over contiguous blocks of `hosts`.
JobSpec generate_multi_1d_rings(const std::vector<HostId>& hosts, std::uint32_t rings_count,
                                std::uint64_t chunk_bytes, std::uint32_t passes);

/// dim_a x dim_b grid over `hosts` (row-major): dim_b row rings of size
/// dim_a, then dim_a column rings of size dim_b.
JobSpec generate_2d_ring(const std::vector<HostId>& hosts, std::uint32_t dim_a, std::uint32_t dim_b,
                         std::uint64_t chunk_bytes, std::uint32_t passes);

/// Flow-level expansion. Ids start at `first_id`. Every flow except the
/// job's first wave depends on exactly one flow: the receive that feeds it.
std::vector<FlowSpec> expand_flows(const JobSpec& job, FlowId first_id = 0);

struct JobStreamSpec {
  std::uint32_t job_count = 8;
  SimTime mean_interarrival = milliseconds(200);
  SimTime first_arrival{};
  std::vector<SimTime> fixed_arrivals;  // when non-empty, replaces the random process
  std::vector<std::uint32_t> scales{16, 32, 64};
  std::vector<std::uint64_t> collective_bytes{4ULL << 20, 16ULL << 20, 32ULL << 20};
  std::uint32_t passes_min = 16;
  std::uint32_t passes_max = 128;
  std::uint32_t max_concurrency = 4;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Seeded job stream over `placement` (ranks of the cluster). Start times
/// honor max_concurrency against each job's lockstep duration estimate; the
/// simulator additionally gates admission at runtime.
std::vector<JobSpec> generate_job_stream(const JobStreamSpec& spec, const std::vector<HostId>& placement,
                                         std::uint64_t link_rate_bps);

/// 2(n-1) * 8 * chunk / rate; propagation ignored.
SimTime theoretical_cct(std::uint32_t n_ring, std::uint64_t chunk_bytes, std::uint64_t link_rate_bps);

/// Duration of one lockstep step: 8 * chunk / rate.
SimTime theoretical_step_time(std::uint64_t chunk_bytes, std::uint64_t link_rate_bps);

/// Lockstep lower bound for the whole job (all passes and phases).
SimTime theoretical_jct(const JobSpec& job, std::uint64_t link_rate_bps);

}  // namespace ringsim
