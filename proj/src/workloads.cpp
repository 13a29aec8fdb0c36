#include "ringsim/workloads.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

namespace ringsim {

namespace {

SimTime scaled_transfer_time(std::uint64_t steps, std::uint64_t chunk_bytes, std::uint64_t rate_bps) {
  if (rate_bps == 0) throw WorkloadError("link rate must be > 0");
  const unsigned __int128 num = static_cast<unsigned __int128>(steps) * chunk_bytes * 8ULL * 1'000'000'000ULL;
  const auto ns = static_cast<std::int64_t>((num + rate_bps / 2) / rate_bps);
  return nanoseconds(ns);
}

void check_distinct(const std::vector<HostId>& hosts) {
  std::set<HostId> seen(hosts.begin(), hosts.end());
  if (seen.size() != hosts.size()) throw WorkloadError("job hosts must be distinct");
}

}  // namespace

std::uint32_t JobSpec::steps_per_pass() const {
  std::uint32_t total = 0;
  for (const auto& ph : phases) total += ph.steps();
  return total;
}

std::uint32_t JobSpec::global_step(std::uint32_t pass, std::uint32_t phase, std::uint32_t step) const {
  std::uint32_t offset = pass * steps_per_pass();
  for (std::uint32_t p = 0; p < phase; ++p) offset += phases[p].steps();
  return offset + step;
}

std::uint32_t JobSpec::max_ring_size() const {
  std::uint32_t m = 0;
  for (const auto& ph : phases) m = std::max(m, ph.ring_size());
  return m;
}

std::vector<HostId> round_robin_placement(const FabricSpec& fabric) {
  const std::uint32_t tors = fabric.pods * fabric.tors;
  const std::uint32_t hosts = fabric.host_count();
  std::vector<HostId> out(hosts);
  for (std::uint32_t j = 0; j < hosts; ++j) out[j] = (j % tors) * fabric.hosts_per_tor + j / tors;
  return out;
}

JobSpec generate_multi_1d_rings(const std::vector<HostId>& hosts, std::uint32_t rings_count,
                                std::uint64_t chunk_bytes, std::uint32_t passes) {
  if (rings_count == 0) throw WorkloadError("rings must be >= 1");
  if (hosts.size() % rings_count != 0) {
    throw WorkloadError(std::to_string(hosts.size()) + " hosts cannot be split into " +
                        std::to_string(rings_count) + " equal rings");
  }
  const std::size_t n = hosts.size() / rings_count;
  if (n < 2) throw WorkloadError("each ring needs at least 2 hosts");
  if (chunk_bytes == 0) throw WorkloadError("chunk size must be > 0");
  if (passes == 0) throw WorkloadError("passes must be >= 1");
  check_distinct(hosts);

  JobSpec job;
  job.hosts = hosts;
  job.chunk_bytes = chunk_bytes;
  job.passes = passes;
  RingPhase phase;
  for (std::uint32_t r = 0; r < rings_count; ++r) {
    phase.rings.emplace_back(hosts.begin() + static_cast<std::ptrdiff_t>(r * n),
                             hosts.begin() + static_cast<std::ptrdiff_t>((r + 1) * n));
  }
  job.phases.push_back(std::move(phase));
  return job;
}

JobSpec generate_2d_ring(const std::vector<HostId>& hosts, std::uint32_t dim_a, std::uint32_t dim_b,
                         std::uint64_t chunk_bytes, std::uint32_t passes) {
  if (dim_a == 0 || dim_b == 0 || static_cast<std::size_t>(dim_a) * dim_b != hosts.size()) {
    throw WorkloadError("2D ring " + std::to_string(dim_a) + "x" + std::to_string(dim_b) +
                        " does not match " + std::to_string(hosts.size()) + " hosts");
  }
  if (hosts.size() < 2) throw WorkloadError("2D ring needs at least 2 hosts");
  if (chunk_bytes == 0) throw WorkloadError("chunk size must be > 0");
  if (passes == 0) throw WorkloadError("passes must be >= 1");
  check_distinct(hosts);

  JobSpec job;
  job.hosts = hosts;
  job.chunk_bytes = chunk_bytes;
  job.passes = passes;
  if (dim_a >= 2) {
    RingPhase rows;
    for (std::uint32_t r = 0; r < dim_b; ++r) {
      std::vector<HostId> ring;
      for (std::uint32_t c = 0; c < dim_a; ++c) ring.push_back(hosts[r * dim_a + c]);
      rows.rings.push_back(std::move(ring));
    }
    job.phases.push_back(std::move(rows));
  }
  if (dim_b >= 2) {
    RingPhase cols;
    for (std::uint32_t c = 0; c < dim_a; ++c) {
      std::vector<HostId> ring;
      for (std::uint32_t r = 0; r < dim_b; ++r) ring.push_back(hosts[r * dim_a + c]);
      cols.rings.push_back(std::move(ring));
    }
    job.phases.push_back(std::move(cols));
  }
  return job;
}

std::vector<FlowSpec> expand_flows(const JobSpec& job, FlowId first_id) {
  const auto n_phases = static_cast<std::uint32_t>(job.phases.size());
  // Where each host sits in each phase: (ring, position).
  std::vector<std::map<HostId, std::pair<std::uint32_t, std::uint32_t>>> where(n_phases);
  std::vector<std::uint32_t> ring_base(n_phases, 0);
  std::vector<std::uint64_t> block_size(n_phases, 0);
  std::uint32_t rings_so_far = 0;
  for (std::uint32_t ph = 0; ph < n_phases; ++ph) {
    const RingPhase& phase = job.phases[ph];
    ring_base[ph] = rings_so_far;
    rings_so_far += static_cast<std::uint32_t>(phase.rings.size());
    block_size[ph] = static_cast<std::uint64_t>(phase.rings.size()) * phase.steps() * phase.ring_size();
    for (std::uint32_t r = 0; r < phase.rings.size(); ++r) {
      if (phase.rings[r].size() != phase.ring_size()) throw WorkloadError("rings within a phase must be equal-sized");
      for (std::uint32_t i = 0; i < phase.rings[r].size(); ++i) where[ph][phase.rings[r][i]] = {r, i};
    }
  }
  std::uint64_t per_pass = 0;
  for (auto b : block_size) per_pass += b;

  const auto flow_index = [&](std::uint32_t pass, std::uint32_t ph, std::uint32_t r, std::uint32_t s,
                              std::uint32_t i) -> FlowId {
    std::uint64_t idx = per_pass * pass;
    for (std::uint32_t p = 0; p < ph; ++p) idx += block_size[p];
    const RingPhase& phase = job.phases[ph];
    idx += (static_cast<std::uint64_t>(r) * phase.steps() + s) * phase.ring_size() + i;
    return first_id + static_cast<FlowId>(idx);
  };

  std::vector<FlowSpec> flows;
  flows.reserve(per_pass * job.passes);
  for (std::uint32_t pass = 0; pass < job.passes; ++pass) {
    for (std::uint32_t ph = 0; ph < n_phases; ++ph) {
      const RingPhase& phase = job.phases[ph];
      const std::uint32_t n = phase.ring_size();
      for (std::uint32_t r = 0; r < phase.rings.size(); ++r) {
        for (std::uint32_t s = 0; s < phase.steps(); ++s) {
          for (std::uint32_t i = 0; i < n; ++i) {
            FlowSpec f;
            f.id = flow_index(pass, ph, r, s, i);
            f.job_id = job.job_id;
            f.ring_id = ring_base[ph] + r;
            f.step = job.global_step(pass, ph, s);
            f.pass = pass;
            f.src = phase.rings[r][i];
            f.dst = phase.rings[r][(i + 1) % n];
            f.bytes = job.chunk_bytes;
            if (s > 0) {
              f.depends_on.push_back(flow_index(pass, ph, r, s - 1, (i + n - 1) % n));
            } else if (ph > 0 || pass > 0) {
              const std::uint32_t prev_pass = ph > 0 ? pass : pass - 1;
              const std::uint32_t prev_ph = ph > 0 ? ph - 1 : n_phases - 1;
              const RingPhase& prev = job.phases[prev_ph];
              const auto [pr, pi] = where[prev_ph].at(f.src);
              const std::uint32_t pn = prev.ring_size();
              f.depends_on.push_back(flow_index(prev_pass, prev_ph, pr, prev.steps() - 1, (pi + pn - 1) % pn));
            }
            flows.push_back(std::move(f));
          }
        }
      }
    }
  }
  std::sort(flows.begin(), flows.end(), [](const FlowSpec& a, const FlowSpec& b) { return a.id < b.id; });
  return flows;
}

void JobStreamSpec::validate() const {
  if (max_concurrency == 0) throw WorkloadError("stream.max_concurrency must be >= 1");
  if (scales.empty()) throw WorkloadError("stream.scales must not be empty");
  if (collective_bytes.empty()) throw WorkloadError("stream.sizes must not be empty");
  if (passes_min == 0 || passes_min > passes_max) throw WorkloadError("stream passes range is empty");
  if (!fixed_arrivals.empty() && fixed_arrivals.size() != job_count) {
    throw WorkloadError("stream.arrivals must list one time per job");
  }
  for (auto s : scales) {
    if (s < 2) throw WorkloadError("stream scales must be >= 2");
  }
}

std::vector<JobSpec> generate_job_stream(const JobStreamSpec& spec, const std::vector<HostId>& placement,
                                         std::uint64_t link_rate_bps) {
  spec.validate();
  Rng rng = Rng(spec.seed).substream("jobs");
  std::vector<JobSpec> jobs;
  std::vector<SimTime> est_end;
  SimTime arrival = spec.first_arrival;
  for (std::uint32_t j = 0; j < spec.job_count; ++j) {
    const std::uint32_t scale = spec.scales[rng.below(spec.scales.size())];
    const std::uint64_t bytes = spec.collective_bytes[rng.below(spec.collective_bytes.size())];
    const std::uint32_t passes =
        spec.passes_min + static_cast<std::uint32_t>(rng.below(spec.passes_max - spec.passes_min + 1));
    if (scale > placement.size()) {
      throw WorkloadError("stream scale " + std::to_string(scale) + " exceeds cluster size");
    }
    const std::uint64_t offset = rng.below(placement.size());
    std::vector<HostId> hosts;
    for (std::uint32_t i = 0; i < scale; ++i) hosts.push_back(placement[(offset + i) % placement.size()]);

    if (spec.fixed_arrivals.empty()) {
      if (j > 0) arrival += nanoseconds(static_cast<std::int64_t>(rng.exponential(static_cast<double>(spec.mean_interarrival.ns))));
    } else {
      arrival = spec.fixed_arrivals[j];
    }

    JobSpec job = generate_multi_1d_rings(hosts, 1, std::max<std::uint64_t>(1, bytes / scale), passes);
    job.job_id = j;
    SimTime start = arrival;
    for (;;) {
      std::vector<SimTime> active;
      for (SimTime e : est_end) {
        if (e > start) active.push_back(e);
      }
      if (active.size() < spec.max_concurrency) break;
      std::sort(active.begin(), active.end());
      start = active[active.size() - spec.max_concurrency];
    }
    job.start_at = start;
    est_end.push_back(start + theoretical_jct(job, link_rate_bps));
    jobs.push_back(std::move(job));
  }
  return jobs;
}

SimTime theoretical_step_time(std::uint64_t chunk_bytes, std::uint64_t link_rate_bps) {
  return scaled_transfer_time(1, chunk_bytes, link_rate_bps);
}

SimTime theoretical_cct(std::uint32_t n_ring, std::uint64_t chunk_bytes, std::uint64_t link_rate_bps) {
  if (n_ring < 2) throw WorkloadError("theoretical_cct needs a ring of at least 2 nodes");
  return scaled_transfer_time(2ULL * (n_ring - 1), chunk_bytes, link_rate_bps);
}

SimTime theoretical_jct(const JobSpec& job, std::uint64_t link_rate_bps) {
  SimTime total = scaled_transfer_time(job.total_steps(), job.chunk_bytes, link_rate_bps);
  if (job.total_steps() > 1) {
    total += nanoseconds(job.compute_gap.ns * static_cast<std::int64_t>(job.total_steps() - 1));
  }
  return total;
}

}  // namespace ringsim
