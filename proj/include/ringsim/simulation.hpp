#pragma once

// Packet-level run of one scenario and seed: hosts pace flows through
// their NIC, switches queue, RED/Symphony mark at dequeue, receivers echo
// CNPs, and ring dependencies gate the next step.

#include <array>
#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "ringsim/fabric.hpp"
#include "ringsim/metrics.hpp"
#include "ringsim/sim_core.hpp"
#include "ringsim/symphony.hpp"
#include "ringsim/transport.hpp"
#include "ringsim/workloads.hpp"

namespace ringsim {

enum class SymphonyPlacement : std::uint8_t { all_switches, tor_only };
enum class SymphonyScope : std::uint8_t { per_switch, per_port };

struct SymphonySettings {
  bool enabled = false;
  symphony::SymphonyParams params;
  SimTime activation_time{};
  SimTime deactivate_at = kNever;  // kNever keeps it on
  SymphonyPlacement placement = SymphonyPlacement::all_switches;
  SymphonyScope scope = SymphonyScope::per_switch;
};

/// Capacity scaling of the directed link `from` -> `to` (node names).
struct PerturbationSpec {
  std::string from;
  std::string to;
  double multiplier = 1.0;
  SimTime start{};
  SimTime end = kNever;  // kNever: open-ended
};

/// On/off constant-rate cross traffic between two hosts.
struct BackgroundSpec {
  HostId src = 0;
  HostId dst = 1;
  double rate_fraction = 0.15;
  SimTime mean_on = milliseconds(1);
  SimTime mean_off = milliseconds(1);
  SimTime start{};
  SimTime end = kNever;
};

/// Drops packets of (job, step) at switch `at`; only LAST packets when
/// last_only. At most `count` drops.
struct FaultRule {
  std::string at;
  JobId job_id = 0;
  std::uint32_t step = 0;
  bool last_only = true;
  std::uint32_t count = 1;
};

struct SimulationConfig {
  std::uint64_t seed = 1;
  FabricSpec fabric;
  RedParams red;
  DcqcnParams cc;
  SymphonySettings symphony;
  std::vector<JobSpec> jobs;
  std::uint32_t max_concurrency = 0;  // 0: unlimited
  // Step messages a ring lane may have in transmission at once; 0 lifts
  // the limit so a node forwards each step as soon as it has received it.
  std::uint32_t lane_window = 1;
  // Each step message gets its own queue pair (fresh rate state and UDP
  // source port, hence its own ECMP hash); otherwise a ring lane reuses one.
  bool qp_per_message = false;
  std::vector<PerturbationSpec> perturbations;
  std::vector<BackgroundSpec> background;
  std::vector<FaultRule> faults;
  SimTime t_end = seconds(10);
  SimTime sample_interval = microseconds(100);
  SimTime bin_width = milliseconds(1);
  bool record_decisions = false;
  std::vector<std::string> decision_switches;  // empty: every switch
  bool record_marks = false;
};

class Simulation {
 public:
  /// Validates and builds; throws std::invalid_argument / FabricError /
  /// WorkloadError on bad input.
  explicit Simulation(SimulationConfig cfg);

  /// Runs until every job finished or t_end. Returns true when all jobs
  /// completed; otherwise telemetry is flagged truncated.
  bool run();
  /// Advances to min(t, t_end). Returns true once every job completed.
  bool run_until(SimTime t);

  bool finished() const { return jobs_done_ == jobs_.size(); }
  SimTime now() const { return engine_.now(); }
  const SimulationConfig& config() const { return cfg_; }
  const Fabric& fabric() const { return fabric_; }

  /// Turns Symphony marking on or off from here on; turning it off drops
  /// all tracked state (tracking continues only for the PQ baseline).
  void set_symphony_enabled(bool on);
  bool symphony_marking() const { return marking_; }

  const RunTelemetry& telemetry() const { return tel_; }
  RunTelemetry take_telemetry() { return std::move(tel_); }

  /// State block of `job` at switch node `sw` (per-switch scope), or null.
  const symphony::PerJobStateBlock* state_block(NodeId sw, JobId job) const;

  /// Sum over ports of enqueued - dequeued - depth; zero when accounting holds.
  std::int64_t queue_accounting_error() const;

 private:
  static constexpr std::uint32_t kNone = 0xffffffffu;
  static constexpr std::uint32_t kBgBit = 0x80000000u;
  static constexpr int kMaxHops = 6;

  struct PacketSlot {
    Packet pkt;
    std::uint32_t next_free = kNone;
  };

  struct PortState {
    PortQueue queue;
    SerializationClock clock;
    SimTime busy_until{};
    bool tx_pending = false;
    std::uint32_t perturb_begin = 0;  // range into perturb_
    std::uint32_t perturb_end = 0;
  };

  struct Lane {
    std::uint32_t job = 0;
    HostId src = 0;
    std::uint32_t qp = 0;  // shared queue pair when not one per message
    std::uint32_t active = 0;
    std::deque<std::uint32_t> ready;
  };

  // Reaction-point and notification-point state of one queue pair.
  struct Qp {
    RateState rate;
    double next_send_ns = 0.0;
    std::uint16_t src_port = 0;
    std::uint32_t timer_gen = 0;
    SimTime last_cnp = kNever;
    CnpLimiter cnp_limiter;
  };

  struct FlowRt {
    std::uint32_t job = 0;  // index into jobs_
    std::uint32_t lane = 0;
    std::uint32_t qp = 0;
    std::uint32_t step = 0;
    std::uint32_t ring = 0;
    HostId src = 0;
    HostId dst = 0;
    std::uint64_t bytes = 0;
    std::uint32_t n_packets = 0;
    std::uint32_t next_psn = 1;
    std::uint32_t high_psn = 0;
    std::uint32_t recv_expected = 1;
    std::vector<std::uint32_t> out_of_order;
    std::uint32_t pending_deps = 0;
    std::vector<std::uint32_t> dependents;
    std::array<PortId, kMaxHops> route{};
    std::uint8_t hops = 0;
    std::uint32_t rto_gen = 0;
    bool on_nic = false;
    bool posted = false;
    bool done = false;
  };

  struct BgRt {
    BackgroundSpec spec;
    std::array<PortId, kMaxHops> route{};
    std::uint8_t hops = 0;
    double rate_bps = 0.0;
    double next_send_ns = 0.0;
    bool on = false;
    bool on_nic = false;
  };

  struct HostRt {
    std::vector<std::uint32_t> active;  // flow indices, kBgBit for background
    std::size_t rr = 0;
    std::uint32_t emit_gen = 0;
    bool emit_scheduled = false;
    SimTime emit_at{};
  };

  struct JobRt {
    JobSpec spec;
    std::uint32_t flow_begin = 0;
    std::uint32_t flow_end = 0;
    std::vector<std::uint32_t> inflight;     // per global step
    std::vector<std::uint32_t> step_left;    // flows not yet delivered, per global step
    std::uint32_t flows_left = 0;
    bool admitted = false;
  };

  struct FaultRt {
    NodeId at = 0;
    FaultRule rule;
    std::uint32_t remaining = 0;
  };

  struct Perturb {
    double multiplier = 1.0;
    SimTime start{};
    SimTime end{};
  };

  void dispatch(const Event& ev);
  void on_arrival(std::uint32_t handle, NodeId node);
  void enqueue(PortId port, std::uint32_t handle);
  void transmit(PortId port, std::uint32_t handle);
  void on_transmit_complete(PortId port);
  void on_host_emit(HostId h, std::uint32_t gen);
  void emit_packet(HostId h, std::uint32_t entry);
  void nic_add(HostId h, std::uint32_t entry);
  void nic_wake(HostId h, SimTime at);
  void deliver(std::uint32_t handle);
  void complete_flow(std::uint32_t f);
  void make_ready(std::uint32_t f);
  void lane_pump(std::uint32_t lane);
  void on_cnp(std::uint32_t qp);
  void on_rate_timer(std::uint32_t qp, std::uint32_t gen);
  void on_retransmit_timeout(std::uint32_t f, std::uint32_t gen);
  void admit_job(std::uint32_t j);
  void on_job_arrival(std::uint32_t j);
  void finish_job(std::uint32_t j);
  void on_window_tick(std::uint32_t gen);
  void on_background_toggle(std::uint32_t b, std::uint32_t gen);
  void activate_symphony();
  void deactivate_symphony();
  symphony::JobTable* table_for(PortId port);
  std::uint64_t effective_rate(PortId port) const;
  void overlap_change(std::uint32_t job, std::uint32_t step, int delta);

  std::uint32_t alloc_packet();
  void free_packet(std::uint32_t h) {
    pool_[h].next_free = free_head_;
    free_head_ = h;
  }

  SimulationConfig cfg_;
  Fabric fabric_;
  Engine engine_;
  Rng red_rng_;
  Rng symphony_rng_;
  Rng bg_rng_;
  std::uint64_t ecmp_salt_ = 0;

  std::vector<PortState> ports_;
  std::vector<Perturb> perturb_;
  std::vector<PacketSlot> pool_;
  std::uint32_t free_head_ = kNone;
  std::vector<HostRt> hosts_;
  std::vector<Lane> lanes_;
  std::vector<Qp> qps_;
  std::vector<FlowRt> flows_;
  std::vector<BgRt> bg_;
  std::vector<JobRt> jobs_;
  std::vector<FaultRt> faults_;
  std::vector<std::uint32_t> waiting_jobs_;
  std::uint32_t running_jobs_ = 0;
  std::size_t jobs_done_ = 0;

  std::vector<symphony::JobTable> tables_;  // per switch or per port
  std::vector<std::uint8_t> track_node_;    // per node: 1 when tracked
  std::vector<std::uint8_t> log_node_;      // per node: 1 when decisions are logged
  bool tracking_ = false;
  bool marking_ = false;
  std::uint32_t tick_gen_ = 0;
  bool retransmit_ = false;

  RunTelemetry tel_;
};

}  // namespace ringsim
