#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ringsim/fabric.hpp"
#include "ringsim/sim_core.hpp"
#include "ringsim/transport.hpp"

namespace ringsim {

class MetricsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A step becoming network-visible (+1) or leaving the network (-1).
struct OverlapTransition {
  SimTime t;
  std::uint32_t step = 0;
  std::int8_t delta = 0;
};

struct FlowRecord {
  FlowId id = 0;
  std::uint32_t pass = 0;
  std::uint32_t step = 0;
  SimTime start{};
  SimTime complete{};
  bool started = false;
  bool done = false;
};

constexpr SimTime kNever{-1};

struct JobTelemetry {
  JobId job_id = 0;
  SimTime start_at{};
  SimTime end{};
  bool started = false;
  bool complete = false;
  std::uint32_t passes = 0;
  std::uint32_t steps_per_pass = 0;
  std::uint32_t max_ring_size = 0;
  std::uint64_t chunk_bytes = 0;
  SimTime theoretical_jct{};

  std::vector<OverlapTransition> overlap_log;
  std::vector<SimTime> step_complete;  // per global step, kNever until done
  std::vector<FlowRecord> flows;
  SimTime bin_width{};
  std::vector<std::uint64_t> delivered_bytes_bins;

  std::uint64_t red_marks = 0;
  std::uint64_t symphony_marks = 0;
  std::uint64_t ce_delivered = 0;
  std::uint64_t packets_delivered = 0;
  std::uint64_t retransmitted_packets = 0;
};

struct MarkRecord {
  SimTime t;
  PortId port = 0;
  FlowId flow = 0;
  std::uint32_t psn = 0;
  bool red = false;
  bool symphony = false;
  bool operator==(const MarkRecord&) const = default;
};

struct DecisionRecord {
  SimTime t;
  std::uint32_t switch_id = 0;
  JobId job_id = 0;
  std::uint32_t step = 0;
  std::uint32_t psn = 0;
  std::uint32_t step_min = 0;
  std::uint32_t psn_rec = 0;
  std::uint32_t alpha = 0;
  double delta = 0.0;
  double probability = 0.0;
  bool marked = false;
  bool is_last = false;
  std::uint64_t seq = 0;  // dispatch index of the event that produced it
  bool operator==(const DecisionRecord&) const = default;
};

struct WindowTickRecord {
  SimTime t;
  std::uint64_t seq = 0;
};

struct DropRecord {
  SimTime t;
  NodeId at = 0;
  FlowId flow = 0;
  JobId job_id = 0;
  std::uint32_t step = 0;
  std::uint32_t psn = 0;
  bool last = false;
};

struct RunTelemetry {
  std::uint64_t seed = 0;
  std::vector<JobTelemetry> jobs;
  std::vector<DecisionRecord> decisions;
  std::vector<MarkRecord> marks;
  std::vector<DropRecord> drops;
  std::vector<WindowTickRecord> window_ticks;  // kept only with the decision log
  std::uint64_t events = 0;
  std::uint64_t dispatch_hash = 0;
  std::uint64_t packets_injected = 0;
  std::uint64_t packets_delivered = 0;
  std::uint64_t packets_dropped = 0;
  SimTime end_time{};
  bool truncated = false;
};

enum class MetricKind : std::uint8_t { step_overlap, step_completion_rate, throughput };

struct MetricSeries {
  MetricKind kind = MetricKind::step_overlap;
  JobId job_id = 0;
  std::vector<std::pair<SimTime, double>> samples;

  double max_value() const;
};

/// Number of distinct steps network-visible at each multiple of `interval`
/// in [from, to]. A transition at exactly t counts toward the sample at t.
MetricSeries step_overlap(std::span<const OverlapTransition> log, JobId job_id, SimTime from, SimTime to,
                          SimTime interval);
MetricSeries step_overlap(const JobTelemetry& job, SimTime interval);

/// theoretical_step / (t_i - t_{i-1}) for consecutive completions.
MetricSeries step_completion_rate(std::span<const SimTime> completions, SimTime theoretical_step, JobId job_id = 0);

/// Delivered goodput (bits/s) per bin.
MetricSeries throughput(const JobTelemetry& job);

SimTime collective_completion_time(const JobTelemetry& job, std::uint32_t pass);
SimTime job_completion_time(const JobTelemetry& job);
/// Spread of completion times over the flows of the job's final step.
SimTime final_step_span(const JobTelemetry& job);

struct JobSummary {
  JobId job_id = 0;
  bool complete = false;
  SimTime cct{};  // mean over passes
  SimTime jct{};
  double max_overlap = 0.0;
  SimTime final_step_span{};
  std::uint64_t red_marks = 0;
  std::uint64_t symphony_marks = 0;
  SimTime theoretical_jct{};
};

struct RunSummary {
  std::uint64_t seed = 0;
  bool truncated = false;
  std::vector<JobSummary> jobs;
};

RunSummary summarize(const RunTelemetry& run, SimTime sample_interval);

// CSV emitters. Each writes rows only; *_header() returns the header line.
std::string overlap_csv_header();
std::string steps_csv_header();
std::string summary_csv_header();
std::string decisions_csv_header();
void write_overlap_rows(std::ostream& os, const std::string& run_id, const RunTelemetry& run, SimTime interval);
void write_steps_rows(std::ostream& os, const std::string& run_id, const RunTelemetry& run);
void write_summary_rows(std::ostream& os, const std::string& run_id, const RunSummary& summary);
void write_decision_rows(std::ostream& os, const RunTelemetry& run);

/// Row of summary.csv as read back by compare.
struct SummaryRow {
  std::string run_id;
  JobId job_id = 0;
  std::int64_t cct_ns = 0;
  std::int64_t jct_ns = 0;
  double max_overlap = 0.0;
  std::int64_t final_step_span_ns = 0;
  std::uint64_t red_marks = 0;
  std::uint64_t symphony_marks = 0;
};

std::vector<SummaryRow> read_summary_csv(std::istream& is);

/// Median of a non-empty sample (mean of the middle pair for even sizes).
double median(std::vector<double> v);
/// Linear-interpolated percentile, q in [0, 100].
double percentile(std::vector<double> v, double q);

}  // namespace ringsim
