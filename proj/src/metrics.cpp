#include "ringsim/metrics.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace ringsim {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

double MetricSeries::max_value() const {
  double m = 0.0;
  for (const auto& [t, v] : samples) m = std::max(m, v);
  return m;
}

MetricSeries step_overlap(std::span<const OverlapTransition> log, JobId job_id, SimTime from, SimTime to,
                          SimTime interval) {
  if (interval.ns <= 0) throw MetricsError("overlap sample interval must be > 0");
  MetricSeries series;
  series.kind = MetricKind::step_overlap;
  series.job_id = job_id;

  std::vector<OverlapTransition> sorted;
  std::span<const OverlapTransition> events = log;
  if (!std::is_sorted(log.begin(), log.end(), [](const auto& a, const auto& b) { return a.t < b.t; })) {
    sorted.assign(log.begin(), log.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    events = sorted;
  }

  std::int64_t first = (from.ns + interval.ns - 1) / interval.ns * interval.ns;
  if (from.ns < 0) first = 0;
  std::size_t idx = 0;
  std::int64_t active = 0;
  for (std::int64_t t = first; t <= to.ns; t += interval.ns) {
    while (idx < events.size() && events[idx].t.ns <= t) active += events[idx++].delta;
    series.samples.emplace_back(nanoseconds(t), static_cast<double>(active));
  }
  return series;
}

MetricSeries step_overlap(const JobTelemetry& job, SimTime interval) {
  SimTime to = job.end;
  if (!job.complete) to = job.overlap_log.empty() ? job.start_at : job.overlap_log.back().t;
  return step_overlap(job.overlap_log, job.job_id, job.start_at, to, interval);
}

MetricSeries step_completion_rate(std::span<const SimTime> completions, SimTime theoretical_step, JobId job_id) {
  if (completions.size() < 2) throw MetricsError("step completion rate needs at least two completions");
  MetricSeries series;
  series.kind = MetricKind::step_completion_rate;
  series.job_id = job_id;
  for (std::size_t i = 1; i < completions.size(); ++i) {
    const std::int64_t gap = completions[i].ns - completions[i - 1].ns;
    const double rate = gap > 0 ? static_cast<double>(theoretical_step.ns) / static_cast<double>(gap)
                                : std::numeric_limits<double>::infinity();
    series.samples.emplace_back(completions[i], rate);
  }
  return series;
}

MetricSeries throughput(const JobTelemetry& job) {
  MetricSeries series;
  series.kind = MetricKind::throughput;
  series.job_id = job.job_id;
  if (job.bin_width.ns <= 0) return series;
  for (std::size_t i = 0; i < job.delivered_bytes_bins.size(); ++i) {
    const double bps = static_cast<double>(job.delivered_bytes_bins[i]) * 8.0 / job.bin_width.seconds();
    series.samples.emplace_back(nanoseconds(static_cast<std::int64_t>(i) * job.bin_width.ns), bps);
  }
  return series;
}

SimTime collective_completion_time(const JobTelemetry& job, std::uint32_t pass) {
  SimTime first = nanoseconds(std::numeric_limits<std::int64_t>::max());
  SimTime last{};
  bool any = false;
  for (const FlowRecord& f : job.flows) {
    if (f.pass != pass) continue;
    if (!f.done) throw MetricsError("job " + std::to_string(job.job_id) + " pass " + std::to_string(pass) + " is incomplete");
    any = true;
    first = std::min(first, f.start);
    last = std::max(last, f.complete);
  }
  if (!any) throw MetricsError("job " + std::to_string(job.job_id) + " has no pass " + std::to_string(pass));
  return last - first;
}

SimTime job_completion_time(const JobTelemetry& job) {
  if (!job.complete) throw MetricsError("job " + std::to_string(job.job_id) + " is incomplete");
  return job.end - job.start_at;
}

SimTime final_step_span(const JobTelemetry& job) {
  if (job.flows.empty()) throw MetricsError("job has no flows");
  std::uint32_t final_step = 0;
  for (const auto& f : job.flows) final_step = std::max(final_step, f.step);
  SimTime lo = nanoseconds(std::numeric_limits<std::int64_t>::max());
  SimTime hi{};
  for (const auto& f : job.flows) {
    if (f.step != final_step) continue;
    if (!f.done) throw MetricsError("final step of job " + std::to_string(job.job_id) + " is incomplete");
    lo = std::min(lo, f.complete);
    hi = std::max(hi, f.complete);
  }
  return hi - lo;
}

RunSummary summarize(const RunTelemetry& run, SimTime sample_interval) {
  RunSummary out;
  out.seed = run.seed;
  out.truncated = run.truncated;
  for (const JobTelemetry& job : run.jobs) {
    JobSummary s;
    s.job_id = job.job_id;
    s.complete = job.complete;
    s.red_marks = job.red_marks;
    s.symphony_marks = job.symphony_marks;
    s.theoretical_jct = job.theoretical_jct;
    if (job.started) s.max_overlap = step_overlap(job, sample_interval).max_value();
    if (job.complete) {
      s.jct = job_completion_time(job);
      std::int64_t total = 0;
      for (std::uint32_t p = 0; p < job.passes; ++p) total += collective_completion_time(job, p).ns;
      s.cct = nanoseconds(total / std::max<std::uint32_t>(1, job.passes));
      s.final_step_span = final_step_span(job);
    }
    out.jobs.push_back(s);
  }
  return out;
}

std::string overlap_csv_header() { return "run_id,job_id,t_ns,overlap"; }
std::string steps_csv_header() { return "run_id,job_id,pass,step,complete_t_ns"; }
std::string summary_csv_header() {
  return "run_id,job_id,cct_ns,jct_ns,max_overlap,final_step_span_ns,red_marks,symphony_marks";
}
std::string decisions_csv_header() { return "t_ns,switch_id,job_id,step,psn,step_min,psn_rec,alpha,delta,p,marked"; }

void write_overlap_rows(std::ostream& os, const std::string& run_id, const RunTelemetry& run, SimTime interval) {
  for (const JobTelemetry& job : run.jobs) {
    if (!job.started) continue;
    for (const auto& [t, v] : step_overlap(job, interval).samples) {
      os << run_id << ',' << job.job_id << ',' << t.ns << ',' << static_cast<std::int64_t>(v) << '\n';
    }
  }
}

void write_steps_rows(std::ostream& os, const std::string& run_id, const RunTelemetry& run) {
  for (const JobTelemetry& job : run.jobs) {
    for (std::uint32_t s = 0; s < job.step_complete.size(); ++s) {
      if (job.step_complete[s] == kNever) continue;
      const std::uint32_t pass = job.steps_per_pass ? s / job.steps_per_pass : 0;
      os << run_id << ',' << job.job_id << ',' << pass << ',' << s << ',' << job.step_complete[s].ns << '\n';
    }
  }
}

void write_summary_rows(std::ostream& os, const std::string& run_id, const RunSummary& summary) {
  for (const JobSummary& j : summary.jobs) {
    os << run_id << ',' << j.job_id << ',' << (j.complete ? j.cct.ns : -1) << ',' << (j.complete ? j.jct.ns : -1)
       << ',' << static_cast<std::int64_t>(j.max_overlap) << ',' << (j.complete ? j.final_step_span.ns : -1) << ','
       << j.red_marks << ',' << j.symphony_marks << '\n';
  }
}

void write_decision_rows(std::ostream& os, const RunTelemetry& run) {
  for (const DecisionRecord& d : run.decisions) {
    os << d.t.ns << ',' << d.switch_id << ',' << d.job_id << ',' << d.step << ',' << d.psn << ',' << d.step_min << ','
       << d.psn_rec << ',' << d.alpha << ',' << fmt_double(d.delta) << ',' << fmt_double(d.probability) << ','
       << (d.marked ? 1 : 0) << '\n';
  }
}

std::vector<SummaryRow> read_summary_csv(std::istream& is) {
  std::vector<SummaryRow> rows;
  std::string line;
  if (!std::getline(is, line)) return rows;
  if (line != summary_csv_header()) throw MetricsError("summary.csv: unexpected header '" + line + "'");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 8) throw MetricsError("summary.csv: malformed row '" + line + "'");
    SummaryRow r;
    r.run_id = cells[0];
    r.job_id = static_cast<JobId>(std::stoul(cells[1]));
    r.cct_ns = std::stoll(cells[2]);
    r.jct_ns = std::stoll(cells[3]);
    r.max_overlap = std::stod(cells[4]);
    r.final_step_span_ns = std::stoll(cells[5]);
    r.red_marks = std::stoull(cells[6]);
    r.symphony_marks = std::stoull(cells[7]);
    rows.push_back(std::move(r));
  }
  return rows;
}

double median(std::vector<double> v) { return percentile(std::move(v), 50.0); }

double percentile(std::vector<double> v, double q) {
  if (v.empty()) throw MetricsError("percentile of an empty sample");
  std::sort(v.begin(), v.end());
  const double pos = std::clamp(q, 0.0, 100.0) / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + (v[hi] - v[lo]) * frac;
}

}  // namespace ringsim
