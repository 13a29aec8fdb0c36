#pragma once

// Seed fan-out, output directories, and the compare / sweep / plot passes
// over them. Output directory layout:
//   manifest.json   run ids, seeds, config hash
//   config.toml     the resolved scenario
//   overlap.csv  steps.csv  summary.csv
//   decisions/<run_id>.csv   when decision logging is on

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "ringsim/config.hpp"
#include "ringsim/metrics.hpp"

namespace ringsim {

/// A run that started but could not finish (truncated, engine contract
/// breach, I/O failure).
class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// RINGSIM_WORKERS if set and positive, else the hardware thread count.
unsigned default_workers();

struct SeedRun {
  std::uint64_t seed = 0;
  std::string run_id;
  RunTelemetry telemetry;
  RunSummary summary;
};

std::string make_run_id(const ScenarioConfig& cfg, std::uint64_t seed);

/// Runs every seed of `cfg` on up to `workers` threads. Results come back
/// in the order of cfg.seeds whatever the completion order. Bad topology or
/// workload input surfaces as ConfigError.
std::vector<SeedRun> run_seeds(const ScenarioConfig& cfg, unsigned workers);

struct RunReport {
  std::filesystem::path dir;
  std::string config_hash;
  std::vector<RunSummary> summaries;
  bool truncated = false;
};

/// Writes one run's outputs into `dir` (created if missing).
void write_outputs(const ScenarioConfig& cfg, const std::vector<SeedRun>& runs, const std::filesystem::path& dir);

/// run_seeds + write_outputs. Throws RunError after writing when any seed
/// was truncated, so partial telemetry is still on disk.
RunReport run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& dir, unsigned workers);

struct RunIndexEntry {
  std::string run_id;
  std::uint64_t seed = 0;
  bool truncated = false;
};

/// Reads manifest.json and summary.csv from an output directory.
struct LoadedRun {
  std::string name;
  std::string config_hash;
  std::vector<RunIndexEntry> runs;
  std::vector<SummaryRow> rows;
};
LoadedRun load_run_dir(const std::filesystem::path& dir);

struct MetricStats {
  double median = 0.0;
  double p10 = 0.0;
  double p90 = 0.0;
};

struct JobComparison {
  JobId job_id = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> base_cct_ms, treat_cct_ms;
  std::vector<double> base_jct_ms, treat_jct_ms;
  std::vector<double> base_overlap, treat_overlap;
  std::vector<double> base_span_ms, treat_span_ms;
  std::vector<double> cct_improvement;  // (base - treat) / base, per seed
  std::vector<double> jct_improvement;
};

struct ComparisonReport {
  std::string baseline;
  std::string treatment;
  std::vector<JobComparison> jobs;
};

/// Pairs runs by seed and job. Throws RunError when the seed sets differ or
/// a paired run is incomplete.
ComparisonReport compare(const std::filesystem::path& baseline, const std::filesystem::path& treatment);

MetricStats stats(const std::vector<double>& v);

/// Human-readable report: medians, p10/p90, paired improvements, and CDF
/// tables for max overlap and CCT.
void print_report(std::ostream& os, const ComparisonReport& r);

struct SweepRow {
  std::string param;
  double value = 0.0;
  std::string arm;  // "run", "baseline" or "symphony"
  double median_cct_ms = 0.0;
  double median_jct_ms = 0.0;
  double median_max_overlap = 0.0;
  double median_cct_improvement = 0.0;  // symphony rows of a paired sweep
  double median_jct_improvement = 0.0;
};

std::vector<double> parse_value_list(const std::string& text);

/// One execution per value under out/<param>=<value>/. With `paired`, each
/// value runs a baseline arm (Symphony off) and a Symphony arm and the
/// symphony row carries the paired median improvement. Writes sweep.csv.
std::vector<SweepRow> sweep(const ScenarioConfig& cfg, const std::string& param, const std::vector<double>& values,
                            const std::filesystem::path& out, bool paired, unsigned workers);

/// Renders SVG charts for an output directory: overlap timelines per run,
/// CDFs of max overlap and CCT. With a second directory the CDFs overlay
/// both. Returns the files written.
std::vector<std::filesystem::path> plot(const std::filesystem::path& dir,
                                        const std::filesystem::path& other = {});

}  // namespace ringsim
