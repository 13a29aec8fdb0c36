#pragma once

// Scenario files: a TOML document describing the fabric, the workload and
// every protocol constant. parse_scenario() fills in defaults for missing
// keys and rejects unknown ones; serialize_scenario() writes every field
// back out, so a serialized config is self-contained.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ringsim/simulation.hpp"

namespace ringsim {

/// Bad scenario input. The message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class JobKind : std::uint8_t { multi_1d, ring_2d };

struct JobConfig {
  JobId id = 0;
  JobKind kind = JobKind::multi_1d;
  // Ranks [rank_offset, rank_offset + rank_count) of the placement; a
  // rank_count of 0 takes every remaining rank. `hosts` overrides both.
  std::uint32_t rank_offset = 0;
  std::uint32_t rank_count = 0;
  std::vector<HostId> hosts;
  std::uint32_t rings = 1;
  std::uint32_t dim_a = 0;
  std::uint32_t dim_b = 0;
  std::uint64_t chunk_bytes = 8ULL << 20;
  std::uint32_t passes = 1;
  SimTime start{};
  SimTime compute_gap{};
};

enum class Placement : std::uint8_t { round_robin, linear };

/// Fixed load skew on one hop: the link runs at 1/ratio of its rate.
struct ImbalanceConfig {
  double ratio = 1.0;
  std::string from = "tor0";
  std::string to = "spine0";
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::vector<std::uint64_t> seeds{1};
  SimTime t_end = seconds(10);

  FabricSpec fabric;
  Placement placement = Placement::round_robin;
  RedParams red;
  DcqcnParams cc;
  SymphonySettings symphony;

  std::vector<JobConfig> jobs;
  std::optional<JobStreamSpec> stream;  // seed is taken from the run seed
  std::uint32_t max_concurrency = 0;
  std::uint32_t lane_window = 1;
  bool qp_per_message = false;

  ImbalanceConfig imbalance;
  std::vector<PerturbationSpec> perturbations;
  std::vector<BackgroundSpec> background;
  std::vector<FaultRule> faults;

  SimTime sample_interval = microseconds(100);
  SimTime bin_width = milliseconds(1);
  bool record_decisions = false;
  std::vector<std::string> decision_switches;
};

ScenarioConfig parse_scenario(std::string_view text, std::string_view source = "<config>");
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Canonical TOML with every field present.
std::string serialize_scenario(const ScenarioConfig& cfg);

/// 16 hex digits over the canonical serialization.
std::string config_hash(const ScenarioConfig& cfg);

/// Rank -> host map selected by cfg.placement.
std::vector<HostId> rank_placement(const ScenarioConfig& cfg);

/// Expands the workload section into concrete jobs for one seed.
std::vector<JobSpec> build_jobs(const ScenarioConfig& cfg, std::uint64_t seed);

SimulationConfig to_simulation_config(const ScenarioConfig& cfg, std::uint64_t seed);

/// Names accepted by apply_sweep().
const std::vector<std::string>& sweep_parameters();

/// Sets one sweepable parameter. Throws ConfigError for unknown names or
/// out-of-range values.
void apply_sweep(ScenarioConfig& cfg, std::string_view param, double value);

}  // namespace ringsim
