// ringsim command-line front end.
//   ringsim run <config> -o <dir>
//   ringsim compare <dirA> <dirB>
//   ringsim sweep <config> --param <name> --values <list> [-o <dir>] [--paired]
//   ringsim plot <dir> [--with <dir2>]
// Exit codes: 0 ok, 1 config error, 2 runtime error.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "ringsim/config.hpp"
#include "ringsim/experiment.hpp"

namespace fs = std::filesystem;
using namespace ringsim;

namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

unsigned workers_from(int flag) { return flag > 0 ? static_cast<unsigned>(flag) : default_workers(); }

void print_summaries(const std::vector<RunSummary>& sums) {
  for (const RunSummary& s : sums) {
    for (const JobSummary& j : s.jobs) {
      std::printf("seed %llu job %u: cct %.3f ms  jct %.3f ms  max overlap %.0f%s\n",
                  static_cast<unsigned long long>(s.seed), j.job_id, j.cct.millis(), j.jct.millis(), j.max_overlap,
                  j.complete ? "" : "  (incomplete)");
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Packet-level ring collective simulator"};
  app.require_subcommand(1);
  int workers = 0;
  app.add_option("-j,--workers", workers, "parallel seed workers (default: RINGSIM_WORKERS or all cores)");

  std::string run_cfg, run_out;
  auto* run = app.add_subcommand("run", "run every seed of a scenario");
  run->add_option("config", run_cfg, "scenario TOML")->required();
  run->add_option("-o,--out", run_out, "output directory")->required();

  std::string cmp_a, cmp_b;
  auto* cmp = app.add_subcommand("compare", "paired comparison of two run directories");
  cmp->add_option("baseline", cmp_a)->required();
  cmp->add_option("treatment", cmp_b)->required();

  std::string sw_cfg, sw_param, sw_values, sw_out = "sweep_out";
  bool sw_paired = false;
  auto* sw = app.add_subcommand("sweep", "run a scenario once per parameter value");
  sw->add_option("config", sw_cfg, "scenario TOML")->required();
  sw->add_option("--param", sw_param, "k, chunk_bytes, imbalance_ratio, t_win or n_warmup")->required();
  sw->add_option("--values", sw_values, "comma-separated values")->required();
  sw->add_option("-o,--out", sw_out, "output directory");
  sw->add_flag("--paired", sw_paired, "run baseline and Symphony arms per value");

  std::string pl_dir, pl_with;
  auto* pl = app.add_subcommand("plot", "render SVG charts from a run directory");
  pl->add_option("dir", pl_dir)->required();
  pl->add_option("--with", pl_with, "second run directory overlaid on the CDFs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) {
      const ScenarioConfig cfg = load_scenario(run_cfg);
      const RunReport rep = run_scenario(cfg, run_out, workers_from(workers));
      print_summaries(rep.summaries);
      std::printf("wrote %s (config %s)\n", run_out.c_str(), rep.config_hash.c_str());
    } else if (*cmp) {
      print_report(std::cout, compare(cmp_a, cmp_b));
    } else if (*sw) {
      const ScenarioConfig cfg = load_scenario(sw_cfg);
      const std::vector<double> values = parse_value_list(sw_values);
      const auto rows = sweep(cfg, sw_param, values, sw_out, sw_paired, workers_from(workers));
      std::printf("%-16s %14s %-9s %12s %12s %8s %10s\n", "param", "value", "arm", "cct_ms", "jct_ms", "overlap",
                  "cct_gain");
      for (const SweepRow& r : rows) {
        std::printf("%-16s %14.10g %-9s %12.3f %12.3f %8.1f %9.1f%%\n", r.param.c_str(), r.value, r.arm.c_str(),
                    r.median_cct_ms, r.median_jct_ms, r.median_max_overlap, 100.0 * r.median_cct_improvement);
      }
      std::printf("wrote %s\n", (fs::path(sw_out) / "sweep.csv").string().c_str());
    } else if (*pl) {
      for (const fs::path& p : plot(pl_dir, pl_with)) std::printf("wrote %s\n", p.string().c_str());
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntimeError;
  }
  return 0;
}
