// Acceptance run: one line per criterion, PASS or FAIL, with the measured
// numbers and wall time against the budget. Exit status is non-zero when
// any criterion fails. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../common/reference_marker.hpp"
#include "ringsim/config.hpp"
#include "ringsim/experiment.hpp"
#include "ringsim/simulation.hpp"
#include "ringsim/symphony.hpp"

using namespace ringsim;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = fs::path(RINGSIM_SOURCE_DIR) / "scenarios";

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double now_s() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

unsigned workers() { return default_workers(); }

std::vector<std::uint64_t> seeds_upto(std::uint64_t n) {
  std::vector<std::uint64_t> s;
  for (std::uint64_t i = 1; i <= n; ++i) s.push_back(i);
  return s;
}

// --- cached scenario runs ----------------------------------------------------

std::map<std::string, std::vector<SeedRun>> g_cache;

const std::vector<SeedRun>& cached(const std::string& key, const std::function<ScenarioConfig()>& make) {
  auto it = g_cache.find(key);
  if (it != g_cache.end()) return it->second;
  const ScenarioConfig cfg = make();
  auto runs = run_seeds(cfg, workers());
  for (auto& r : runs) {
    if (r.telemetry.truncated) throw RunError(key + ": seed " + std::to_string(r.seed) + " truncated");
  }
  return g_cache.emplace(key, std::move(runs)).first->second;
}

ScenarioConfig motivating() { return load_scenario(kScenarios / "motivating.toml"); }

const std::vector<SeedRun>& baseline20() {
  return cached("baseline", [] { return motivating(); });
}
const std::vector<SeedRun>& symphony20() {
  return cached("symphony", [] { return load_scenario(kScenarios / "motivating_symphony.toml"); });
}
const std::vector<SeedRun>& pq20() {
  return cached("pq", [] { return load_scenario(kScenarios / "pq.toml"); });
}

std::vector<double> ccts_ms(const std::vector<SeedRun>& runs, std::size_t job = 0) {
  std::vector<double> v;
  for (const auto& r : runs) v.push_back(r.summary.jobs.at(job).cct.millis());
  return v;
}

double paired_median_improvement(const std::vector<SeedRun>& base, const std::vector<SeedRun>& treat) {
  std::vector<double> imp;
  for (std::size_t i = 0; i < base.size(); ++i) {
    for (std::size_t j = 0; j < base[i].summary.jobs.size(); ++j) {
      const double b = base[i].summary.jobs[j].cct.millis();
      const double t = treat[i].summary.jobs[j].cct.millis();
      imp.push_back((b - t) / b);
    }
  }
  return median(imp);
}

// --- criteria ----------------------------------------------------------------

// Randomized packet trace: a ring-like progression of steps with
// reordering, duplicates, stragglers from older steps and LAST bits.
struct TracePacket {
  std::uint32_t step, psn;
  bool last;
  bool tick_before;
};

std::vector<TracePacket> make_trace(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  std::vector<TracePacket> out;
  std::uint32_t base = 0;
  std::vector<std::uint32_t> next_psn(8, 1);
  const std::uint32_t step_len = 200 + static_cast<std::uint32_t>(rng.below(600));
  while (out.size() < n) {
    // mostly the lagging step and a few steps ahead; sometimes an old step
    std::uint32_t ahead = static_cast<std::uint32_t>(rng.below(100) < 50 ? 0 : rng.below(4));
    std::uint32_t step = base + ahead;
    if (rng.below(100) == 0 && base > 0) step = base - 1 - static_cast<std::uint32_t>(rng.below(std::min(base, 3u)));
    std::uint32_t& np = next_psn[step % 8];
    std::uint32_t psn = np;
    if (step >= base) {
      ++np;
    } else {
      psn = 1 + static_cast<std::uint32_t>(rng.below(step_len));
    }
    if (rng.below(20) == 0 && psn > 2) psn -= static_cast<std::uint32_t>(1 + rng.below(2));  // reordered
    const bool last = step >= base && psn >= step_len;
    TracePacket p{step, psn, last, rng.below(150) == 0};
    out.push_back(p);
    if (rng.below(30) == 0) out.push_back({step, psn, false, false});  // duplicate
    if (last && step == base) {
      next_psn[base % 8] = 1;
      ++base;
      next_psn[(base + 3) % 8] = 1;
    } else if (last) {
      np = step_len + 1;  // later steps keep sending past their LAST only as duplicates
    }
  }
  out.resize(n);
  return out;
}

Outcome criterion1() {
  std::size_t compared = 0, marks = 0, outpacing = 0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    symphony::SymphonyParams p;
    p.k = seed == 1 ? 0.01 : seed == 2 ? 0.1 : seed == 3 ? 0.001 : 1.0;
    p.n_warmup = seed == 3 ? 10 : 100;
    p.n_sample = seed == 4 ? 0 : 50;
    ref::Params rp{p.k, p.tau.value(), p.n_warmup, p.n_sample};
    symphony::PerJobStateBlock s;
    ref::State r;
    Rng ca(seed * 1000), cb(seed * 1000);
    std::int64_t t = 0;
    for (const TracePacket& pk : make_trace(seed, 100'000)) {
      if (pk.tick_before) {
        t += p.t_win.ns;
        symphony::window_tick(s, p, nanoseconds(t));
        ref::tick(r, rp);
      }
      const auto d = symphony::process_packet(s, pk.step, pk.psn, pk.last, p, ca);
      const auto e = ref::process(r, pk.step, pk.psn, pk.last, rp, cb);
      const int cls = d.classified_as == symphony::Classification::lagging    ? 0
                      : d.classified_as == symphony::Classification::outpacing ? 1
                                                                               : 2;
      const bool same = s.step_min == r.step_min && s.psn_rec == r.psn_rec && s.psn_rec_window == r.psn_rec_next &&
                        s.alpha == r.alpha && s.cnt_total == r.total && s.cnt_op == r.outpacing && cls == e.cls &&
                        d.delta == e.delta && d.probability == e.p && d.mark == e.mark;
      if (!same) {
        return {false, fmt("divergence at packet %zu of seed %llu (step %u psn %u last %d)", compared,
                           static_cast<unsigned long long>(seed), pk.step, pk.psn, pk.last ? 1 : 0)};
      }
      ++compared;
      marks += d.mark;
      outpacing += cls == 1;
    }
  }
  return {true, fmt("%zu packets over 4 traces identical; %zu outpacing, %zu marked", compared, outpacing, marks)};
}

Outcome criterion2() {
  const symphony::DyadicRatio tau{1, 2};
  std::uint64_t checked = 0;
  for (std::uint32_t total = 1; total <= 4096; ++total) {
    for (std::uint32_t op = 0; op <= 4096; ++op) {
      const bool fp = static_cast<double>(op) / static_cast<double>(total) >= 0.25;
      if (symphony::outpacing_check(op, total, tau) != fp) {
        return {false, fmt("mismatch at cnt_op=%u cnt_total=%u", op, total)};
      }
      ++checked;
    }
  }
  return {true, fmt("%llu pairs agree", static_cast<unsigned long long>(checked))};
}

Outcome criterion3() {
  int failures = 0, n = 0;
  auto expect = [&](bool ok) {
    ++n;
    failures += !ok;
  };
  // progress gap: alpha * psn / psn_rec
  expect(symphony::progress_gap(1, 500, 500) == 1.0);
  expect(symphony::progress_gap(3, 100, 50) == 6.0);
  expect(symphony::progress_gap(2, 400, 200) == 4.0);
  // alpha update with floor, delta from the outpacing share
  symphony::SymphonyParams p;
  auto tick_from = [&](std::uint32_t alpha, std::uint32_t op, std::uint32_t total) {
    symphony::PerJobStateBlock s;
    s.alpha = alpha;
    s.cnt_op = op;
    s.cnt_total = total;
    symphony::window_tick(s, p, p.t_win);
    return s.alpha;
  };
  expect(tick_from(1, 300, 1000) == 2);
  expect(tick_from(5, 250, 1000) == 6);  // rho == tau counts as outpacing
  expect(tick_from(5, 249, 1000) == 4);
  expect(tick_from(1, 100, 1000) == 1);  // floor
  expect(tick_from(1, 0, 1000) == 1);
  expect(tick_from(7, 10, 10) == 7);  // too few samples
  // marking probability min(1, k * delta)
  expect(symphony::marking_probability(4.0, 0.01) == 0.04);
  expect(symphony::marking_probability(0.0, 0.01) == 0.0);
  expect(symphony::marking_probability(200.0, 0.01) == 1.0);
  expect(symphony::marking_probability(100.0, 0.01) == 1.0);
  // end to end through the packet path
  symphony::PerJobStateBlock s;
  s.step_min = 5;
  s.psn_rec = s.psn_rec_window = 200;
  s.alpha = 2;
  Rng coin(1);
  const auto d = symphony::process_packet(s, 6, 400, false, p, coin);
  expect(d.delta == 4.0 && std::abs(d.probability - 0.04) < 1e-15);
  return {failures == 0, fmt("%d/%d hand-substituted values exact", n - failures, n)};
}

Outcome criterion4() {
  ScenarioConfig cfg = load_scenario(kScenarios / "lockstep8.toml");
  const auto runs = run_seeds(cfg, workers());
  const JobTelemetry& job = runs[0].telemetry.jobs[0];
  const double theory = theoretical_cct(8, cfg.jobs[0].chunk_bytes, cfg.fabric.link_rate_bps).millis();
  const double cct = runs[0].summary.jobs[0].cct.millis();
  const double ratio = cct / theory;
  const double max_ov = step_overlap(job, cfg.sample_interval).max_value();
  return {runs[0].summary.jobs[0].complete && std::abs(ratio - 1.0) <= 0.05 && max_ov <= 2,
          fmt("CCT %.3f ms vs theory %.3f ms (ratio %.4f), max overlap %.0f", cct, theory, ratio, max_ov)};
}

Outcome criterion5() {
  const ScenarioConfig cfg = motivating();
  const auto& runs = baseline20();
  const double theory = theoretical_cct(4, cfg.jobs[0].chunk_bytes, cfg.fabric.link_rate_bps).millis();
  int high = 0;
  double min_ratio = 1e9;
  std::string ov;
  for (const auto& r : runs) {
    const auto& j = r.summary.jobs[0];
    high += j.max_overlap >= 10;
    min_ratio = std::min(min_ratio, j.cct.millis() / theory);
    ov += (ov.empty() ? "" : ",") + std::to_string(static_cast<int>(j.max_overlap));
  }
  const bool pass = runs.size() == 20 && high >= 16 && min_ratio >= 1.2;
  return {pass, fmt("overlap>=10 in %d/20 seeds [%s]; CCT/theory min %.2f, median %.2f", high, ov.c_str(), min_ratio,
                    median(ccts_ms(runs)) / theory)};
}

Outcome criterion6() {
  const auto& base = baseline20();
  const auto& sym = symphony20();
  int ok = 0;
  double worst_sym = 0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double limit = std::max(8.0, base[i].summary.jobs[0].max_overlap / 3.0);
    ok += sym[i].summary.jobs[0].max_overlap <= limit;
    worst_sym = std::max(worst_sym, sym[i].summary.jobs[0].max_overlap);
  }
  const double imp = paired_median_improvement(base, sym);
  return {ok == 20 && imp >= 0.15,
          fmt("overlap within bound in %d/20 seeds (max %.0f); median paired CCT improvement %.1f%% "
              "(%.2f -> %.2f ms)",
              ok, worst_sym, 100 * imp, median(ccts_ms(base)), median(ccts_ms(sym)))};
}

Outcome criterion7() {
  const auto& base = baseline20();
  const double activation_ms = 0.5 * median(ccts_ms(base));
  const auto& late = cached("late", [&] {
    ScenarioConfig c = load_scenario(kScenarios / "late_start.toml");
    c.symphony.activation_time = nanoseconds(std::llround(activation_ms * 1e6));
    return c;
  });
  const SimTime act = nanoseconds(std::llround(activation_ms * 1e6));
  int ok = 0;
  std::string worst;
  for (const auto& r : late) {
    const auto series = step_overlap(r.telemetry.jobs[0], microseconds(100));
    double at = 0, after = 0;
    for (const auto& [t, v] : series.samples) {
      if (t <= act) at = v;
      if (t >= act) after = std::max(after, v);
    }
    if (after <= at + 2) {
      ++ok;
    } else {
      worst += fmt(" seed %llu: %.0f->%.0f", static_cast<unsigned long long>(r.seed), at, after);
    }
  }
  const double mb = median(ccts_ms(base)), ml = median(ccts_ms(late));
  return {ok == static_cast<int>(late.size()) && ml < mb,
          fmt("activation at %.2f ms; overlap bound held in %d/%zu seeds%s; median CCT %.2f vs baseline %.2f ms",
              activation_ms, ok, late.size(), worst.c_str(), ml, mb)};
}

Outcome criterion8() {
  const double pq = median(ccts_ms(pq20()));
  const double sym = median(ccts_ms(symphony20()));
  const double base = median(ccts_ms(baseline20()));
  return {pq > sym, fmt("median CCT: PQ %.2f ms, Symphony %.2f ms, baseline %.2f ms", pq, sym, base)};
}

Outcome criterion9() {
  const auto seeds = seeds_upto(5);
  // (a) k sweep on the Symphony arm
  std::map<double, double> k_cct;
  for (double k : {1e-4, 1e-3, 1e-2, 1e-1}) {
    const auto& runs = cached(fmt("k=%g", k), [&] {
      ScenarioConfig c = load_scenario(kScenarios / "motivating_symphony.toml");
      c.seeds = seeds;
      apply_sweep(c, "k", k);
      return c;
    });
    k_cct[k] = median(ccts_ms(runs));
  }
  const double a3 = k_cct[1e-3], a2 = k_cct[1e-2];
  const bool close = std::abs(a3 - a2) / std::min(a3, a2) <= 0.10;
  const bool beats_hi = std::max(a3, a2) < k_cct[1e-1];
  const bool beats_lo = std::max(a3, a2) < k_cct[1e-4];
  const bool pass_a = close && beats_hi && beats_lo;

  // (b) chunk sweep, paired improvement
  auto paired = [&](const std::string& tag, const std::function<void(ScenarioConfig&)>& edit, const char* file) {
    const auto& b = cached(tag + "/base", [&] {
      ScenarioConfig c = load_scenario(kScenarios / file);
      c.seeds = seeds;
      c.symphony.enabled = false;
      edit(c);
      return c;
    });
    const auto& s = cached(tag + "/sym", [&] {
      ScenarioConfig c = load_scenario(kScenarios / file);
      c.seeds = seeds;
      c.symphony.enabled = true;
      edit(c);
      return c;
    });
    return paired_median_improvement(b, s);
  };
  auto chunk_edit = [](std::uint64_t bytes) {
    return [bytes](ScenarioConfig& c) {
      c.jobs[0].passes = 8;
      apply_sweep(c, "chunk_bytes", static_cast<double>(bytes));
    };
  };
  const double small = paired("chunk=128K", chunk_edit(128 * 1024), "motivating.toml");
  const double large = paired("chunk=8M", chunk_edit(8 * 1024 * 1024), "motivating.toml");
  const bool pass_b = large >= small;

  // (c) imbalance sweep, paired improvement, monotone non-decreasing
  std::vector<double> imb;
  for (double ratio : {1.1, 1.3, 1.5, 1.7}) {
    imb.push_back(paired(fmt("imbalance=%.1f", ratio), [ratio](ScenarioConfig& c) { apply_sweep(c, "imbalance_ratio", ratio); },
                         "imbalance.toml"));
  }
  bool pass_c = true;
  for (std::size_t i = 1; i < imb.size(); ++i) pass_c = pass_c && imb[i] >= imb[i - 1];

  return {pass_a && pass_b && pass_c,
          fmt("(a) %s median CCT k=1e-4 %.2f, 1e-3 %.2f, 1e-2 %.2f, 1e-1 %.2f ms [close %d, beats 1e-1 %d, beats "
              "1e-4 %d]; (b) %s improvement 128K %.1f%%, 8M %.1f%%; (c) %s improvement 1.1x %.1f%%, 1.3x %.1f%%, "
              "1.5x %.1f%%, 1.7x %.1f%%",
              pass_a ? "PASS" : "FAIL", k_cct[1e-4], a3, a2, k_cct[1e-1], close, beats_hi, beats_lo,
              pass_b ? "PASS" : "FAIL", 100 * small, 100 * large, pass_c ? "PASS" : "FAIL", 100 * imb[0],
              100 * imb[1], 100 * imb[2], 100 * imb[3])};
}

Outcome criterion10() {
  const ScenarioConfig cfg = load_scenario(kScenarios / "fault.toml");
  SimulationConfig sc = to_simulation_config(cfg, cfg.seeds.front());
  Simulation sim(sc);
  const bool done = sim.run();
  const RunTelemetry& t = sim.telemetry();
  if (!done || t.drops.size() != 1) {
    return {false, fmt("completed %d, drops %zu", done ? 1 : 0, t.drops.size())};
  }
  const DropRecord& drop = t.drops[0];
  const NodeId core = *sim.fabric().find_node("core0");
  const SimTime outage_end = t.jobs[0].step_complete.at(drop.step);
  std::size_t during = 0, marked = 0, bad = 0, stale_min_pkts = 0;
  for (const DecisionRecord& d : t.decisions) {
    if (d.switch_id != core || d.job_id != drop.job_id || d.t < drop.t || d.t > outage_end) continue;
    ++during;
    if (d.step == d.step_min) ++stale_min_pkts;
    if (d.marked) {
      ++marked;
      if (d.step <= d.step_min) ++bad;
    }
  }
  const bool pass = drop.at == core && drop.last && t.jobs[0].complete && t.jobs[0].retransmitted_packets >= 1 &&
                    bad == 0 && during > 0;
  return {pass, fmt("LAST of step %u dropped at core0 t=%.3f ms, recovered by %.3f ms; %zu decisions during outage "
                    "(%zu at step_min), %zu marked, %zu marked at or below step_min",
                    drop.step, drop.t.millis(), outage_end.millis(), during, stale_min_pkts, marked, bad)};
}

Outcome criterion11() {
  // (a) isolation replay on one switch of the interleaved run
  ScenarioConfig cfg = load_scenario(kScenarios / "two_job.toml");
  cfg.symphony.enabled = true;
  cfg.record_decisions = true;
  cfg.decision_switches = {"spine0"};
  SimulationConfig sc = to_simulation_config(cfg, 1);
  std::size_t replayed = 0, mismatched = 0;
  std::set<JobId> jobs_seen;
  {
    Simulation sim(sc);
    if (!sim.run()) return {false, "isolation run truncated"};
    const RunTelemetry& t = sim.telemetry();
    const symphony::SymphonyParams& p = sc.symphony.params;
    std::map<JobId, symphony::PerJobStateBlock> solo;
    for (const auto& j : sc.jobs) {
      symphony::PerJobStateBlock b;
      b.last_window_start = sc.symphony.activation_time;
      solo[j.job_id] = b;
    }
    Rng unused(0);
    std::size_t tick = 0;
    for (const DecisionRecord& d : t.decisions) {
      while (tick < t.window_ticks.size() && t.window_ticks[tick].seq < d.seq) {
        for (auto& [id, b] : solo) symphony::window_tick(b, p, t.window_ticks[tick].t);
        ++tick;
      }
      symphony::PerJobStateBlock& b = solo.at(d.job_id);
      const auto out = symphony::process_packet(b, d.step, d.psn, d.is_last, p, unused);
      ++replayed;
      jobs_seen.insert(d.job_id);
      if (b.step_min != d.step_min || b.psn_rec != d.psn_rec || b.alpha != d.alpha || out.delta != d.delta ||
          out.probability != d.probability) {
        ++mismatched;
      }
    }
  }
  // (b) final-step span over 20 seeds
  const auto& base = cached("two_job/base", [] { return load_scenario(kScenarios / "two_job.toml"); });
  const auto& sym = cached("two_job/sym", [] {
    ScenarioConfig c = load_scenario(kScenarios / "two_job.toml");
    c.symphony.enabled = true;
    return c;
  });
  std::string spans;
  bool span_ok = true;
  for (std::size_t j = 0; j < 2; ++j) {
    std::vector<double> b, s;
    for (const auto& r : base) b.push_back(r.summary.jobs.at(j).final_step_span.millis());
    for (const auto& r : sym) s.push_back(r.summary.jobs.at(j).final_step_span.millis());
    span_ok = span_ok && median(s) <= median(b);
    spans += fmt(" job %zu %.3f vs %.3f ms;", j, median(s), median(b));
  }
  const bool pass = mismatched == 0 && replayed > 0 && jobs_seen.size() == 2 && span_ok && base.size() == 20;
  return {pass, fmt("replayed %zu decisions of %zu jobs at spine0, %zu mismatches; median final-step span "
                    "Symphony vs baseline:%s",
                    replayed, jobs_seen.size(), mismatched, spans.c_str())};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion12() {
  // (a) byte-identical outputs
  ScenarioConfig cfg = load_scenario(kScenarios / "motivating_symphony.toml");
  cfg.seeds = {1, 2};
  cfg.record_decisions = true;
  cfg.decision_switches = {"tor0"};
  const fs::path a = fs::temp_directory_path() / "ringsim_accept_det_a";
  const fs::path b = fs::temp_directory_path() / "ringsim_accept_det_b";
  fs::remove_all(a);
  fs::remove_all(b);
  run_scenario(cfg, a, workers());
  run_scenario(cfg, b, workers());
  std::size_t files = 0, same = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    ++files;
    same += slurp(e.path()) == slurp(b / fs::relative(e.path(), a));
  }

  // (b) switching Symphony off before it has throttled anything must leave
  // exactly the baseline mark trace behind.
  ScenarioConfig base_cfg = motivating();
  SimulationConfig sb = to_simulation_config(base_cfg, 1);
  sb.record_marks = true;
  SimulationConfig ss = sb;
  ss.symphony.enabled = true;

  Simulation probe(ss);
  probe.run();
  SimTime first_sym = kNever;
  for (const auto& m : probe.telemetry().marks) {
    if (m.symphony) {
      first_sym = m.t;
      break;
    }
  }
  if (first_sym == kNever) return {false, "Symphony never marked in the probe run"};

  Simulation baseline(sb);
  baseline.run();
  Simulation on_off(ss);
  on_off.run_until(first_sym - nanoseconds(1));
  on_off.set_symphony_enabled(false);
  on_off.run();
  const auto& mb = baseline.telemetry().marks;
  const auto& mo = on_off.telemetry().marks;
  const bool trace_equal = mb == mo;
  std::size_t sym_after = 0;
  for (const auto& m : mo) sym_after += m.symphony;

  // (c) mid-run fallback after Symphony has diverged the run: from one
  // snapshot, the disabled copy must emit RED-only marks.
  Simulation mid(ss);
  mid.run_until(milliseconds(20));
  const std::size_t before = mid.telemetry().marks.size();
  mid.set_symphony_enabled(false);
  mid.run();
  std::size_t late_sym = 0;
  for (std::size_t i = before; i < mid.telemetry().marks.size(); ++i) late_sym += mid.telemetry().marks[i].symphony;

  const bool pass = files > 0 && same == files && trace_equal && sym_after == 0 && late_sym == 0;
  return {pass, fmt("%zu/%zu output files identical; disabled at %.3f ms: mark trace %s baseline (%zu marks); "
                    "disabled at 20 ms after divergence: %zu Symphony marks afterwards",
                    same, files, (first_sym - nanoseconds(1)).millis(), trace_equal ? "equals" : "differs from",
                    mb.size(), late_sym)};
}

struct Criterion {
  int id;
  double budget_s;
  Outcome (*fn)();
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, 5, criterion1},     {2, 10, criterion2},    {3, 1, criterion3},    {4, 30, criterion4},
      {5, 600, criterion5},   {6, 600, criterion6},   {7, 300, criterion7},  {8, 600, criterion8},
      {9, 1200, criterion9},  {10, 120, criterion10}, {11, 600, criterion11}, {12, 300, criterion12},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  std::printf("acceptance: %u worker(s)\n", workers());
  int failed = 0;
  for (const Criterion& c : all) {
    if (!only.empty() && !only.contains(c.id)) continue;
    const double t0 = now_s();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = now_s() - t0;
    const bool in_time = dt <= c.budget_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("criterion %2d: %s  %s  [%.1f s / %.0f s%s]\n", c.id, pass ? "PASS" : "FAIL", o.detail.c_str(), dt,
                c.budget_s, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
