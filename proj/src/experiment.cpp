#include "ringsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ringsim/simulation.hpp"

namespace ringsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw RunError("cannot write '" + p.string() + "'");
  return os;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw RunError("cannot read '" + p.string() + "'");
  return is;
}

}  // namespace

unsigned default_workers() {
  if (const char* env = std::getenv("RINGSIM_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string make_run_id(const ScenarioConfig& cfg, std::uint64_t seed) {
  return cfg.name + "-" + config_hash(cfg).substr(0, 8) + "-s" + std::to_string(seed);
}

std::vector<SeedRun> run_seeds(const ScenarioConfig& cfg, unsigned workers) {
  const std::size_t n = cfg.seeds.size();
  std::vector<SeedRun> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const std::uint64_t seed = cfg.seeds[i];
        SimulationConfig sc = to_simulation_config(cfg, seed);
        std::optional<Simulation> sim;
        try {
          sim.emplace(std::move(sc));
        } catch (const FabricError& e) {
          throw ConfigError(e.what());
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
        sim->run();
        SeedRun& r = out[i];
        r.seed = seed;
        r.run_id = make_run_id(cfg, seed);
        r.telemetry = sim->take_telemetry();
        r.telemetry.seed = seed;
        r.summary = summarize(r.telemetry, cfg.sample_interval);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), n));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  // First failure in seed order, so the reported error does not depend on
  // thread timing.
  for (auto& e : errors) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const ConfigError&) {
      throw;
    } catch (const ContractViolation& ex) {
      throw RunError(std::string("engine contract violated: ") + ex.what());
    } catch (const std::exception& ex) {
      throw RunError(ex.what());
    }
  }
  return out;
}

void write_outputs(const ScenarioConfig& cfg, const std::vector<SeedRun>& runs, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw RunError("cannot create '" + dir.string() + "': " + ec.message());

  {
    auto os = open_out(dir / "config.toml");
    os << serialize_scenario(cfg);
  }
  {
    auto os = open_out(dir / "overlap.csv");
    os << overlap_csv_header() << '\n';
    for (const SeedRun& r : runs) write_overlap_rows(os, r.run_id, r.telemetry, cfg.sample_interval);
  }
  {
    auto os = open_out(dir / "steps.csv");
    os << steps_csv_header() << '\n';
    for (const SeedRun& r : runs) write_steps_rows(os, r.run_id, r.telemetry);
  }
  {
    auto os = open_out(dir / "summary.csv");
    os << summary_csv_header() << '\n';
    for (const SeedRun& r : runs) write_summary_rows(os, r.run_id, r.summary);
  }
  if (cfg.record_decisions) {
    fs::create_directories(dir / "decisions", ec);
    for (const SeedRun& r : runs) {
      auto os = open_out(dir / "decisions" / (r.run_id + ".csv"));
      os << decisions_csv_header() << '\n';
      write_decision_rows(os, r.telemetry);
    }
  }

  json m;
  m["name"] = cfg.name;
  m["config_hash"] = config_hash(cfg);
  m["config"] = "config.toml";
  json list = json::array();
  for (const SeedRun& r : runs) {
    json e;
    e["run_id"] = r.run_id;
    e["seed"] = r.seed;
    e["truncated"] = r.telemetry.truncated;
    e["end_time_ns"] = r.telemetry.end_time.ns;
    e["events"] = r.telemetry.events;
    e["dispatch_hash"] = r.telemetry.dispatch_hash;
    if (cfg.record_decisions) e["decisions"] = "decisions/" + r.run_id + ".csv";
    list.push_back(e);
  }
  m["runs"] = list;
  m["files"] = {"overlap.csv", "steps.csv", "summary.csv"};
  auto os = open_out(dir / "manifest.json");
  os << m.dump(2) << '\n';
}

RunReport run_scenario(const ScenarioConfig& cfg, const fs::path& dir, unsigned workers) {
  const std::vector<SeedRun> runs = run_seeds(cfg, workers);
  write_outputs(cfg, runs, dir);
  RunReport rep;
  rep.dir = dir;
  rep.config_hash = config_hash(cfg);
  for (const SeedRun& r : runs) {
    rep.summaries.push_back(r.summary);
    rep.truncated = rep.truncated || r.telemetry.truncated;
  }
  if (rep.truncated) {
    std::string seeds;
    for (const SeedRun& r : runs) {
      if (r.telemetry.truncated) seeds += (seeds.empty() ? "" : ", ") + std::to_string(r.seed);
    }
    throw RunError("run truncated at t_end for seed(s) " + seeds + "; partial telemetry written to " + dir.string());
  }
  return rep;
}

LoadedRun load_run_dir(const fs::path& dir) {
  LoadedRun out;
  json m;
  try {
    auto is = open_in(dir / "manifest.json");
    m = json::parse(is);
    out.name = m.at("name").get<std::string>();
    out.config_hash = m.at("config_hash").get<std::string>();
    for (const json& e : m.at("runs")) {
      out.runs.push_back({e.at("run_id").get<std::string>(), e.at("seed").get<std::uint64_t>(),
                          e.at("truncated").get<bool>()});
    }
  } catch (const json::exception& e) {
    throw RunError((dir / "manifest.json").string() + ": " + e.what());
  }
  auto is = open_in(dir / "summary.csv");
  try {
    out.rows = read_summary_csv(is);
  } catch (const MetricsError& e) {
    throw RunError((dir / "summary.csv").string() + ": " + e.what());
  }
  return out;
}

MetricStats stats(const std::vector<double>& v) {
  if (v.empty()) return {};
  return {median(v), percentile(v, 10), percentile(v, 90)};
}

ComparisonReport compare(const fs::path& baseline, const fs::path& treatment) {
  const LoadedRun a = load_run_dir(baseline);
  const LoadedRun b = load_run_dir(treatment);

  auto seed_map = [](const LoadedRun& r) {
    std::map<std::string, std::uint64_t> m;
    for (const auto& e : r.runs) m[e.run_id] = e.seed;
    return m;
  };
  auto seed_set = [](const LoadedRun& r) {
    std::set<std::uint64_t> s;
    for (const auto& e : r.runs) s.insert(e.seed);
    return s;
  };
  if (seed_set(a) != seed_set(b)) {
    throw RunError("seed sets differ between '" + baseline.string() + "' and '" + treatment.string() + "'");
  }

  // (job, seed) -> row
  auto index = [](const LoadedRun& r, const std::map<std::string, std::uint64_t>& seeds) {
    std::map<std::pair<JobId, std::uint64_t>, SummaryRow> m;
    for (const SummaryRow& row : r.rows) {
      auto it = seeds.find(row.run_id);
      if (it == seeds.end()) throw RunError("summary row for unknown run '" + row.run_id + "'");
      m[{row.job_id, it->second}] = row;
    }
    return m;
  };
  const auto ia = index(a, seed_map(a));
  const auto ib = index(b, seed_map(b));

  ComparisonReport rep;
  rep.baseline = baseline.string();
  rep.treatment = treatment.string();
  std::map<JobId, JobComparison> jobs;
  for (const auto& [key, ra] : ia) {
    auto it = ib.find(key);
    if (it == ib.end()) {
      throw RunError("job " + std::to_string(key.first) + " seed " + std::to_string(key.second) +
                     " missing from treatment");
    }
    const SummaryRow& rb = it->second;
    if (ra.cct_ns < 0 || rb.cct_ns < 0) {
      throw RunError("job " + std::to_string(key.first) + " seed " + std::to_string(key.second) +
                     " did not complete in one of the runs");
    }
    JobComparison& j = jobs[key.first];
    j.job_id = key.first;
    j.seeds.push_back(key.second);
    j.base_cct_ms.push_back(ra.cct_ns * 1e-6);
    j.treat_cct_ms.push_back(rb.cct_ns * 1e-6);
    j.base_jct_ms.push_back(ra.jct_ns * 1e-6);
    j.treat_jct_ms.push_back(rb.jct_ns * 1e-6);
    j.base_overlap.push_back(ra.max_overlap);
    j.treat_overlap.push_back(rb.max_overlap);
    j.base_span_ms.push_back(ra.final_step_span_ns * 1e-6);
    j.treat_span_ms.push_back(rb.final_step_span_ns * 1e-6);
    j.cct_improvement.push_back(ra.cct_ns > 0 ? static_cast<double>(ra.cct_ns - rb.cct_ns) / ra.cct_ns : 0.0);
    j.jct_improvement.push_back(ra.jct_ns > 0 ? static_cast<double>(ra.jct_ns - rb.jct_ns) / ra.jct_ns : 0.0);
  }
  for (auto& [id, j] : jobs) rep.jobs.push_back(std::move(j));
  return rep;
}

namespace {

void stat_line(std::ostream& os, const char* label, const std::vector<double>& a, const std::vector<double>& b) {
  const MetricStats sa = stats(a);
  const MetricStats sb = stats(b);
  char buf[256];
  std::snprintf(buf, sizeof buf, "  %-16s %10.4g %10.4g %10.4g   %10.4g %10.4g %10.4g\n", label, sa.median, sa.p10,
                sa.p90, sb.median, sb.p10, sb.p90);
  os << buf;
}

double fraction_le(const std::vector<double>& v, double x) {
  const auto n = std::count_if(v.begin(), v.end(), [x](double e) { return e <= x; });
  return v.empty() ? 0.0 : static_cast<double>(n) / static_cast<double>(v.size());
}

void cdf_table(std::ostream& os, const char* label, const std::vector<double>& a, const std::vector<double>& b) {
  std::set<double> xs(a.begin(), a.end());
  xs.insert(b.begin(), b.end());
  os << "  CDF of " << label << "\n";
  os << "    " << label << ",baseline,treatment\n";
  for (double x : xs) os << "    " << fmt(x, 6) << ',' << fmt(fraction_le(a, x)) << ',' << fmt(fraction_le(b, x)) << '\n';
}

}  // namespace

void print_report(std::ostream& os, const ComparisonReport& r) {
  os << "baseline:  " << r.baseline << "\n";
  os << "treatment: " << r.treatment << "\n";
  for (const JobComparison& j : r.jobs) {
    os << "\njob " << j.job_id << " (" << j.seeds.size() << " paired seeds)\n";
    os << "                     baseline median/p10/p90           treatment median/p10/p90\n";
    stat_line(os, "cct_ms", j.base_cct_ms, j.treat_cct_ms);
    stat_line(os, "jct_ms", j.base_jct_ms, j.treat_jct_ms);
    stat_line(os, "max_overlap", j.base_overlap, j.treat_overlap);
    stat_line(os, "final_span_ms", j.base_span_ms, j.treat_span_ms);
    const MetricStats ci = stats(j.cct_improvement);
    const MetricStats ji = stats(j.jct_improvement);
    os << "  cct improvement  median " << fmt(100 * ci.median) << "%  p10 " << fmt(100 * ci.p10) << "%  p90 "
       << fmt(100 * ci.p90) << "%\n";
    os << "  jct improvement  median " << fmt(100 * ji.median) << "%  p10 " << fmt(100 * ji.p10) << "%  p90 "
       << fmt(100 * ji.p90) << "%\n";
    cdf_table(os, "max_overlap", j.base_overlap, j.treat_overlap);
    cdf_table(os, "cct_ms", j.base_cct_ms, j.treat_cct_ms);
  }
}

std::vector<double> parse_value_list(const std::string& text) {
  std::vector<double> out;
  for (std::string cell : split(text)) {
    cell.erase(0, cell.find_first_not_of(" \t"));
    cell.erase(cell.find_last_not_of(" \t") + 1);
    if (cell.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0' || !std::isfinite(v)) throw ConfigError("bad sweep value '" + cell + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("--values needs at least one number");
  return out;
}

std::vector<SweepRow> sweep(const ScenarioConfig& base, const std::string& param, const std::vector<double>& values,
                            const fs::path& out, bool paired, unsigned workers) {
  // Validate every value before running anything.
  std::vector<ScenarioConfig> cfgs;
  for (double v : values) {
    ScenarioConfig c = base;
    apply_sweep(c, param, v);
    cfgs.push_back(std::move(c));
  }

  auto medians = [](const std::vector<SeedRun>& runs, SweepRow& row) {
    std::vector<double> cct, jct, ov;
    for (const SeedRun& r : runs) {
      for (const JobSummary& j : r.summary.jobs) {
        if (!j.complete) continue;
        cct.push_back(j.cct.millis());
        jct.push_back(j.jct.millis());
        ov.push_back(j.max_overlap);
      }
    }
    if (cct.empty()) return;
    row.median_cct_ms = median(cct);
    row.median_jct_ms = median(jct);
    row.median_max_overlap = median(ov);
  };

  auto checked = [](const std::vector<SeedRun>& runs, const std::string& where) {
    for (const SeedRun& r : runs) {
      if (r.telemetry.truncated) throw RunError(where + ": seed " + std::to_string(r.seed) + " truncated at t_end");
    }
  };

  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::string tag = param + "=" + fmt(values[i], 10);
    const fs::path dir = out / tag;
    if (!paired) {
      const auto runs = run_seeds(cfgs[i], workers);
      write_outputs(cfgs[i], runs, dir);
      checked(runs, tag);
      SweepRow row{param, values[i], "run"};
      medians(runs, row);
      rows.push_back(row);
      continue;
    }
    ScenarioConfig b = cfgs[i];
    b.symphony.enabled = false;
    ScenarioConfig s = cfgs[i];
    s.symphony.enabled = true;
    const auto rb = run_seeds(b, workers);
    const auto rs = run_seeds(s, workers);
    write_outputs(b, rb, dir / "baseline");
    write_outputs(s, rs, dir / "symphony");
    checked(rb, tag + "/baseline");
    checked(rs, tag + "/symphony");

    SweepRow brow{param, values[i], "baseline"};
    medians(rb, brow);
    SweepRow srow{param, values[i], "symphony"};
    medians(rs, srow);
    std::vector<double> ci, ji;
    for (std::size_t k = 0; k < rb.size(); ++k) {
      for (std::size_t j = 0; j < rb[k].summary.jobs.size(); ++j) {
        const JobSummary& x = rb[k].summary.jobs[j];
        const JobSummary& y = rs[k].summary.jobs[j];
        if (x.cct.ns > 0) ci.push_back(static_cast<double>(x.cct.ns - y.cct.ns) / x.cct.ns);
        if (x.jct.ns > 0) ji.push_back(static_cast<double>(x.jct.ns - y.jct.ns) / x.jct.ns);
      }
    }
    if (!ci.empty()) srow.median_cct_improvement = median(ci);
    if (!ji.empty()) srow.median_jct_improvement = median(ji);
    rows.push_back(brow);
    rows.push_back(srow);
  }

  std::error_code ec;
  fs::create_directories(out, ec);
  auto os = open_out(out / "sweep.csv");
  os << "param,value,arm,median_cct_ms,median_jct_ms,median_max_overlap,median_cct_improvement,median_jct_improvement\n";
  for (const SweepRow& r : rows) {
    os << r.param << ',' << fmt(r.value, 10) << ',' << r.arm << ',' << fmt(r.median_cct_ms, 8) << ','
       << fmt(r.median_jct_ms, 8) << ',' << fmt(r.median_max_overlap, 6) << ',' << fmt(r.median_cct_improvement, 6)
       << ',' << fmt(r.median_jct_improvement, 6) << '\n';
  }
  return rows;
}

// --- plotting ---------------------------------------------------------------

namespace {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> pts;
};

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                         "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void write_svg(const fs::path& path, const std::string& title, const std::string& xlabel, const std::string& ylabel,
               const std::vector<Series>& series, bool steps) {
  constexpr double W = 720, H = 420, L = 70, R = 170, T = 40, B = 55;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool first = true;
  for (const Series& s : series) {
    for (const auto& [x, y] : s.pts) {
      if (first) {
        x0 = x1 = x;
        y1 = y;
        first = false;
      }
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (x1 <= x0) x1 = x0 + 1;
  y0 = 0;
  if (y1 <= y0) y1 = 1;
  y1 *= 1.05;
  const double pw = W - L - R, ph = H - T - B;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return T + ph - (y - y0) / (y1 - y0) * ph; };

  auto os = open_out(path);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << xml_escape(title)
     << "</text>\n";
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = x0 + (x1 - x0) * i / 5.0, fy = y0 + (y1 - y0) * i / 5.0;
    os << "<text x=\"" << px(fx) << "\" y=\"" << T + ph + 16 << "\" text-anchor=\"middle\">" << fmt(fx, 3) << "</text>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << py(fy) + 4 << "\" text-anchor=\"end\">" << fmt(fy, 3) << "</text>\n";
    os << "<line x1=\"" << L << "\" x2=\"" << L + pw << "\" y1=\"" << py(fy) << "\" y2=\"" << py(fy)
       << "\" stroke=\"#ddd\"/>\n";
  }
  os << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << xml_escape(xlabel)
     << "</text>\n";
  os << "<text transform=\"translate(16," << T + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << xml_escape(ylabel) << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const Series& s = series[i];
    const char* color = kColors[i % std::size(kColors)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < s.pts.size(); ++k) {
      if (steps && k > 0) os << px(s.pts[k].first) << ',' << py(s.pts[k - 1].second) << ' ';
      os << px(s.pts[k].first) << ',' << py(s.pts[k].second) << ' ';
    }
    os << "\"/>\n";
    const double ly = T + 14 + 16.0 * static_cast<double>(i);
    os << "<line x1=\"" << L + pw + 10 << "\" x2=\"" << L + pw + 30 << "\" y1=\"" << ly - 4 << "\" y2=\"" << ly - 4
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << L + pw + 34 << "\" y=\"" << ly << "\">" << xml_escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
}

Series cdf_series(const std::string& label, std::vector<double> v) {
  Series s{label, {}};
  std::sort(v.begin(), v.end());
  for (std::size_t i = 0; i < v.size(); ++i) {
    s.pts.emplace_back(v[i], static_cast<double>(i) / static_cast<double>(v.size()));
    s.pts.emplace_back(v[i], static_cast<double>(i + 1) / static_cast<double>(v.size()));
  }
  return s;
}

std::map<std::string, Series> read_overlap(const fs::path& dir) {
  auto is = open_in(dir / "overlap.csv");
  std::string line;
  std::getline(is, line);
  if (line != overlap_csv_header()) throw RunError((dir / "overlap.csv").string() + ": unexpected header");
  std::map<std::string, Series> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto c = split(line);
    if (c.size() != 4) throw RunError((dir / "overlap.csv").string() + ": malformed row '" + line + "'");
    const std::string key = c[0] + " job " + c[1];
    Series& s = out[key];
    s.label = key;
    s.pts.emplace_back(std::stod(c[2]) * 1e-6, std::stod(c[3]));
  }
  return out;
}

}  // namespace

std::vector<fs::path> plot(const fs::path& dir, const fs::path& other) {
  std::vector<fs::path> written;
  const LoadedRun a = load_run_dir(dir);

  // One timeline per job; runs overlaid, capped to keep the chart legible.
  std::map<std::string, std::vector<Series>> by_job;
  for (auto& [key, s] : read_overlap(dir)) {
    const std::string job = key.substr(key.rfind(" job ") + 5);
    auto& v = by_job[job];
    if (v.size() < 6) {
      s.label = key.substr(0, key.rfind(" job "));
      if (s.label.size() > 22) s.label = "..." + s.label.substr(s.label.size() - 19);
      v.push_back(std::move(s));
    }
  }
  for (const auto& [job, series] : by_job) {
    const fs::path p = dir / ("overlap_job" + job + ".svg");
    write_svg(p, a.name + ": step overlap, job " + job, "time (ms)", "distinct steps in flight", series, true);
    written.push_back(p);
  }

  std::vector<Series> ov, cct;
  auto add = [&](const LoadedRun& r, const std::string& label) {
    std::vector<double> o, c;
    for (const SummaryRow& row : r.rows) {
      o.push_back(row.max_overlap);
      if (row.cct_ns >= 0) c.push_back(row.cct_ns * 1e-6);
    }
    ov.push_back(cdf_series(label, o));
    cct.push_back(cdf_series(label, c));
  };
  add(a, dir.filename().empty() ? a.name : dir.filename().string());
  if (!other.empty()) {
    const LoadedRun b = load_run_dir(other);
    std::string label = other.filename().empty() ? b.name : other.filename().string();
    add(b, label == ov.front().label ? label + " (2)" : label);
  }
  const fs::path po = dir / "cdf_max_overlap.svg";
  write_svg(po, "CDF of max step overlap", "max overlap", "fraction of runs", ov, false);
  written.push_back(po);
  const fs::path pc = dir / "cdf_cct.svg";
  write_svg(pc, "CDF of CCT", "CCT (ms)", "fraction of runs", cct, false);
  written.push_back(pc);
  return written;
}

}  // namespace ringsim
