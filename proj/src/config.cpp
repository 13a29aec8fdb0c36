#include "ringsim/config.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <toml.hpp>

namespace ringsim {

namespace {

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::string where(const toml::node& n) {
  const auto& src = n.source();
  if (!src.begin) return "";
  return " (line " + std::to_string(src.begin.line) + ")";
}

// Reads one table, remembering which keys were consumed so leftovers can be
// reported with a spelling suggestion.
class Section {
 public:
  Section(const toml::table& t, std::string path) : t_(t), path_(std::move(path)) {}
  ~Section() = default;

  std::string key_path(std::string_view key) const { return path_.empty() ? std::string(key) : path_ + "." + std::string(key); }

  const toml::node* get(std::string_view key) {
    known_.emplace(key);
    return t_.get(key);
  }

  template <typename T>
  T integer(std::string_view key, T def, T lo = std::numeric_limits<T>::min(), T hi = std::numeric_limits<T>::max()) {
    const toml::node* n = get(key);
    if (!n) return def;
    const auto v = n->value_exact<std::int64_t>();
    if (!v) throw ConfigError("key '" + key_path(key) + "' expects an integer" + where(*n));
    if (*v < static_cast<std::int64_t>(lo) ||
        (hi < static_cast<T>(std::numeric_limits<std::int64_t>::max()) && *v > static_cast<std::int64_t>(hi))) {
      throw ConfigError("key '" + key_path(key) + "' is out of range" + where(*n));
    }
    return static_cast<T>(*v);
  }

  double real(std::string_view key, double def) {
    const toml::node* n = get(key);
    if (!n) return def;
    if (auto v = n->value_exact<double>()) return *v;
    if (auto v = n->value_exact<std::int64_t>()) return static_cast<double>(*v);
    throw ConfigError("key '" + key_path(key) + "' expects a number" + where(*n));
  }

  bool boolean(std::string_view key, bool def) {
    const toml::node* n = get(key);
    if (!n) return def;
    const auto v = n->value_exact<bool>();
    if (!v) throw ConfigError("key '" + key_path(key) + "' expects true or false" + where(*n));
    return *v;
  }

  std::string string(std::string_view key, const std::string& def) {
    const toml::node* n = get(key);
    if (!n) return def;
    const auto v = n->value_exact<std::string>();
    if (!v) throw ConfigError("key '" + key_path(key) + "' expects a string" + where(*n));
    return *v;
  }

  template <typename E>
  E choice(std::string_view key, E def, std::initializer_list<std::pair<std::string_view, E>> names) {
    const toml::node* n = get(key);
    if (!n) return def;
    const auto v = n->value_exact<std::string>();
    std::string options;
    for (const auto& [name, e] : names) {
      if (v && *v == name) return e;
      options += options.empty() ? "" : ", ";
      options += name;
    }
    throw ConfigError("key '" + key_path(key) + "' must be one of: " + options + where(*n));
  }

  // Times are written as numbers in the unit named by the key suffix.
  SimTime time(std::string_view key, SimTime def, double unit_ns, bool allow_never = false) {
    const toml::node* n = get(key);
    if (!n) return def;
    const double v = real(key, 0.0);
    if (allow_never && v < 0.0) return kNever;
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("key '" + key_path(key) + "' must be >= 0" + where(*n));
    return nanoseconds(std::llround(v * unit_ns));
  }

  template <typename T>
  std::vector<T> int_array(std::string_view key, const std::vector<T>& def) {
    const toml::node* n = get(key);
    if (!n) return def;
    const toml::array* arr = n->as_array();
    if (!arr) throw ConfigError("key '" + key_path(key) + "' expects an array of integers" + where(*n));
    std::vector<T> out;
    for (const toml::node& e : *arr) {
      const auto v = e.value_exact<std::int64_t>();
      if (!v || *v < 0) throw ConfigError("key '" + key_path(key) + "' expects non-negative integers" + where(e));
      out.push_back(static_cast<T>(*v));
    }
    return out;
  }

  std::vector<double> real_array(std::string_view key, const std::vector<double>& def) {
    const toml::node* n = get(key);
    if (!n) return def;
    const toml::array* arr = n->as_array();
    if (!arr) throw ConfigError("key '" + key_path(key) + "' expects an array of numbers" + where(*n));
    std::vector<double> out;
    for (const toml::node& e : *arr) {
      if (auto d = e.value_exact<double>()) {
        out.push_back(*d);
      } else if (auto i = e.value_exact<std::int64_t>()) {
        out.push_back(static_cast<double>(*i));
      } else {
        throw ConfigError("key '" + key_path(key) + "' expects numbers" + where(e));
      }
    }
    return out;
  }

  std::vector<std::string> string_array(std::string_view key, const std::vector<std::string>& def) {
    const toml::node* n = get(key);
    if (!n) return def;
    const toml::array* arr = n->as_array();
    if (!arr) throw ConfigError("key '" + key_path(key) + "' expects an array of strings" + where(*n));
    std::vector<std::string> out;
    for (const toml::node& e : *arr) {
      const auto v = e.value_exact<std::string>();
      if (!v) throw ConfigError("key '" + key_path(key) + "' expects strings" + where(e));
      out.push_back(*v);
    }
    return out;
  }

  /// Rejects keys nobody asked for.
  void finish() const {
    for (const auto& [k, v] : t_) {
      const std::string key(k.str());
      if (known_.contains(key)) continue;
      std::string best;
      std::size_t best_d = 3;
      for (const std::string& cand : known_) {
        const std::size_t d = edit_distance(key, cand);
        if (d < best_d) {
          best_d = d;
          best = cand;
        }
      }
      std::string msg = "unknown key '" + key_path(key) + "'" + where(v);
      if (!best.empty()) msg += "; did you mean '" + key_path(best) + "'?";
      throw ConfigError(msg);
    }
  }

 private:
  const toml::table& t_;
  std::string path_;
  std::set<std::string, std::less<>> known_;
};

const toml::table* subtable(Section& parent, std::string_view key) {
  const toml::node* n = parent.get(key);
  if (!n) return nullptr;
  const toml::table* t = n->as_table();
  if (!t) throw ConfigError("key '" + parent.key_path(key) + "' must be a table" + where(*n));
  return t;
}

std::vector<const toml::table*> table_array(Section& parent, std::string_view key) {
  std::vector<const toml::table*> out;
  const toml::node* n = parent.get(key);
  if (!n) return out;
  const toml::array* arr = n->as_array();
  if (!arr) throw ConfigError("key '" + parent.key_path(key) + "' must be an array of tables" + where(*n));
  for (const toml::node& e : *arr) {
    const toml::table* t = e.as_table();
    if (!t) throw ConfigError("key '" + parent.key_path(key) + "' must hold tables" + where(e));
    out.push_back(t);
  }
  return out;
}

constexpr double kUs = 1e3;
constexpr double kMs = 1e6;

void read_fabric(Section& s, ScenarioConfig& c) {
  FabricSpec& f = c.fabric;
  f.pods = s.integer<std::uint32_t>("pods", f.pods, 1);
  f.tors = s.integer<std::uint32_t>("tors", f.tors, 1);
  f.spines = s.integer<std::uint32_t>("spines", f.spines, 1);
  f.cores = s.integer<std::uint32_t>("cores", f.cores, 0);
  f.hosts_per_tor = s.integer<std::uint32_t>("hosts_per_tor", f.hosts_per_tor, 1);
  const double gbps = s.real("link_gbps", static_cast<double>(f.link_rate_bps) / 1e9);
  if (!(gbps > 0.0)) throw ConfigError("key 'fabric.link_gbps' must be > 0");
  f.link_rate_bps = static_cast<std::uint64_t>(std::llround(gbps * 1e9));
  f.link_latency = s.time("link_latency_us", f.link_latency, kUs);
  f.oversubscription = s.real("oversubscription", f.oversubscription);
  if (!(f.oversubscription >= 1.0)) throw ConfigError("key 'fabric.oversubscription' must be >= 1");
  f.routing = s.choice("routing", f.routing, {{"ecmp", RoutingMode::ecmp}, {"balanced", RoutingMode::balanced}});
  f.scheduling =
      s.choice("scheduling", f.scheduling, {{"fifo", Scheduling::fifo}, {"pq", Scheduling::strict_priority}});
  f.queue_capacity_bytes = s.integer<std::uint64_t>("queue_capacity_kb", f.queue_capacity_bytes / 1024, 1) * 1024;
  c.placement =
      s.choice("placement", c.placement, {{"round_robin", Placement::round_robin}, {"linear", Placement::linear}});
}

void read_red(Section& s, RedParams& r) {
  r.k_min_bytes = s.integer<std::uint64_t>("k_min_kb", r.k_min_bytes / 1024, 0) * 1024;
  r.k_max_bytes = s.integer<std::uint64_t>("k_max_kb", r.k_max_bytes / 1024, 0) * 1024;
  r.p_max = s.real("p_max", r.p_max);
}

void read_cc(Section& s, DcqcnParams& p) {
  p.g = s.real("g", p.g);
  p.cnp_interval = s.time("cnp_interval_us", p.cnp_interval, kUs);
  p.alpha_period = s.time("alpha_period_us", p.alpha_period, kUs);
  p.rate_timer = s.time("rate_timer_us", p.rate_timer, kUs);
  p.fast_recovery_steps = s.integer<std::uint32_t>("fast_recovery_steps", p.fast_recovery_steps, 0);
  p.r_ai_bps = s.real("r_ai_mbps", p.r_ai_bps / 1e6) * 1e6;
  p.r_min_bps = s.real("r_min_mbps", p.r_min_bps / 1e6) * 1e6;
  p.alpha_init = s.real("alpha_init", p.alpha_init);
  p.byte_counter_bytes = s.integer<std::uint64_t>("byte_counter_kb", p.byte_counter_bytes / 1024, 0) * 1024;
  p.retransmit_timeout = s.time("retransmit_timeout_us", p.retransmit_timeout, kUs);
}

void read_symphony(Section& s, SymphonySettings& y) {
  y.enabled = s.boolean("enabled", y.enabled);
  y.params.k = s.real("k", y.params.k);
  const double tau = s.real("tau", y.params.tau.value());
  try {
    y.params.tau = symphony::DyadicRatio::from_double(tau);
  } catch (const std::invalid_argument&) {
    throw ConfigError("key 'symphony.tau' must be a dyadic fraction such as 0.25 or 0.375");
  }
  y.params.t_win = s.time("t_win_us", y.params.t_win, kUs);
  y.params.n_warmup = s.integer<std::uint32_t>("n_warmup", y.params.n_warmup, 0);
  y.params.n_sample = s.integer<std::uint32_t>("n_sample", y.params.n_sample, 0);
  y.params.hw_mode = s.choice("hw_mode", y.params.hw_mode,
                              {{"exact", symphony::HwMode::exact}, {"table", symphony::HwMode::table_approx}});
  y.activation_time = s.time("activation_ms", y.activation_time, kMs);
  y.deactivate_at = s.time("deactivate_ms", y.deactivate_at, kMs, true);
  y.placement = s.choice("placement", y.placement,
                         {{"all", SymphonyPlacement::all_switches}, {"tor", SymphonyPlacement::tor_only}});
  y.scope = s.choice("scope", y.scope, {{"switch", SymphonyScope::per_switch}, {"port", SymphonyScope::per_port}});
}

JobConfig read_job(Section& s, std::uint32_t index) {
  JobConfig j;
  j.id = s.integer<JobId>("id", index, 0, kNonCollectiveJob - 1);
  j.kind = s.choice("kind", j.kind, {{"multi_1d", JobKind::multi_1d}, {"2d", JobKind::ring_2d}});
  j.rank_offset = s.integer<std::uint32_t>("rank_offset", j.rank_offset, 0);
  j.rank_count = s.integer<std::uint32_t>("rank_count", j.rank_count, 0);
  j.hosts = s.int_array<HostId>("hosts", j.hosts);
  j.rings = s.integer<std::uint32_t>("rings", j.rings, 1);
  j.dim_a = s.integer<std::uint32_t>("dim_a", j.dim_a, 0);
  j.dim_b = s.integer<std::uint32_t>("dim_b", j.dim_b, 0);
  j.chunk_bytes = s.integer<std::uint64_t>("chunk_bytes", j.chunk_bytes, 1);
  j.passes = s.integer<std::uint32_t>("passes", j.passes, 1);
  j.start = s.time("start_ms", j.start, kMs);
  j.compute_gap = s.time("compute_gap_us", j.compute_gap, kUs);
  return j;
}

JobStreamSpec read_stream(Section& s) {
  JobStreamSpec st;
  st.job_count = s.integer<std::uint32_t>("job_count", st.job_count, 1);
  st.mean_interarrival = s.time("mean_interarrival_ms", st.mean_interarrival, kMs);
  st.first_arrival = s.time("first_arrival_ms", st.first_arrival, kMs);
  for (double ms : s.real_array("arrivals_ms", {})) {
    if (!(ms >= 0.0)) throw ConfigError("key 'stream.arrivals_ms' must hold values >= 0");
    st.fixed_arrivals.push_back(nanoseconds(std::llround(ms * kMs)));
  }
  st.scales = s.int_array<std::uint32_t>("scales", st.scales);
  st.collective_bytes = s.int_array<std::uint64_t>("sizes_bytes", st.collective_bytes);
  st.passes_min = s.integer<std::uint32_t>("passes_min", st.passes_min, 1);
  st.passes_max = s.integer<std::uint32_t>("passes_max", st.passes_max, 1);
  st.max_concurrency = s.integer<std::uint32_t>("max_concurrency", st.max_concurrency, 1);
  try {
    st.validate();
  } catch (const WorkloadError& e) {
    throw ConfigError(e.what());
  }
  return st;
}

// --- serialization ----------------------------------------------------------

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  std::string s = buf;
  // Keep floats recognizable as floats.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

std::string time_in(SimTime t, double unit_ns) {
  if (t == kNever) return "-1.0";
  return num(static_cast<double>(t.ns) / unit_ns);
}

template <typename T>
std::string int_list(const std::vector<T>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
  return out + "]";
}

std::string string_list(const std::vector<std::string>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + quoted(v[i]);
  return out + "]";
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text, std::string_view source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    const auto& b = e.source().begin;
    throw ConfigError(std::string(source) + ":" + std::to_string(b.line) + ":" + std::to_string(b.column) + ": " +
                      std::string(e.description()));
  }

  ScenarioConfig c;
  Section top(root, "");
  c.name = top.string("name", c.name);
  c.seeds = top.int_array<std::uint64_t>("seeds", c.seeds);
  if (c.seeds.empty()) throw ConfigError("key 'seeds' must list at least one seed");
  c.t_end = top.time("t_end_ms", c.t_end, kMs);
  if (c.t_end.ns <= 0) throw ConfigError("key 't_end_ms' must be > 0");

  if (const toml::table* t = subtable(top, "fabric")) {
    Section s(*t, "fabric");
    read_fabric(s, c);
    s.finish();
  }
  if (const toml::table* t = subtable(top, "red")) {
    Section s(*t, "red");
    read_red(s, c.red);
    s.finish();
  }
  if (const toml::table* t = subtable(top, "cc")) {
    Section s(*t, "cc");
    read_cc(s, c.cc);
    s.finish();
  }
  if (const toml::table* t = subtable(top, "symphony")) {
    Section s(*t, "symphony");
    read_symphony(s, c.symphony);
    s.finish();
  }
  if (const toml::table* t = subtable(top, "workload")) {
    Section s(*t, "workload");
    c.max_concurrency = s.integer<std::uint32_t>("max_concurrency", c.max_concurrency, 0);
    c.lane_window = s.integer<std::uint32_t>("lane_window", c.lane_window, 0);
    c.qp_per_message = s.boolean("qp_per_message", c.qp_per_message);
    s.finish();
  }
  const auto jobs = table_array(top, "jobs");
  for (std::uint32_t i = 0; i < jobs.size(); ++i) {
    Section s(*jobs[i], "jobs[" + std::to_string(i) + "]");
    c.jobs.push_back(read_job(s, i));
    s.finish();
  }
  if (const toml::table* t = subtable(top, "stream")) {
    Section s(*t, "stream");
    c.stream = read_stream(s);
    s.finish();
  }

  if (const toml::table* t = subtable(top, "imbalance")) {
    Section s(*t, "imbalance");
    c.imbalance.ratio = s.real("ratio", c.imbalance.ratio);
    c.imbalance.from = s.string("from", c.imbalance.from);
    c.imbalance.to = s.string("to", c.imbalance.to);
    s.finish();
    if (!(c.imbalance.ratio >= 1.0)) throw ConfigError("key 'imbalance.ratio' must be >= 1");
  }
  const auto perts = table_array(top, "perturbations");
  for (std::uint32_t i = 0; i < perts.size(); ++i) {
    Section s(*perts[i], "perturbations[" + std::to_string(i) + "]");
    PerturbationSpec p;
    p.from = s.string("from", "");
    p.to = s.string("to", "");
    p.multiplier = s.real("multiplier", p.multiplier);
    p.start = s.time("start_ms", p.start, kMs);
    p.end = s.time("end_ms", p.end, kMs, true);
    s.finish();
    if (p.from.empty() || p.to.empty()) throw ConfigError("perturbations[" + std::to_string(i) + "] needs 'from' and 'to'");
    c.perturbations.push_back(p);
  }
  const auto bgs = table_array(top, "background");
  for (std::uint32_t i = 0; i < bgs.size(); ++i) {
    Section s(*bgs[i], "background[" + std::to_string(i) + "]");
    BackgroundSpec b;
    b.src = s.integer<HostId>("src", b.src, 0);
    b.dst = s.integer<HostId>("dst", b.dst, 0);
    b.rate_fraction = s.real("rate_fraction", b.rate_fraction);
    b.mean_on = s.time("mean_on_us", b.mean_on, kUs);
    b.mean_off = s.time("mean_off_us", b.mean_off, kUs);
    b.start = s.time("start_ms", b.start, kMs);
    b.end = s.time("end_ms", b.end, kMs, true);
    s.finish();
    c.background.push_back(b);
  }
  const auto faults = table_array(top, "faults");
  for (std::uint32_t i = 0; i < faults.size(); ++i) {
    Section s(*faults[i], "faults[" + std::to_string(i) + "]");
    FaultRule f;
    f.at = s.string("at", "");
    f.job_id = s.integer<JobId>("job", f.job_id, 0);
    f.step = s.integer<std::uint32_t>("step", f.step, 0);
    f.last_only = s.boolean("last_only", f.last_only);
    f.count = s.integer<std::uint32_t>("count", f.count, 1);
    s.finish();
    if (f.at.empty()) throw ConfigError("faults[" + std::to_string(i) + "] needs 'at'");
    c.faults.push_back(f);
  }
  if (const toml::table* t = subtable(top, "output")) {
    Section s(*t, "output");
    c.sample_interval = s.time("sample_interval_us", c.sample_interval, kUs);
    c.bin_width = s.time("bin_width_us", c.bin_width, kUs);
    c.record_decisions = s.boolean("decisions", c.record_decisions);
    c.decision_switches = s.string_array("decision_switches", c.decision_switches);
    s.finish();
    if (c.sample_interval.ns <= 0) throw ConfigError("key 'output.sample_interval_us' must be > 0");
    if (c.bin_width.ns <= 0) throw ConfigError("key 'output.bin_width_us' must be > 0");
  }
  top.finish();

  if (c.jobs.empty() && !c.stream) throw ConfigError("scenario needs [[jobs]] entries or a [stream] table");
  if (!c.jobs.empty() && c.stream) throw ConfigError("use either [[jobs]] or [stream], not both");
  std::set<JobId> ids;
  for (const JobConfig& j : c.jobs) {
    if (!ids.insert(j.id).second) throw ConfigError("duplicate job id " + std::to_string(j.id) + " in [[jobs]]");
  }

  try {
    c.red.validate();
    c.cc.validate();
    c.symphony.params.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.string());
}

std::string serialize_scenario(const ScenarioConfig& c) {
  std::ostringstream o;
  const FabricSpec& f = c.fabric;
  o << "name = " << quoted(c.name) << "\n";
  o << "seeds = " << int_list(c.seeds) << "\n";
  o << "t_end_ms = " << time_in(c.t_end, kMs) << "\n\n";

  o << "[fabric]\n";
  o << "pods = " << f.pods << "\n";
  o << "tors = " << f.tors << "\n";
  o << "spines = " << f.spines << "\n";
  o << "cores = " << f.cores << "\n";
  o << "hosts_per_tor = " << f.hosts_per_tor << "\n";
  o << "link_gbps = " << num(static_cast<double>(f.link_rate_bps) / 1e9) << "\n";
  o << "link_latency_us = " << time_in(f.link_latency, kUs) << "\n";
  o << "oversubscription = " << num(f.oversubscription) << "\n";
  o << "routing = " << quoted(f.routing == RoutingMode::ecmp ? "ecmp" : "balanced") << "\n";
  o << "scheduling = " << quoted(f.scheduling == Scheduling::fifo ? "fifo" : "pq") << "\n";
  o << "queue_capacity_kb = " << f.queue_capacity_bytes / 1024 << "\n";
  o << "placement = " << quoted(c.placement == Placement::round_robin ? "round_robin" : "linear") << "\n\n";

  o << "[red]\n";
  o << "k_min_kb = " << c.red.k_min_bytes / 1024 << "\n";
  o << "k_max_kb = " << c.red.k_max_bytes / 1024 << "\n";
  o << "p_max = " << num(c.red.p_max) << "\n\n";

  o << "[cc]\n";
  o << "g = " << num(c.cc.g) << "\n";
  o << "cnp_interval_us = " << time_in(c.cc.cnp_interval, kUs) << "\n";
  o << "alpha_period_us = " << time_in(c.cc.alpha_period, kUs) << "\n";
  o << "rate_timer_us = " << time_in(c.cc.rate_timer, kUs) << "\n";
  o << "fast_recovery_steps = " << c.cc.fast_recovery_steps << "\n";
  o << "r_ai_mbps = " << num(c.cc.r_ai_bps / 1e6) << "\n";
  o << "r_min_mbps = " << num(c.cc.r_min_bps / 1e6) << "\n";
  o << "alpha_init = " << num(c.cc.alpha_init) << "\n";
  o << "byte_counter_kb = " << c.cc.byte_counter_bytes / 1024 << "\n";
  o << "retransmit_timeout_us = " << time_in(c.cc.retransmit_timeout, kUs) << "\n\n";

  const SymphonySettings& y = c.symphony;
  o << "[symphony]\n";
  o << "enabled = " << (y.enabled ? "true" : "false") << "\n";
  o << "k = " << num(y.params.k) << "\n";
  o << "tau = " << num(y.params.tau.value()) << "\n";
  o << "t_win_us = " << time_in(y.params.t_win, kUs) << "\n";
  o << "n_warmup = " << y.params.n_warmup << "\n";
  o << "n_sample = " << y.params.n_sample << "\n";
  o << "hw_mode = " << quoted(y.params.hw_mode == symphony::HwMode::exact ? "exact" : "table") << "\n";
  o << "activation_ms = " << time_in(y.activation_time, kMs) << "\n";
  o << "deactivate_ms = " << time_in(y.deactivate_at, kMs) << "\n";
  o << "placement = " << quoted(y.placement == SymphonyPlacement::all_switches ? "all" : "tor") << "\n";
  o << "scope = " << quoted(y.scope == SymphonyScope::per_switch ? "switch" : "port") << "\n\n";

  o << "[workload]\n";
  o << "max_concurrency = " << c.max_concurrency << "\n";
  o << "lane_window = " << c.lane_window << "\n";
  o << "qp_per_message = " << (c.qp_per_message ? "true" : "false") << "\n\n";

  for (const JobConfig& j : c.jobs) {
    o << "[[jobs]]\n";
    o << "id = " << j.id << "\n";
    o << "kind = " << quoted(j.kind == JobKind::multi_1d ? "multi_1d" : "2d") << "\n";
    o << "rank_offset = " << j.rank_offset << "\n";
    o << "rank_count = " << j.rank_count << "\n";
    o << "hosts = " << int_list(j.hosts) << "\n";
    o << "rings = " << j.rings << "\n";
    o << "dim_a = " << j.dim_a << "\n";
    o << "dim_b = " << j.dim_b << "\n";
    o << "chunk_bytes = " << j.chunk_bytes << "\n";
    o << "passes = " << j.passes << "\n";
    o << "start_ms = " << time_in(j.start, kMs) << "\n";
    o << "compute_gap_us = " << time_in(j.compute_gap, kUs) << "\n\n";
  }
  if (c.stream) {
    const JobStreamSpec& s = *c.stream;
    o << "[stream]\n";
    o << "job_count = " << s.job_count << "\n";
    o << "mean_interarrival_ms = " << time_in(s.mean_interarrival, kMs) << "\n";
    o << "first_arrival_ms = " << time_in(s.first_arrival, kMs) << "\n";
    o << "arrivals_ms = [";
    for (std::size_t i = 0; i < s.fixed_arrivals.size(); ++i) o << (i ? ", " : "") << time_in(s.fixed_arrivals[i], kMs);
    o << "]\n";
    o << "scales = " << int_list(s.scales) << "\n";
    o << "sizes_bytes = " << int_list(s.collective_bytes) << "\n";
    o << "passes_min = " << s.passes_min << "\n";
    o << "passes_max = " << s.passes_max << "\n";
    o << "max_concurrency = " << s.max_concurrency << "\n\n";
  }

  o << "[imbalance]\n";
  o << "ratio = " << num(c.imbalance.ratio) << "\n";
  o << "from = " << quoted(c.imbalance.from) << "\n";
  o << "to = " << quoted(c.imbalance.to) << "\n\n";

  for (const PerturbationSpec& p : c.perturbations) {
    o << "[[perturbations]]\n";
    o << "from = " << quoted(p.from) << "\n";
    o << "to = " << quoted(p.to) << "\n";
    o << "multiplier = " << num(p.multiplier) << "\n";
    o << "start_ms = " << time_in(p.start, kMs) << "\n";
    o << "end_ms = " << time_in(p.end, kMs) << "\n\n";
  }
  for (const BackgroundSpec& b : c.background) {
    o << "[[background]]\n";
    o << "src = " << b.src << "\n";
    o << "dst = " << b.dst << "\n";
    o << "rate_fraction = " << num(b.rate_fraction) << "\n";
    o << "mean_on_us = " << time_in(b.mean_on, kUs) << "\n";
    o << "mean_off_us = " << time_in(b.mean_off, kUs) << "\n";
    o << "start_ms = " << time_in(b.start, kMs) << "\n";
    o << "end_ms = " << time_in(b.end, kMs) << "\n\n";
  }
  for (const FaultRule& r : c.faults) {
    o << "[[faults]]\n";
    o << "at = " << quoted(r.at) << "\n";
    o << "job = " << r.job_id << "\n";
    o << "step = " << r.step << "\n";
    o << "last_only = " << (r.last_only ? "true" : "false") << "\n";
    o << "count = " << r.count << "\n\n";
  }

  o << "[output]\n";
  o << "sample_interval_us = " << time_in(c.sample_interval, kUs) << "\n";
  o << "bin_width_us = " << time_in(c.bin_width, kUs) << "\n";
  o << "decisions = " << (c.record_decisions ? "true" : "false") << "\n";
  o << "decision_switches = " << string_list(c.decision_switches) << "\n";
  return o.str();
}

std::string config_hash(const ScenarioConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a(serialize_scenario(cfg)));
  return buf;
}

std::vector<HostId> rank_placement(const ScenarioConfig& cfg) {
  if (cfg.placement == Placement::round_robin) return round_robin_placement(cfg.fabric);
  std::vector<HostId> out(cfg.fabric.host_count());
  for (HostId h = 0; h < out.size(); ++h) out[h] = h;
  return out;
}

std::vector<JobSpec> build_jobs(const ScenarioConfig& cfg, std::uint64_t seed) {
  const std::vector<HostId> ranks = rank_placement(cfg);
  std::vector<JobSpec> jobs;
  if (cfg.stream) {
    JobStreamSpec s = *cfg.stream;
    s.seed = seed;
    return generate_job_stream(s, ranks, cfg.fabric.link_rate_bps);
  }
  for (const JobConfig& jc : cfg.jobs) {
    const std::string who = "job " + std::to_string(jc.id);
    std::vector<HostId> hosts = jc.hosts;
    if (hosts.empty()) {
      if (jc.rank_offset >= ranks.size()) throw ConfigError(who + ": rank_offset beyond the cluster");
      const std::size_t left = ranks.size() - jc.rank_offset;
      const std::size_t count = jc.rank_count == 0 ? left : jc.rank_count;
      if (count > left) throw ConfigError(who + ": rank_offset + rank_count exceeds the cluster");
      hosts.assign(ranks.begin() + jc.rank_offset, ranks.begin() + static_cast<std::ptrdiff_t>(jc.rank_offset + count));
    }
    JobSpec job;
    try {
      if (jc.kind == JobKind::multi_1d) {
        job = generate_multi_1d_rings(hosts, jc.rings, jc.chunk_bytes, jc.passes);
      } else {
        job = generate_2d_ring(hosts, jc.dim_a, jc.dim_b, jc.chunk_bytes, jc.passes);
      }
    } catch (const WorkloadError& e) {
      throw ConfigError(who + ": " + e.what());
    }
    job.job_id = jc.id;
    job.start_at = jc.start;
    job.compute_gap = jc.compute_gap;
    jobs.push_back(std::move(job));
  }
  return jobs;
}

SimulationConfig to_simulation_config(const ScenarioConfig& cfg, std::uint64_t seed) {
  SimulationConfig s;
  s.seed = seed;
  s.fabric = cfg.fabric;
  s.red = cfg.red;
  s.cc = cfg.cc;
  s.symphony = cfg.symphony;
  s.jobs = build_jobs(cfg, seed);
  s.max_concurrency = cfg.stream ? cfg.stream->max_concurrency : cfg.max_concurrency;
  s.lane_window = cfg.lane_window;
  s.qp_per_message = cfg.qp_per_message;
  s.perturbations = cfg.perturbations;
  if (cfg.imbalance.ratio > 1.0) {
    s.perturbations.push_back(PerturbationSpec{cfg.imbalance.from, cfg.imbalance.to, 1.0 / cfg.imbalance.ratio, {}, kNever});
  }
  s.background = cfg.background;
  s.faults = cfg.faults;
  s.t_end = cfg.t_end;
  s.sample_interval = cfg.sample_interval;
  s.bin_width = cfg.bin_width;
  s.record_decisions = cfg.record_decisions;
  s.decision_switches = cfg.decision_switches;
  return s;
}

const std::vector<std::string>& sweep_parameters() {
  static const std::vector<std::string> names{"k", "chunk_bytes", "imbalance_ratio", "t_win", "n_warmup"};
  return names;
}

void apply_sweep(ScenarioConfig& cfg, std::string_view param, double value) {
  const std::string v = num(value);
  if (param == "k") {
    if (!(value >= 0.0)) throw ConfigError("k must be >= 0, got " + v);
    cfg.symphony.params.k = value;
  } else if (param == "chunk_bytes") {
    if (!(value >= 1.0) || value != std::floor(value)) throw ConfigError("chunk_bytes must be a positive integer, got " + v);
    for (JobConfig& j : cfg.jobs) j.chunk_bytes = static_cast<std::uint64_t>(value);
    if (cfg.stream) {
      for (auto& b : cfg.stream->collective_bytes) b = static_cast<std::uint64_t>(value);
    }
  } else if (param == "imbalance_ratio") {
    if (!(value >= 1.0)) throw ConfigError("imbalance_ratio must be >= 1, got " + v);
    cfg.imbalance.ratio = value;
  } else if (param == "t_win") {
    if (!(value > 0.0)) throw ConfigError("t_win (microseconds) must be > 0, got " + v);
    cfg.symphony.params.t_win = nanoseconds(std::llround(value * kUs));
  } else if (param == "n_warmup") {
    if (!(value >= 0.0) || value != std::floor(value)) throw ConfigError("n_warmup must be a non-negative integer, got " + v);
    cfg.symphony.params.n_warmup = static_cast<std::uint32_t>(value);
  } else {
    std::string names;
    for (const auto& n : sweep_parameters()) names += (names.empty() ? "" : ", ") + n;
    throw ConfigError("unknown sweep parameter '" + std::string(param) + "'; valid: " + names);
  }
}

}  // namespace ringsim
