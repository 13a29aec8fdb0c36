#include "ringsim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

namespace ringsim {

namespace {

std::uint64_t hash_step(std::uint64_t h, std::uint64_t v) {
  h ^= v;
  h *= 0x100000001b3ULL;
  return h ^ (h >> 29);
}

}  // namespace

Simulation::Simulation(SimulationConfig cfg) : cfg_(std::move(cfg)), fabric_(Fabric::build(cfg_.fabric)) {
  cfg_.red.validate();
  cfg_.cc.validate();
  cfg_.symphony.params.validate();
  if (cfg_.t_end.ns <= 0) throw std::invalid_argument("run.t_end must be > 0");
  if (cfg_.sample_interval.ns <= 0) throw std::invalid_argument("run.sample_interval must be > 0");
  if (cfg_.bin_width.ns <= 0) throw std::invalid_argument("run.bin_width must be > 0");
  if (cfg_.jobs.empty()) throw std::invalid_argument("scenario defines no jobs");

  const Rng root(cfg_.seed);
  red_rng_ = root.substream("red");
  symphony_rng_ = root.substream("symphony");
  bg_rng_ = root.substream("background");
  ecmp_salt_ = root.substream("ecmp").next_u64();
  tel_.seed = cfg_.seed;

  // Perturbations, grouped by port.
  ports_.resize(fabric_.links().size());
  std::vector<std::vector<Perturb>> per_port(ports_.size());
  for (const PerturbationSpec& p : cfg_.perturbations) {
    const auto from = fabric_.find_node(p.from);
    const auto to = fabric_.find_node(p.to);
    if (!from || !to) throw std::invalid_argument("perturbation: unknown node in " + p.from + "->" + p.to);
    const auto port = fabric_.find_link(*from, *to);
    if (!port) throw std::invalid_argument("perturbation: no link " + p.from + "->" + p.to);
    if (!(p.multiplier > 0.0 && p.multiplier <= 1.0)) {
      throw std::invalid_argument("perturbation multiplier must lie in (0, 1]");
    }
    const SimTime end = p.end == kNever ? nanoseconds(std::numeric_limits<std::int64_t>::max()) : p.end;
    if (end < p.start) throw std::invalid_argument("perturbation window ends before it starts");
    per_port[*port].push_back(Perturb{p.multiplier, p.start, end});
  }
  for (PortId p = 0; p < ports_.size(); ++p) {
    ports_[p].perturb_begin = static_cast<std::uint32_t>(perturb_.size());
    perturb_.insert(perturb_.end(), per_port[p].begin(), per_port[p].end());
    ports_[p].perturb_end = static_cast<std::uint32_t>(perturb_.size());
  }

  hosts_.resize(fabric_.host_count());
  const double link_rate = static_cast<double>(cfg_.fabric.link_rate_bps);

  // Jobs, lanes and flows.
  std::map<std::tuple<std::uint32_t, RingId, HostId>, std::uint32_t> lane_of;
  std::vector<PortId> path;
  for (std::uint32_t j = 0; j < cfg_.jobs.size(); ++j) {
    const JobSpec& spec = cfg_.jobs[j];
    for (const JobRt& other : jobs_) {
      if (other.spec.job_id == spec.job_id) throw std::invalid_argument("duplicate job id " + std::to_string(spec.job_id));
    }
    if (spec.job_id == kNonCollectiveJob) throw std::invalid_argument("job id is reserved");
    for (HostId h : spec.hosts) {
      if (h >= fabric_.host_count()) throw std::invalid_argument("job host " + std::to_string(h) + " outside the fabric");
    }
    if (spec.passes == 0 || spec.chunk_bytes == 0 || spec.phases.empty()) {
      throw std::invalid_argument("job " + std::to_string(spec.job_id) + " is empty");
    }
    JobRt jr;
    jr.spec = spec;
    jr.flow_begin = static_cast<std::uint32_t>(flows_.size());
    std::vector<FlowSpec> specs = expand_flows(spec, jr.flow_begin);
    jr.flow_end = jr.flow_begin + static_cast<std::uint32_t>(specs.size());
    jr.inflight.assign(spec.total_steps(), 0);
    jr.step_left.assign(spec.total_steps(), 0);
    jr.flows_left = static_cast<std::uint32_t>(specs.size());

    JobTelemetry jt;
    jt.job_id = spec.job_id;
    jt.passes = spec.passes;
    jt.steps_per_pass = spec.steps_per_pass();
    jt.max_ring_size = spec.max_ring_size();
    jt.chunk_bytes = spec.chunk_bytes;
    jt.theoretical_jct = theoretical_jct(spec, cfg_.fabric.link_rate_bps);
    jt.step_complete.assign(spec.total_steps(), kNever);
    jt.bin_width = cfg_.bin_width;

    for (const FlowSpec& fs : specs) {
      if (fs.id != flows_.size()) throw std::logic_error("flow ids are not dense");
      FlowRt f;
      f.job = j;
      f.step = fs.step;
      f.ring = fs.ring_id;
      f.src = fs.src;
      f.dst = fs.dst;
      f.bytes = fs.bytes;
      f.n_packets = packet_count(fs.bytes);
      f.pending_deps = static_cast<std::uint32_t>(fs.depends_on.size());
      for (FlowId d : fs.depends_on) flows_[d].dependents.push_back(fs.id);

      const auto key = std::make_tuple(j, fs.ring_id, fs.src);
      auto it = lane_of.find(key);
      const bool new_lane = it == lane_of.end();
      if (new_lane) {
        Lane lane;
        lane.job = j;
        lane.src = fs.src;
        it = lane_of.emplace(key, static_cast<std::uint32_t>(lanes_.size())).first;
        lanes_.push_back(std::move(lane));
      }
      f.lane = it->second;
      if (cfg_.qp_per_message || new_lane) {
        Qp qp;
        qp.rate = initial_rate_state(link_rate, cfg_.cc);
        const std::uint64_t h = cfg_.qp_per_message
                                    ? Rng::mix(0x9e37ULL ^ (static_cast<std::uint64_t>(spec.job_id) << 32) ^ fs.id)
                                    : Rng::mix((static_cast<std::uint64_t>(spec.job_id) << 40) ^
                                               (static_cast<std::uint64_t>(fs.ring_id) << 20) ^ fs.src);
        qp.src_port = static_cast<std::uint16_t>(49152 + h % 16384);
        f.qp = static_cast<std::uint32_t>(qps_.size());
        lanes_[f.lane].qp = f.qp;
        qps_.push_back(qp);
      } else {
        f.qp = lanes_[f.lane].qp;
      }

      const std::uint32_t paths = fabric_.path_count(fs.src, fs.dst);
      std::uint32_t choice = 0;
      if (cfg_.fabric.routing == RoutingMode::ecmp) {
        const FiveTuple tuple{fs.src, fs.dst, qps_[f.qp].src_port, 4791, 17};
        choice = ecmp_select(tuple, paths, ecmp_salt_);
      } else {
        choice = (fs.src % cfg_.fabric.hosts_per_tor) % paths;
      }
      fabric_.route(fs.src, fs.dst, choice, path);
      f.hops = static_cast<std::uint8_t>(path.size());
      std::copy(path.begin(), path.end(), f.route.begin());

      ++jr.step_left[fs.step];
      jt.flows.push_back(FlowRecord{fs.id, fs.pass, fs.step, {}, {}, false, false});
      flows_.push_back(std::move(f));
    }
    jobs_.push_back(std::move(jr));
    tel_.jobs.push_back(std::move(jt));
  }

  // Background sources.
  for (std::uint32_t b = 0; b < cfg_.background.size(); ++b) {
    const BackgroundSpec& s = cfg_.background[b];
    if (s.src >= fabric_.host_count() || s.dst >= fabric_.host_count() || s.src == s.dst) {
      throw std::invalid_argument("background source " + std::to_string(b) + " has invalid hosts");
    }
    if (!(s.rate_fraction > 0.0 && s.rate_fraction <= 1.0)) {
      throw std::invalid_argument("background rate_fraction must lie in (0, 1]");
    }
    if (s.mean_on.ns <= 0 || s.mean_off.ns <= 0) throw std::invalid_argument("background on/off means must be > 0");
    BgRt bg;
    bg.spec = s;
    bg.rate_bps = s.rate_fraction * link_rate;
    const FiveTuple tuple{s.src, s.dst, static_cast<std::uint16_t>(1024 + b), 4791, 17};
    const std::uint32_t choice = ecmp_select(tuple, fabric_.path_count(s.src, s.dst), ecmp_salt_);
    fabric_.route(s.src, s.dst, choice, path);
    bg.hops = static_cast<std::uint8_t>(path.size());
    std::copy(path.begin(), path.end(), bg.route.begin());
    bg_.push_back(bg);
    engine_.schedule(s.start, EventKind::BackgroundToggle, {b, 0, 0});
  }

  // Fault rules.
  for (const FaultRule& r : cfg_.faults) {
    const auto node = fabric_.find_node(r.at);
    if (!node || !fabric_.is_switch(*node)) throw std::invalid_argument("fault: '" + r.at + "' is not a switch");
    faults_.push_back(FaultRt{*node, r, r.count});
  }
  retransmit_ = !faults_.empty();

  // Symphony tables.
  track_node_.assign(fabric_.nodes().size(), 0);
  log_node_.assign(fabric_.nodes().size(), 0);
  for (NodeId n = 0; n < fabric_.nodes().size(); ++n) {
    if (!fabric_.is_switch(n)) continue;
    const bool tor = fabric_.node(n).kind == NodeKind::tor;
    track_node_[n] = cfg_.symphony.placement == SymphonyPlacement::all_switches || tor;
    log_node_[n] = cfg_.record_decisions && cfg_.decision_switches.empty();
  }
  for (const std::string& name : cfg_.decision_switches) {
    const auto node = fabric_.find_node(name);
    if (!node || !fabric_.is_switch(*node)) throw std::invalid_argument("decision log: '" + name + "' is not a switch");
    log_node_[*node] = cfg_.record_decisions;
  }
  tables_.resize(cfg_.symphony.scope == SymphonyScope::per_switch ? fabric_.switch_count() : ports_.size());

  if (cfg_.fabric.scheduling == Scheduling::strict_priority) {
    // The PQ baseline classifies by the tracked step_min from the start.
    activate_symphony();
    marking_ = false;
  }
  if (cfg_.symphony.enabled) {
    engine_.schedule(cfg_.symphony.activation_time, EventKind::SymphonyControl, {1, 0, 0});
    if (cfg_.symphony.deactivate_at != kNever) {
      engine_.schedule(cfg_.symphony.deactivate_at, EventKind::SymphonyControl, {0, 0, 0});
    }
  }
  for (std::uint32_t j = 0; j < jobs_.size(); ++j) {
    engine_.schedule(jobs_[j].spec.start_at, EventKind::JobArrival, {j, 0, 0});
  }
}

bool Simulation::run() {
  const bool done = run_until(cfg_.t_end);
  if (!done) tel_.truncated = true;
  return done;
}

bool Simulation::run_until(SimTime t) {
  if (finished()) return true;
  const SimTime target = std::min(t, cfg_.t_end);
  engine_.run_until(target, [this](const Event& ev) {
    std::uint64_t h = tel_.dispatch_hash;
    h = hash_step(h, static_cast<std::uint64_t>(ev.fire_at.ns));
    h = hash_step(h, static_cast<std::uint64_t>(ev.kind) << 56 ^ (static_cast<std::uint64_t>(ev.payload.a) << 24) ^
                         ev.payload.b);
    tel_.dispatch_hash = hash_step(h, ev.payload.c);
    dispatch(ev);
  });
  tel_.events = engine_.dispatched();
  tel_.end_time = engine_.now();
  return finished();
}

void Simulation::dispatch(const Event& ev) {
  const auto a = ev.payload.a;
  const auto b = ev.payload.b;
  switch (ev.kind) {
    case EventKind::PacketArrival:
      on_arrival(a, b);
      break;
    case EventKind::TransmitComplete:
      on_transmit_complete(a);
      break;
    case EventKind::HostEmit:
      on_host_emit(a, b);
      break;
    case EventKind::CnpDelivery:
      on_cnp(a);
      break;
    case EventKind::RateTimer:
      on_rate_timer(a, b);
      break;
    case EventKind::FlowStart:
      make_ready(a);
      break;
    case EventKind::JobArrival:
      on_job_arrival(a);
      break;
    case EventKind::WindowTick:
      on_window_tick(a);
      break;
    case EventKind::RetransmitTimeout:
      on_retransmit_timeout(a, b);
      break;
    case EventKind::BackgroundToggle:
      on_background_toggle(a, b);
      break;
    case EventKind::SymphonyControl:
      if (a != 0) {
        activate_symphony();
      } else {
        deactivate_symphony();
      }
      break;
    case EventKind::PacketDequeue:
    case EventKind::FaultTrigger:
      throw ContractViolation("event kind is not scheduled by this simulator");
  }
}

std::uint32_t Simulation::alloc_packet() {
  if (free_head_ != kNone) {
    const std::uint32_t h = free_head_;
    free_head_ = pool_[h].next_free;
    pool_[h] = PacketSlot{};
    return h;
  }
  pool_.emplace_back();
  return static_cast<std::uint32_t>(pool_.size() - 1);
}

std::uint64_t Simulation::effective_rate(PortId port) const {
  const PortState& ps = ports_[port];
  const std::uint64_t base = fabric_.link(port).rate_bps;
  if (ps.perturb_begin == ps.perturb_end) return base;
  const SimTime now = engine_.now();
  double mult = 1.0;
  for (std::uint32_t i = ps.perturb_begin; i < ps.perturb_end; ++i) {
    if (perturb_[i].start <= now && now < perturb_[i].end) mult *= perturb_[i].multiplier;
  }
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(static_cast<double>(base) * mult)));
}

void Simulation::overlap_change(std::uint32_t job, std::uint32_t step, int delta) {
  std::uint32_t& n = jobs_[job].inflight[step];
  if (delta > 0) {
    if (n++ == 0) tel_.jobs[job].overlap_log.push_back({engine_.now(), step, 1});
  } else {
    if (--n == 0) tel_.jobs[job].overlap_log.push_back({engine_.now(), step, -1});
  }
}

symphony::JobTable* Simulation::table_for(PortId port) {
  const NodeId node = fabric_.link(port).from;
  if (!track_node_[node]) return nullptr;
  return cfg_.symphony.scope == SymphonyScope::per_switch ? &tables_[fabric_.switch_index(node)] : &tables_[port];
}

// --- switch datapath -------------------------------------------------------

void Simulation::on_arrival(std::uint32_t handle, NodeId node) {
  if (!fabric_.is_switch(node)) {
    deliver(handle);
    return;
  }
  const Packet& pkt = pool_[handle].pkt;
  const PortId port = pkt.job_id == kNonCollectiveJob ? bg_[pkt.flow_id].route[pkt.hop] : flows_[pkt.flow_id].route[pkt.hop];
  enqueue(port, handle);
}

void Simulation::enqueue(PortId port, std::uint32_t handle) {
  PortState& ps = ports_[port];
  Packet& pkt = pool_[handle].pkt;
  const NodeId node = fabric_.link(port).from;

  for (FaultRt& fr : faults_) {
    if (fr.remaining == 0 || fr.at != node || pkt.job_id != fr.rule.job_id || pkt.step != fr.rule.step) continue;
    if (fr.rule.last_only && !pkt.last) continue;
    --fr.remaining;
    ++tel_.packets_dropped;
    tel_.drops.push_back(DropRecord{engine_.now(), node, pkt.flow_id, pkt.job_id, pkt.step, pkt.psn, pkt.last});
    overlap_change(flows_[pkt.flow_id].job, pkt.step, -1);
    free_packet(handle);
    return;
  }

  const double p = red_mark_probability(ps.queue.depth_bytes() + pkt.size, cfg_.red);
  pkt.red_mark = p >= 1.0 || (p > 0.0 && red_rng_.uniform01() < p);

  std::uint8_t prio = PortQueue::kLow;
  if (cfg_.fabric.scheduling == Scheduling::strict_priority && tracking_ && pkt.job_id != kNonCollectiveJob) {
    if (const symphony::JobTable* t = table_for(port)) {
      const symphony::PerJobStateBlock* blk = t->lookup(pkt.job_id);
      if (blk != nullptr && pkt.step <= blk->step_min) prio = PortQueue::kHigh;
    }
  }
  pkt.priority = prio;

  if (!ps.tx_pending && ps.queue.empty() && ps.busy_until <= engine_.now()) {
    transmit(port, handle);
    return;
  }
  ps.queue.push(handle, pkt.size, prio);
  if (!ps.tx_pending) {
    ps.tx_pending = true;
    engine_.schedule(ps.busy_until, EventKind::TransmitComplete, {port, 0, 0});
  }
}

void Simulation::transmit(PortId port, std::uint32_t handle) {
  PortState& ps = ports_[port];
  Packet& pkt = pool_[handle].pkt;
  const Link& link = fabric_.link(port);
  const NodeId node = link.from;
  const SimTime now = engine_.now();
  const bool collective = pkt.job_id != kNonCollectiveJob;

  bool sym = false;
  if (tracking_ && collective && track_node_[node]) {
    symphony::JobTable* table = table_for(port);
    const symphony::MarkDecision d =
        table->process(pkt.job_id, pkt.step, pkt.psn, pkt.last, cfg_.symphony.params, symphony_rng_);
    sym = marking_ && d.mark;
    if (log_node_[node]) {
      if (const symphony::PerJobStateBlock* blk = table->lookup(pkt.job_id)) {
        tel_.decisions.push_back(DecisionRecord{now, node, pkt.job_id, pkt.step, pkt.psn, blk->step_min, blk->psn_rec,
                                                blk->alpha, d.delta, d.probability, sym, pkt.last,
                                                engine_.dispatched()});
      }
    }
  }
  const bool red = pkt.red_mark && fabric_.is_switch(node);
  pkt.red_mark = false;
  if (red || sym) {
    pkt.ecn_ce = true;
    if (collective) {
      JobTelemetry& jt = tel_.jobs[flows_[pkt.flow_id].job];
      jt.red_marks += red;
      jt.symphony_marks += sym;
    }
    pkt.symphony_mark = pkt.symphony_mark || sym;
    if (cfg_.record_marks) tel_.marks.push_back(MarkRecord{now, port, pkt.flow_id, pkt.psn, red, sym});
  }

  const SimTime ser = ps.clock.next(static_cast<std::uint64_t>(pkt.size) * 8, effective_rate(port));
  ps.busy_until = now + ser;
  ++pkt.hop;
  engine_.schedule(ps.busy_until + link.latency, EventKind::PacketArrival, {handle, link.to, 0});
}

void Simulation::on_transmit_complete(PortId port) {
  PortState& ps = ports_[port];
  ps.tx_pending = false;
  if (ps.queue.empty()) return;
  transmit(port, ps.queue.pop());
  if (!ps.queue.empty()) {
    ps.tx_pending = true;
    engine_.schedule(ps.busy_until, EventKind::TransmitComplete, {port, 0, 0});
  }
}

// --- host NIC --------------------------------------------------------------

void Simulation::nic_wake(HostId h, SimTime at) {
  HostRt& host = hosts_[h];
  if (host.emit_scheduled && host.emit_at <= at) return;
  ++host.emit_gen;
  host.emit_scheduled = true;
  host.emit_at = at;
  engine_.schedule(at, EventKind::HostEmit, {h, host.emit_gen, 0});
}

void Simulation::nic_add(HostId h, std::uint32_t entry) {
  hosts_[h].active.push_back(entry);
  const PortId nic = (entry & kBgBit) ? bg_[entry & ~kBgBit].route[0] : flows_[entry].route[0];
  nic_wake(h, std::max(engine_.now(), ports_[nic].busy_until));
}

void Simulation::on_host_emit(HostId h, std::uint32_t gen) {
  HostRt& host = hosts_[h];
  if (gen != host.emit_gen) return;
  host.emit_scheduled = false;
  if (!bg_.empty()) {
    // Background sources that switched off leave the NIC here.
    const auto dead = [this](std::uint32_t e) {
      if (!(e & kBgBit) || bg_[e & ~kBgBit].on) return false;
      bg_[e & ~kBgBit].on_nic = false;
      return true;
    };
    host.active.erase(std::remove_if(host.active.begin(), host.active.end(), dead), host.active.end());
  }
  const std::size_t n = host.active.size();
  if (n == 0) return;
  if (host.rr >= n) host.rr = 0;
  const std::uint32_t front = host.active.front();
  const PortId nic = (front & kBgBit) ? bg_[front & ~kBgBit].route[0] : flows_[front].route[0];
  const SimTime now = engine_.now();
  if (ports_[nic].busy_until > now) {
    nic_wake(h, ports_[nic].busy_until);
    return;
  }

  const double now_ns = static_cast<double>(now.ns);
  double earliest = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t idx = (host.rr + i) % n;
    const std::uint32_t entry = host.active[idx];
    const double next = (entry & kBgBit) ? bg_[entry & ~kBgBit].next_send_ns : qps_[flows_[entry].qp].next_send_ns;
    if (next <= now_ns) {
      host.rr = idx + 1;
      emit_packet(h, entry);
      if (!host.active.empty()) nic_wake(h, ports_[nic].busy_until);
      return;
    }
    earliest = i == 0 ? next : std::min(earliest, next);
  }
  nic_wake(h, nanoseconds(static_cast<std::int64_t>(std::ceil(earliest))));
}

void Simulation::emit_packet(HostId h, std::uint32_t entry) {
  const std::uint32_t handle = alloc_packet();
  Packet& pkt = pool_[handle].pkt;
  const SimTime now = engine_.now();
  const double now_ns = static_cast<double>(now.ns);
  HostRt& host = hosts_[h];

  PortId nic = 0;
  if (entry & kBgBit) {
    BgRt& bg = bg_[entry & ~kBgBit];
    pkt.job_id = kNonCollectiveJob;
    pkt.flow_id = entry & ~kBgBit;
    pkt.size = kMtuBytes;
    bg.next_send_ns = std::max(bg.next_send_ns, now_ns) + pkt.size * 8e9 / bg.rate_bps;
    nic = bg.route[0];
  } else {
    FlowRt& f = flows_[entry];
    Lane& lane = lanes_[f.lane];
    JobTelemetry& jt = tel_.jobs[f.job];
    pkt.job_id = jobs_[f.job].spec.job_id;
    pkt.flow_id = entry;
    pkt.ring_id = f.ring;
    pkt.step = f.step;
    pkt.psn = f.next_psn++;
    pkt.size = packet_size(f.bytes, pkt.psn);
    pkt.last = pkt.psn == f.n_packets;
    if (pkt.psn <= f.high_psn) {
      ++jt.retransmitted_packets;
    } else {
      f.high_psn = pkt.psn;
    }
    Qp& qp = qps_[f.qp];
    qp.next_send_ns = std::max(qp.next_send_ns, now_ns) + pkt.size * 8e9 / qp.rate.current_rate;
    if (count_sent_bytes(qp.rate, pkt.size, cfg_.cc)) {
      rate_increase_tick(qp.rate, static_cast<double>(cfg_.fabric.link_rate_bps), cfg_.cc);
    }
    overlap_change(f.job, f.step, +1);
    nic = f.route[0];

    if (f.next_psn > f.n_packets) {
      // Message fully posted: leave the NIC, free the lane slot once.
      f.on_nic = false;
      const auto pos = std::find(host.active.begin(), host.active.end(), entry) - host.active.begin();
      host.active.erase(host.active.begin() + pos);
      if (static_cast<std::size_t>(pos) < host.rr) --host.rr;
      if (!f.posted) {
        f.posted = true;
        --lane.active;
        lane_pump(f.lane);
      }
      if (retransmit_ && !f.done) {
        ++f.rto_gen;
        engine_.schedule(now + cfg_.cc.retransmit_timeout, EventKind::RetransmitTimeout, {entry, f.rto_gen, 0});
      }
    }
  }
  ++tel_.packets_injected;
  transmit(nic, handle);
}

void Simulation::make_ready(std::uint32_t f) {
  const std::uint32_t l = flows_[f].lane;
  lanes_[l].ready.push_back(f);
  lane_pump(l);
}

void Simulation::lane_pump(std::uint32_t l) {
  Lane& lane = lanes_[l];
  while ((cfg_.lane_window == 0 || lane.active < cfg_.lane_window) && !lane.ready.empty()) {
    const std::uint32_t f = lane.ready.front();
    lane.ready.pop_front();
    ++lane.active;
    FlowRt& fr = flows_[f];
    FlowRecord& rec = tel_.jobs[fr.job].flows[f - jobs_[fr.job].flow_begin];
    rec.started = true;
    rec.start = engine_.now();
    fr.on_nic = true;
    nic_add(fr.src, f);
  }
}

// --- receiver / congestion control ----------------------------------------

void Simulation::deliver(std::uint32_t handle) {
  const Packet pkt = pool_[handle].pkt;
  free_packet(handle);
  ++tel_.packets_delivered;
  if (pkt.job_id == kNonCollectiveJob) return;

  FlowRt& f = flows_[pkt.flow_id];
  JobTelemetry& jt = tel_.jobs[f.job];
  overlap_change(f.job, f.step, -1);
  ++jt.packets_delivered;
  const auto bin = static_cast<std::size_t>(engine_.now().ns / cfg_.bin_width.ns);
  if (jt.delivered_bytes_bins.size() <= bin) jt.delivered_bytes_bins.resize(bin + 1, 0);
  jt.delivered_bytes_bins[bin] += pkt.size;

  if (pkt.ecn_ce) {
    ++jt.ce_delivered;
    if (qps_[f.qp].cnp_limiter.admit(engine_.now(), cfg_.cc.cnp_interval)) {
      const SimTime delay = nanoseconds(cfg_.fabric.link_latency.ns * f.hops);
      engine_.schedule_in(delay, EventKind::CnpDelivery, {f.qp, 0, 0});
    }
  }

  if (f.done) return;
  if (pkt.psn == f.recv_expected) {
    ++f.recv_expected;
    auto& ooo = f.out_of_order;
    while (!ooo.empty() && ooo.front() == f.recv_expected) {
      ooo.erase(ooo.begin());
      ++f.recv_expected;
    }
  } else if (pkt.psn > f.recv_expected) {
    auto& ooo = f.out_of_order;
    const auto it = std::lower_bound(ooo.begin(), ooo.end(), pkt.psn);
    if (it == ooo.end() || *it != pkt.psn) ooo.insert(it, pkt.psn);
  }
  if (f.recv_expected > f.n_packets) complete_flow(pkt.flow_id);
}

void Simulation::complete_flow(std::uint32_t fi) {
  FlowRt& f = flows_[fi];
  f.done = true;
  f.out_of_order.clear();
  f.out_of_order.shrink_to_fit();
  ++f.rto_gen;
  JobRt& job = jobs_[f.job];
  JobTelemetry& jt = tel_.jobs[f.job];
  FlowRecord& rec = jt.flows[fi - job.flow_begin];
  rec.done = true;
  rec.complete = engine_.now();
  if (--job.step_left[f.step] == 0) jt.step_complete[f.step] = engine_.now();

  const std::uint32_t job_index = f.job;
  const std::vector<std::uint32_t> deps = f.dependents;
  for (std::uint32_t d : deps) {
    if (--flows_[d].pending_deps != 0) continue;
    if (job.spec.compute_gap.ns > 0) {
      engine_.schedule_in(job.spec.compute_gap, EventKind::FlowStart, {d, 0, 0});
    } else {
      make_ready(d);
    }
  }
  if (--jobs_[job_index].flows_left == 0) finish_job(job_index);
}

void Simulation::on_cnp(std::uint32_t q) {
  Qp& qp = qps_[q];
  const SimTime now = engine_.now();
  if (qp.last_cnp != kNever) {
    // Alpha decays once per quiet period; apply the periods since the last CNP.
    const std::int64_t periods = (now - qp.last_cnp).ns / cfg_.cc.alpha_period.ns;
    if (periods > 0) qp.rate.cc_alpha *= std::pow(1.0 - cfg_.cc.g, static_cast<double>(periods));
  }
  qp.last_cnp = now;
  ringsim::on_cnp(qp.rate, cfg_.cc);
  ++qp.timer_gen;
  engine_.schedule_in(cfg_.cc.rate_timer, EventKind::RateTimer, {q, qp.timer_gen, 0});
}

void Simulation::on_rate_timer(std::uint32_t q, std::uint32_t gen) {
  Qp& qp = qps_[q];
  if (gen != qp.timer_gen) return;
  const double link = static_cast<double>(cfg_.fabric.link_rate_bps);
  rate_increase_tick(qp.rate, link, cfg_.cc);
  if (qp.rate.current_rate < link) engine_.schedule_in(cfg_.cc.rate_timer, EventKind::RateTimer, {q, gen, 0});
}

void Simulation::on_retransmit_timeout(std::uint32_t fi, std::uint32_t gen) {
  FlowRt& f = flows_[fi];
  if (gen != f.rto_gen || f.done) return;
  f.next_psn = f.recv_expected;
  if (!f.on_nic) {
    f.on_nic = true;
    nic_add(f.src, fi);
  }
}

// --- jobs ------------------------------------------------------------------

void Simulation::on_job_arrival(std::uint32_t j) {
  if (cfg_.max_concurrency == 0 || running_jobs_ < cfg_.max_concurrency) {
    admit_job(j);
  } else {
    waiting_jobs_.push_back(j);
  }
}

void Simulation::admit_job(std::uint32_t j) {
  JobRt& job = jobs_[j];
  job.admitted = true;
  ++running_jobs_;
  JobTelemetry& jt = tel_.jobs[j];
  jt.started = true;
  jt.start_at = engine_.now();
  for (std::uint32_t f = job.flow_begin; f < job.flow_end; ++f) {
    if (flows_[f].pending_deps == 0) make_ready(f);
  }
}

void Simulation::finish_job(std::uint32_t j) {
  JobTelemetry& jt = tel_.jobs[j];
  jt.complete = true;
  jt.end = engine_.now();
  --running_jobs_;
  ++jobs_done_;
  if (!waiting_jobs_.empty()) {
    const std::uint32_t next = waiting_jobs_.front();
    waiting_jobs_.erase(waiting_jobs_.begin());
    admit_job(next);
  }
  if (finished()) engine_.stop();
}

// --- symphony control -------------------------------------------------------

void Simulation::activate_symphony() {
  marking_ = cfg_.symphony.enabled;
  if (tracking_) return;
  tracking_ = true;
  for (auto& t : tables_) {
    for (const JobRt& j : jobs_) t.register_job(j.spec.job_id, engine_.now());
  }
  ++tick_gen_;
  engine_.schedule_in(cfg_.symphony.params.t_win, EventKind::WindowTick, {tick_gen_, 0, 0});
}

void Simulation::deactivate_symphony() {
  marking_ = false;
  if (cfg_.fabric.scheduling == Scheduling::strict_priority) return;
  tracking_ = false;
  for (auto& t : tables_) t.clear();
  ++tick_gen_;
}

void Simulation::set_symphony_enabled(bool on) {
  if (on) {
    cfg_.symphony.enabled = true;
    activate_symphony();
  } else {
    deactivate_symphony();
  }
}

void Simulation::on_window_tick(std::uint32_t gen) {
  if (gen != tick_gen_ || !tracking_) return;
  const SimTime now = engine_.now();
  for (auto& t : tables_) {
    for (auto& blk : t.blocks()) symphony::window_tick(blk, cfg_.symphony.params, now);
  }
  if (cfg_.record_decisions) tel_.window_ticks.push_back(WindowTickRecord{now, engine_.dispatched()});
  engine_.schedule_in(cfg_.symphony.params.t_win, EventKind::WindowTick, {gen, 0, 0});
}

void Simulation::on_background_toggle(std::uint32_t b, std::uint32_t) {
  BgRt& bg = bg_[b];
  const SimTime now = engine_.now();
  const bool past_end = bg.spec.end != kNever && now >= bg.spec.end;
  if (bg.on || past_end) {
    bg.on = false;
    if (past_end) return;
    const auto off = static_cast<std::int64_t>(bg_rng_.exponential(static_cast<double>(bg.spec.mean_off.ns)));
    engine_.schedule_in(nanoseconds(off), EventKind::BackgroundToggle, {b, 0, 0});
    return;
  }
  bg.on = true;
  if (!bg.on_nic) {
    bg.on_nic = true;
    nic_add(bg.spec.src, b | kBgBit);
  }
  const auto on = static_cast<std::int64_t>(bg_rng_.exponential(static_cast<double>(bg.spec.mean_on.ns)));
  engine_.schedule_in(nanoseconds(on), EventKind::BackgroundToggle, {b, 0, 0});
}

// --- inspection --------------------------------------------------------------

const symphony::PerJobStateBlock* Simulation::state_block(NodeId sw, JobId job) const {
  if (cfg_.symphony.scope != SymphonyScope::per_switch || !fabric_.is_switch(sw)) return nullptr;
  return tables_[fabric_.switch_index(sw)].lookup(job);
}

std::int64_t Simulation::queue_accounting_error() const {
  std::int64_t err = 0;
  for (const PortState& ps : ports_) {
    err += std::llabs(static_cast<std::int64_t>(ps.queue.enqueued_bytes() - ps.queue.dequeued_bytes() -
                                                ps.queue.depth_bytes()));
  }
  return err;
}

}  // namespace ringsim
