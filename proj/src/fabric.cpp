#include "ringsim/fabric.hpp"

#include <charconv>
#include <cmath>
#include <string_view>

namespace ringsim {

void RedParams::validate() const {
  if (k_min_bytes >= k_max_bytes) throw std::invalid_argument("red.k_min must be < red.k_max");
  if (!(p_max > 0.0 && p_max <= 1.0)) throw std::invalid_argument("red.p_max must lie in (0, 1]");
}

double red_mark_probability(std::uint64_t depth, const RedParams& red) {
  if (depth <= red.k_min_bytes) return 0.0;
  if (depth > red.k_max_bytes) return 1.0;
  return red.p_max * static_cast<double>(depth - red.k_min_bytes) /
         static_cast<double>(red.k_max_bytes - red.k_min_bytes);
}

std::uint32_t ecmp_select(const FiveTuple& t, std::uint32_t path_count, std::uint64_t salt) {
  if (path_count <= 1) return 0;
  const std::uint64_t addr = (static_cast<std::uint64_t>(t.src_ip) << 32) | t.dst_ip;
  const std::uint64_t ports = (static_cast<std::uint64_t>(t.src_port) << 24) |
                              (static_cast<std::uint64_t>(t.dst_port) << 8) | t.proto;
  const std::uint64_t h = Rng::mix(salt ^ Rng::mix(addr) ^ Rng::mix(ports + 0x51ed27));
  return static_cast<std::uint32_t>(h % path_count);
}

Fabric Fabric::build(const FabricSpec& spec) {
  if (spec.pods == 0 || spec.tors == 0 || spec.hosts_per_tor == 0) {
    throw FabricError("fabric: pods, tors and hosts_per_tor must be >= 1");
  }
  if (spec.link_rate_bps == 0) throw FabricError("fabric: link_rate must be > 0");
  if (!(spec.oversubscription >= 1.0)) throw FabricError("fabric: oversubscription must be >= 1");
  if ((spec.tors > 1 || spec.pods > 1) && spec.spines == 0) {
    throw FabricError("fabric: ToRs are disconnected (spines = 0 with more than one ToR)");
  }
  if (spec.pods > 1 && spec.cores == 0) {
    throw FabricError("fabric: pods are disconnected (cores = 0 with more than one pod)");
  }

  Fabric f;
  f.spec_ = spec;
  const std::uint32_t hosts = spec.host_count();
  const std::uint32_t tors = spec.pods * spec.tors;
  const std::uint32_t spines = spec.pods * spec.spines;
  const std::uint32_t cores = spec.pods > 1 ? spec.cores : 0;

  for (std::uint32_t h = 0; h < hosts; ++h) f.nodes_.push_back({NodeKind::host, h, h / (spec.tors * spec.hosts_per_tor)});
  f.tor_base_ = static_cast<NodeId>(f.nodes_.size());
  for (std::uint32_t t = 0; t < tors; ++t) f.nodes_.push_back({NodeKind::tor, t, t / spec.tors});
  f.spine_base_ = static_cast<NodeId>(f.nodes_.size());
  for (std::uint32_t s = 0; s < spines; ++s) f.nodes_.push_back({NodeKind::spine, s, s / spec.spines});
  f.core_base_ = static_cast<NodeId>(f.nodes_.size());
  for (std::uint32_t c = 0; c < cores; ++c) f.nodes_.push_back({NodeKind::core, c, 0});
  f.adjacency_.resize(f.nodes_.size());

  const double host_agg = static_cast<double>(spec.hosts_per_tor) * static_cast<double>(spec.link_rate_bps);
  const double top_ratio = spec.pods > 1 ? 1.0 : spec.oversubscription;
  const auto tor_spine_rate =
      spec.spines ? static_cast<std::uint64_t>(std::llround(host_agg / (spec.spines * top_ratio))) : 0;
  const auto spine_core_rate =
      cores ? static_cast<std::uint64_t>(std::llround(static_cast<double>(spec.tors) * tor_spine_rate /
                                                      (cores * spec.oversubscription)))
            : 0;

  for (std::uint32_t h = 0; h < hosts; ++h) {
    const NodeId tor = f.tor_node(h / spec.hosts_per_tor);
    f.add_link(h, tor, spec.link_rate_bps);
    f.add_link(tor, h, spec.link_rate_bps);
  }
  for (std::uint32_t t = 0; t < tors; ++t) {
    const std::uint32_t pod = t / spec.tors;
    for (std::uint32_t s = 0; s < spec.spines; ++s) {
      const NodeId spine = f.spine_node(pod * spec.spines + s);
      f.add_link(f.tor_node(t), spine, tor_spine_rate);
      f.add_link(spine, f.tor_node(t), tor_spine_rate);
    }
  }
  for (std::uint32_t s = 0; s < spines && cores; ++s) {
    for (std::uint32_t c = 0; c < cores; ++c) {
      f.add_link(f.spine_node(s), f.core_node(c), spine_core_rate);
      f.add_link(f.core_node(c), f.spine_node(s), spine_core_rate);
    }
  }
  return f;
}

PortId Fabric::add_link(NodeId from, NodeId to, std::uint64_t rate) {
  const auto id = static_cast<PortId>(links_.size());
  links_.push_back(Link{from, to, rate, spec_.link_latency});
  adjacency_[from].emplace_back(to, id);
  return id;
}

PortId Fabric::port(NodeId from, NodeId to) const {
  for (const auto& [n, p] : adjacency_[from]) {
    if (n == to) return p;
  }
  throw FabricError("fabric: no link " + node_name(from) + "->" + node_name(to));
}

std::optional<PortId> Fabric::find_link(NodeId from, NodeId to) const {
  if (from >= adjacency_.size()) return std::nullopt;
  for (const auto& [n, p] : adjacency_[from]) {
    if (n == to) return p;
  }
  return std::nullopt;
}

std::string Fabric::node_name(NodeId n) const {
  const Node& nd = nodes_.at(n);
  switch (nd.kind) {
    case NodeKind::host:
      return "host" + std::to_string(nd.index);
    case NodeKind::tor:
      return "tor" + std::to_string(nd.index);
    case NodeKind::spine:
      return "spine" + std::to_string(nd.index);
    case NodeKind::core:
      return "core" + std::to_string(nd.index);
  }
  return "?";
}

std::optional<NodeId> Fabric::find_node(const std::string& name) const {
  const std::string_view s(name);
  const auto parse = [&](std::string_view prefix, NodeId base, std::uint32_t count) -> std::optional<NodeId> {
    if (!s.starts_with(prefix)) return std::nullopt;
    std::uint32_t idx = 0;
    const auto digits = s.substr(prefix.size());
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), idx);
    if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size() || idx >= count) {
      return std::nullopt;
    }
    return base + idx;
  };
  const std::uint32_t tors = spec_.pods * spec_.tors;
  const std::uint32_t spines = spec_.pods * spec_.spines;
  if (auto r = parse("host", 0, host_count())) return r;
  if (auto r = parse("tor", tor_base_, tors)) return r;
  if (auto r = parse("spine", spine_base_, spines)) return r;
  if (auto r = parse("core", core_base_, static_cast<std::uint32_t>(nodes_.size()) - core_base_)) return r;
  return std::nullopt;
}

std::uint32_t Fabric::path_count(HostId src, HostId dst) const {
  const std::uint32_t ts = tor_of_host(src);
  const std::uint32_t td = tor_of_host(dst);
  if (ts == td) return 1;
  if (pod_of_host(src) == pod_of_host(dst)) return spec_.spines;
  return spec_.spines * spec_.cores * spec_.spines;
}

void Fabric::route(HostId src, HostId dst, std::uint32_t path, std::vector<PortId>& out) const {
  out.clear();
  const std::uint32_t ts = tor_of_host(src);
  const std::uint32_t td = tor_of_host(dst);
  const NodeId src_tor = tor_node(ts);
  const NodeId dst_tor = tor_node(td);
  out.push_back(port(src, src_tor));
  if (ts != td) {
    const std::uint32_t ps = pod_of_host(src);
    const std::uint32_t pd = pod_of_host(dst);
    path %= path_count(src, dst);
    if (ps == pd) {
      const NodeId spine = spine_node(ps * spec_.spines + path);
      out.push_back(port(src_tor, spine));
      out.push_back(port(spine, dst_tor));
    } else {
      const std::uint32_t s1 = path % spec_.spines;
      const std::uint32_t c = (path / spec_.spines) % spec_.cores;
      const std::uint32_t s2 = path / (spec_.spines * spec_.cores);
      const NodeId up = spine_node(ps * spec_.spines + s1);
      const NodeId down = spine_node(pd * spec_.spines + s2);
      out.push_back(port(src_tor, up));
      out.push_back(port(up, core_node(c)));
      out.push_back(port(core_node(c), down));
      out.push_back(port(down, dst_tor));
    }
  }
  out.push_back(port(dst_tor, dst));
}

std::uint64_t Fabric::tier_capacity_bps(NodeKind lower, NodeKind upper) const {
  std::uint64_t total = 0;
  for (const Link& l : links_) {
    if (nodes_[l.from].kind == lower && nodes_[l.to].kind == upper) total += l.rate_bps;
  }
  return total;
}

std::vector<std::uint32_t> PortQueue::snapshot(std::uint8_t priority) const {
  std::vector<std::uint32_t> out;
  for (const Item& it : priority == kHigh ? high_ : low_) out.push_back(it.handle);
  return out;
}

}  // namespace ringsim
