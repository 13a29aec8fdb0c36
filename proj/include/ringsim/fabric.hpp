#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ringsim/sim_core.hpp"

namespace ringsim {

using HostId = std::uint32_t;
using NodeId = std::uint32_t;
using PortId = std::uint32_t;

/// Thrown for fabric specs that cannot be built (zero counts, no path
/// between ToRs, ...).
class FabricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RedParams {
  std::uint64_t k_min_bytes = 50 * 1024;
  std::uint64_t k_max_bytes = 100 * 1024;
  double p_max = 0.2;

  void validate() const;
};

/// 0 below k_min, linear to p_max at k_max, 1 above k_max. Instantaneous depth.
double red_mark_probability(std::uint64_t depth_bytes, const RedParams& red);

enum class Scheduling : std::uint8_t { fifo, strict_priority };
enum class RoutingMode : std::uint8_t { ecmp, balanced };

struct FabricSpec {
  std::uint32_t pods = 1;
  std::uint32_t tors = 4;    // per pod
  std::uint32_t spines = 4;  // per pod
  std::uint32_t cores = 0;   // shared by all pods; required when pods > 1
  std::uint32_t hosts_per_tor = 8;
  std::uint64_t link_rate_bps = 10'000'000'000ULL;
  SimTime link_latency = microseconds(1);
  // Oversubscription of the topmost uplink tier (ToR->spine for one pod,
  // spine->core for several). 1.0 is non-blocking.
  double oversubscription = 1.0;
  Scheduling scheduling = Scheduling::fifo;
  RoutingMode routing = RoutingMode::ecmp;
  std::uint64_t queue_capacity_bytes = 32ULL * 1024 * 1024;

  std::uint32_t host_count() const { return pods * tors * hosts_per_tor; }
};

struct LinkPerturbation {
  NodeId from = 0;
  NodeId to = 0;
  double capacity_multiplier = 1.0;
  SimTime start{};
  SimTime end{};
};

struct FiveTuple {
  std::uint32_t src_ip = 0;
  std::uint32_t dst_ip = 0;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 4791;
  std::uint8_t proto = 17;
};

/// Stable hash of the tuple (salted per run) reduced onto [0, path_count).
std::uint32_t ecmp_select(const FiveTuple& tuple, std::uint32_t path_count, std::uint64_t salt = 0);

enum class NodeKind : std::uint8_t { host, tor, spine, core };

struct Node {
  NodeKind kind = NodeKind::host;
  std::uint32_t index = 0;  // global index within its kind
  std::uint32_t pod = 0;
};

/// One direction of a link: the egress port at `from`.
struct Link {
  NodeId from = 0;
  NodeId to = 0;
  std::uint64_t rate_bps = 0;
  SimTime latency{};
};

/// Leaf-spine (optionally multi-pod with a core tier) topology with
/// equal-cost path enumeration.
class Fabric {
 public:
  static Fabric build(const FabricSpec& spec);

  const FabricSpec& spec() const { return spec_; }
  std::uint32_t host_count() const { return spec_.host_count(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const Node& node(NodeId id) const { return nodes_[id]; }
  const Link& link(PortId id) const { return links_[id]; }

  NodeId host_node(HostId h) const { return h; }
  NodeId tor_node(std::uint32_t global_tor) const { return tor_base_ + global_tor; }
  NodeId spine_node(std::uint32_t global_spine) const { return spine_base_ + global_spine; }
  NodeId core_node(std::uint32_t core) const { return core_base_ + core; }
  std::uint32_t tor_of_host(HostId h) const { return h / spec_.hosts_per_tor; }
  std::uint32_t pod_of_host(HostId h) const { return tor_of_host(h) / spec_.tors; }
  bool is_switch(NodeId n) const { return nodes_[n].kind != NodeKind::host; }
  std::uint32_t switch_count() const { return static_cast<std::uint32_t>(nodes_.size()) - host_count(); }
  /// Dense index over switches, [0, switch_count()).
  std::uint32_t switch_index(NodeId n) const { return n - tor_base_; }

  std::string node_name(NodeId n) const;
  /// Accepts names produced by node_name(), e.g. "host3", "tor1", "spine0", "core2".
  std::optional<NodeId> find_node(const std::string& name) const;
  std::optional<PortId> find_link(NodeId from, NodeId to) const;

  std::uint32_t path_count(HostId src, HostId dst) const;
  /// Egress ports from src's NIC to dst, for equal-cost path `path`.
  void route(HostId src, HostId dst, std::uint32_t path, std::vector<PortId>& out) const;

  /// Sum of link rates from switches of `lower` kind up to `upper` kind.
  std::uint64_t tier_capacity_bps(NodeKind lower, NodeKind upper) const;

 private:
  PortId add_link(NodeId from, NodeId to, std::uint64_t rate);
  PortId port(NodeId from, NodeId to) const;

  FabricSpec spec_;
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  NodeId tor_base_ = 0;
  NodeId spine_base_ = 0;
  NodeId core_base_ = 0;
  // Dense adjacency: for each node, (neighbor, port) pairs.
  std::vector<std::vector<std::pair<NodeId, PortId>>> adjacency_;
};

/// Output queue with optional two-class strict priority. Holds opaque
/// packet handles; byte depth is tracked for RED.
class PortQueue {
 public:
  static constexpr std::uint8_t kHigh = 0;
  static constexpr std::uint8_t kLow = 1;

  void push(std::uint32_t handle, std::uint32_t bytes, std::uint8_t priority = kLow) {
    (priority == kHigh ? high_ : low_).push_back(Item{handle, bytes});
    depth_bytes_ += bytes;
    enqueued_bytes_ += bytes;
  }

  bool empty() const { return high_.empty() && low_.empty(); }
  std::size_t size() const { return high_.size() + low_.size(); }
  std::uint64_t depth_bytes() const { return depth_bytes_; }
  std::uint64_t enqueued_bytes() const { return enqueued_bytes_; }
  std::uint64_t dequeued_bytes() const { return dequeued_bytes_; }

  std::uint32_t pop() {
    auto& q = high_.empty() ? low_ : high_;
    const Item it = q.front();
    q.pop_front();
    depth_bytes_ -= it.bytes;
    dequeued_bytes_ += it.bytes;
    return it.handle;
  }

  /// Handles currently queued in class `priority`, front first.
  std::vector<std::uint32_t> snapshot(std::uint8_t priority) const;

 private:
  struct Item {
    std::uint32_t handle;
    std::uint32_t bytes;
  };
  std::deque<Item> high_;
  std::deque<Item> low_;
  std::uint64_t depth_bytes_ = 0;
  std::uint64_t enqueued_bytes_ = 0;
  std::uint64_t dequeued_bytes_ = 0;
};

}  // namespace ringsim
