#pragma once

#include <compare>
#include <cstdint>
#include <queue>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace ringsim {

/// Virtual time in integer nanoseconds since simulation start.
struct SimTime {
  std::int64_t ns = 0;

  constexpr auto operator<=>(const SimTime&) const = default;
  constexpr SimTime operator+(SimTime o) const { return {ns + o.ns}; }
  constexpr SimTime operator-(SimTime o) const { return {ns - o.ns}; }
  constexpr SimTime& operator+=(SimTime o) {
    ns += o.ns;
    return *this;
  }
  constexpr double seconds() const { return static_cast<double>(ns) * 1e-9; }
  constexpr double millis() const { return static_cast<double>(ns) * 1e-6; }
  constexpr double micros() const { return static_cast<double>(ns) * 1e-3; }
};

constexpr SimTime nanoseconds(std::int64_t v) { return {v}; }
constexpr SimTime microseconds(std::int64_t v) { return {v * 1'000}; }
constexpr SimTime milliseconds(std::int64_t v) { return {v * 1'000'000}; }
constexpr SimTime seconds(std::int64_t v) { return {v * 1'000'000'000}; }

/// Raised when a caller breaks an engine precondition (scheduling in the
/// past, starting a flow with unmet dependencies, ...). Aborts the run.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class EventKind : std::uint8_t {
  PacketArrival,
  PacketDequeue,
  TransmitComplete,
  WindowTick,
  CnpDelivery,
  RateTimer,
  FlowStart,
  JobArrival,
  FaultTrigger,
  HostEmit,
  RetransmitTimeout,
  BackgroundToggle,
  SymphonyControl,
};

/// Kind-specific payload. Interpretation is owned by the dispatcher.
struct EventPayload {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  std::uint64_t c = 0;
};

struct Event {
  SimTime fire_at;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::PacketArrival;
  EventPayload payload;
};

/// Min-queue over (fire_at, seq). seq is a global insertion counter, so
/// equal-time events dispatch in insertion order.
class EventQueue {
 public:
  std::uint64_t push(SimTime fire_at, EventKind kind, EventPayload payload) {
    const std::uint64_t seq = next_seq_++;
    heap_.push(Event{fire_at, seq, kind, payload});
    return seq;
  }

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  const Event& top() const { return heap_.top(); }

  Event pop() {
    Event ev = heap_.top();
    heap_.pop();
    return ev;
  }

 private:
  struct Later {
    bool operator()(const Event& x, const Event& y) const {
      if (x.fire_at != y.fire_at) return x.fire_at > y.fire_at;
      return x.seq > y.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

/// Single-timeline discrete-event engine. Copyable: a copy is a full
/// snapshot of pending work and the clock.
class Engine {
 public:
  SimTime now() const { return now_; }
  std::uint64_t dispatched() const { return dispatched_; }
  std::size_t pending() const { return queue_.size(); }

  std::uint64_t schedule(SimTime fire_at, EventKind kind, EventPayload payload = {}) {
    if (fire_at < now_) {
      throw ContractViolation("event scheduled in the past");
    }
    return queue_.push(fire_at, kind, payload);
  }

  std::uint64_t schedule_in(SimTime delay, EventKind kind, EventPayload payload = {}) {
    return schedule(now_ + delay, kind, payload);
  }

  /// Stops dispatch once the current handler returns.
  void stop() { stopped_ = true; }
  bool stopped() const { return stopped_; }

  /// Dispatches every event with fire_at <= t_end, in (fire_at, seq) order.
  /// The clock ends at t_end unless a handler called stop().
  template <class Handler>
  std::uint64_t run_until(SimTime t_end, Handler&& handler) {
    stopped_ = false;
    std::uint64_t count = 0;
    while (!stopped_ && !queue_.empty() && queue_.top().fire_at <= t_end) {
      const Event ev = queue_.pop();
      now_ = ev.fire_at;
      ++count;
      ++dispatched_;
      handler(ev);
    }
    if (!stopped_ && t_end > now_) now_ = t_end;
    return count;
  }

 private:
  SimTime now_{};
  EventQueue queue_;
  std::uint64_t dispatched_ = 0;
  bool stopped_ = false;
};

/// Seeded generator with named, independent sub-streams. Draws are
/// reproducible across platforms (mt19937_64 is fully specified and the
/// real conversion below avoids std::uniform_real_distribution).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(mix(seed)) {}

  std::uint64_t seed() const { return seed_; }

  /// Stream keyed by name; unaffected by draws on any other stream.
  Rng substream(std::string_view name) const { return Rng(mix(seed_ ^ fnv1a(name))); }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Exponential with the given mean.
  double exponential(double mean);

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return n <= 1 ? 0 : next_u64() % n; }

  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace ringsim
