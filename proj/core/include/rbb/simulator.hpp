#pragma once

#include <array>
#include <functional>
#include <queue>
#include <vector>

#include "rbb/latency.hpp"
#include "rbb/messages.hpp"
#include "rbb/params.hpp"
#include "rbb/rng.hpp"

namespace rbb {

// Time (integer microseconds) comes from params.hpp; all delays are
// integers so event ordering never depends on floating point.
using ActorId = uint32_t;
inline constexpr ActorId kNoActor = 0xffffffffu;

// Timers carry a small opaque payload instead of closures: the schedule
// stays serializable and replays byte-identically.
struct TimerFire {
  uint32_t kind = 0;
  uint64_t a = 0;
  uint64_t b = 0;
  uint64_t c = 0;
};

class Simulator;

class Actor {
 public:
  virtual ~Actor() = default;
  virtual void on_start(Simulator&) {}
  virtual void on_message(Simulator&, ActorId src, const Message& m) = 0;
  virtual void on_timer(Simulator&, const TimerFire& t) = 0;
};

struct NetConfig {
  uint64_t seed = 1;
  int64_t jitter_us = 0;            // uniform extra delay in [0, jitter_us]
  Time gst_us = 0;                  // global stabilization time
  double pre_gst_multiplier = 1.0;  // before GST add uniform [0, (m-1)*latency]
};

// Send-time transform installed by the adversary: return the original
// pointer to pass, a different message to replace, or null to drop.
using SendFilter = std::function<MsgPtr(ActorId src, ActorId dst, const MsgPtr&)>;

struct Traffic {
  uint64_t msgs = 0;
  uint64_t bytes = 0;
};

class Simulator {
 public:
  Simulator(const LatencyMatrix& net, const NetConfig& cfg);

  // Actors are not owned. Start events fire at t=0 in registration order.
  ActorId add_actor(Actor* a, size_t region);
  size_t actor_count() const { return actors_.size(); }
  size_t region_of(ActorId a) const { return region_[a]; }

  Time now() const { return now_; }
  ActorId current_actor() const { return current_; }

  // Causal depth of the event being processed. Message sends extend it by
  // one; timers resume at the depth where they were armed. A protocol round
  // rebases to zero when it starts, so a commit's depth is the longest
  // message chain from its round start.
  uint32_t current_hop() const { return hop_; }
  void rebase_hop(uint32_t h = 0) { hop_ = h; }

  // From the current actor. Self-sends are free and instantaneous; network
  // sends pay latency, per-link FIFO serialization, jitter and the pre-GST
  // penalty, and are charged to the sender's egress.
  void send(ActorId dst, MsgPtr msg);
  // Out-of-band delivery: no bytes charged, no filter (Byzantine coalitions
  // sharing state, test injections).
  void inject(ActorId dst, MsgPtr msg, Time delay);

  void set_timer(Time delay, const TimerFire& t);

  void set_send_filter(SendFilter f) { filter_ = std::move(f); }

  struct RunStatus {
    bool idle = false;      // queue drained
    bool stopped = false;   // request_stop()
    bool deadline = false;  // hit the time or event cap
    Time at = 0;
    uint64_t events = 0;
  };
  RunStatus run(Time deadline, uint64_t max_events);
  void request_stop() { stop_ = true; }

  Rng& rng() { return rng_; }

  // --- instrumentation ---
  const Traffic& chan_traffic(Chan c) const { return chan_[static_cast<size_t>(c)]; }
  uint64_t total_network_bytes() const { return total_bytes_; }
  uint64_t events_processed() const { return events_seen_; }
  uint64_t egress_bytes(ActorId a) const { return egress_[a]; }
  uint64_t egress_chan_bytes(ActorId a, Chan c) const {
    return egress_chan_[a * kChanCount + static_cast<size_t>(c)];
  }
  // Messages actually placed on the wire from src to dst on a channel
  // (post-filter, self-sends excluded).
  uint64_t pair_msgs(ActorId src, ActorId dst, Chan c) const {
    return pair_chan_msgs_[(static_cast<size_t>(src) * actors_.size() + dst) * kChanCount +
                           static_cast<size_t>(c)];
  }
  std::array<uint64_t, kChanCount> chan_bytes_snapshot() const;

  // Human-readable view of the nearest pending events, for abort diagnostics.
  std::string queue_dump(size_t max_entries) const;

 private:
  enum class EvKind : uint8_t { Start, Msg, Timer };
  struct Event {
    Time at = 0;
    ActorId dst = 0;
    ActorId src = 0;
    uint64_t seq = 0;
    EvKind kind = EvKind::Msg;
    uint32_t hop = 0;
    MsgPtr msg;
    TimerFire timer;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.at != b.at) return a.at > b.at;
      if (a.dst != b.dst) return a.dst > b.dst;
      if (a.src != b.src) return a.src > b.src;
      return a.seq > b.seq;
    }
  };

  void push(Event e);

  const LatencyMatrix& net_;
  NetConfig cfg_;
  Rng rng_;
  std::vector<Actor*> actors_;
  std::vector<size_t> region_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::vector<Time> link_free_;  // per ordered actor pair, resized on add
  uint64_t seq_ = 0;
  Time now_ = 0;
  ActorId current_ = kNoActor;
  uint32_t hop_ = 0;
  bool stop_ = false;
  SendFilter filter_;

  std::array<Traffic, kChanCount> chan_{};
  std::vector<uint64_t> egress_;
  std::vector<uint64_t> egress_chan_;
  std::vector<uint64_t> pair_chan_msgs_;  // actors * actors * kChanCount, resized on add
  uint64_t total_bytes_ = 0;
  uint64_t events_seen_ = 0;
};

}  // namespace rbb
