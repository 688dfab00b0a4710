#include "rbb/simulator.hpp"

#include <stdexcept>

namespace rbb {

Simulator::Simulator(const LatencyMatrix& net, const NetConfig& cfg)
    : net_(net), cfg_(cfg), rng_(cfg.seed) {
  if (cfg_.pre_gst_multiplier < 1.0)
    throw std::invalid_argument("pre_gst_multiplier must be >= 1");
}

ActorId Simulator::add_actor(Actor* a, size_t region) {
  if (region >= net_.size()) throw std::invalid_argument("actor region out of range");
  ActorId id = static_cast<ActorId>(actors_.size());
  actors_.push_back(a);
  region_.push_back(region);
  egress_.push_back(0);
  for (size_t c = 0; c < kChanCount; ++c) egress_chan_.push_back(0);
  link_free_.assign(actors_.size() * actors_.size(), 0);
  pair_chan_msgs_.assign(actors_.size() * actors_.size() * kChanCount, 0);

  Event e;
  e.at = 0;
  e.dst = id;
  e.src = id;
  e.kind = EvKind::Start;
  push(std::move(e));
  return id;
}

void Simulator::push(Event e) {
  e.seq = seq_++;
  queue_.push(std::move(e));
}

void Simulator::send(ActorId dst, MsgPtr msg) {
  ActorId src = current_;
  if (src == kNoActor) throw std::logic_error("send outside actor context");
  if (dst >= actors_.size()) throw std::invalid_argument("send to unknown actor");

  if (filter_ && src != dst) {
    msg = filter_(src, dst, msg);
    if (!msg) return;  // adversary suppressed it
  }

  Event e;
  e.dst = dst;
  e.src = src;
  e.kind = EvKind::Msg;
  e.hop = hop_ + 1;
  e.msg = msg;

  if (src == dst) {
    // Local hand-off: no wire, no delay, still an event so processing
    // order stays explicit.
    e.at = now_;
    push(std::move(e));
    return;
  }

  uint64_t bytes = wire_size(*msg);
  Chan chan = chan_of(*msg);
  size_t rs = region_[src], rd = region_[dst];
  int64_t lat = net_.latency_us(rs, rd);
  int64_t ser = net_.ser_delay_us(rs, rd, bytes);
  int64_t jitter = cfg_.jitter_us > 0 ? static_cast<int64_t>(rng_.below(
                                            static_cast<uint64_t>(cfg_.jitter_us) + 1))
                                      : 0;
  int64_t extra = 0;
  if (now_ < cfg_.gst_us && cfg_.pre_gst_multiplier > 1.0) {
    int64_t span = static_cast<int64_t>((cfg_.pre_gst_multiplier - 1.0) * static_cast<double>(lat));
    if (span > 0) extra = static_cast<int64_t>(rng_.below(static_cast<uint64_t>(span) + 1));
  }

  // FIFO per directed link: a message departs when the link is free.
  Time& free_at = link_free_[static_cast<size_t>(src) * actors_.size() + dst];
  Time depart = std::max(now_, free_at);
  free_at = depart + ser;
  e.at = depart + ser + lat + jitter + extra;

  egress_[src] += bytes;
  egress_chan_[static_cast<size_t>(src) * kChanCount + static_cast<size_t>(chan)] += bytes;
  pair_chan_msgs_[(static_cast<size_t>(src) * actors_.size() + dst) * kChanCount +
                  static_cast<size_t>(chan)] += 1;
  auto& t = chan_[static_cast<size_t>(chan)];
  t.msgs += 1;
  t.bytes += bytes;
  total_bytes_ += bytes;

  push(std::move(e));
}

void Simulator::inject(ActorId dst, MsgPtr msg, Time delay) {
  if (dst >= actors_.size()) throw std::invalid_argument("inject to unknown actor");
  Event e;
  e.at = now_ + delay;
  e.dst = dst;
  e.src = current_ == kNoActor ? dst : current_;
  e.kind = EvKind::Msg;
  e.hop = hop_ + 1;
  e.msg = std::move(msg);
  push(std::move(e));
}

void Simulator::set_timer(Time delay, const TimerFire& t) {
  if (current_ == kNoActor) throw std::logic_error("set_timer outside actor context");
  Event e;
  e.at = now_ + delay;
  e.dst = current_;
  e.src = current_;
  e.kind = EvKind::Timer;
  e.hop = hop_;  // timers resume, they do not travel
  e.timer = t;
  push(std::move(e));
}

Simulator::RunStatus Simulator::run(Time deadline, uint64_t max_events) {
  RunStatus st;
  stop_ = false;
  while (!queue_.empty()) {
    const Event& top = queue_.top();
    if (top.at > deadline || st.events >= max_events) {
      st.deadline = true;
      break;
    }
    Event e = top;
    queue_.pop();
    now_ = e.at;
    current_ = e.dst;
    hop_ = e.hop;
    ++st.events;
    ++events_seen_;
    Actor* a = actors_[e.dst];
    switch (e.kind) {
      case EvKind::Start:
        a->on_start(*this);
        break;
      case EvKind::Msg:
        a->on_message(*this, e.src, *e.msg);
        break;
      case EvKind::Timer:
        a->on_timer(*this, e.timer);
        break;
    }
    current_ = kNoActor;
    if (stop_) {
      st.stopped = true;
      break;
    }
  }
  st.idle = queue_.empty() && !st.stopped;
  st.at = now_;
  return st;
}

std::array<uint64_t, kChanCount> Simulator::chan_bytes_snapshot() const {
  std::array<uint64_t, kChanCount> out;
  for (size_t i = 0; i < kChanCount; ++i) out[i] = chan_[i].bytes;
  return out;
}

std::string Simulator::queue_dump(size_t max_entries) const {
  auto copy = queue_;  // the underlying heap is small next to a full run's history
  std::string out = std::to_string(copy.size()) + " queued";
  for (size_t i = 0; i < max_entries && !copy.empty(); ++i) {
    const Event& e = copy.top();
    out += "; [" + std::to_string(e.at) + "us ";
    switch (e.kind) {
      case EvKind::Start:
        out += "start";
        break;
      case EvKind::Msg:
        out += std::to_string(e.src) + "->" + std::to_string(e.dst) + " " +
               chan_name(e.msg ? chan_of(*e.msg) : Chan::Client);
        break;
      case EvKind::Timer:
        out += "timer@" + std::to_string(e.dst) + " kind=" + std::to_string(e.timer.kind);
        break;
    }
    out += "]";
    copy.pop();
  }
  return out;
}

}  // namespace rbb
