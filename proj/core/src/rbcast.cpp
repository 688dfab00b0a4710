#include "rbb/rbcast.hpp"

namespace rbb {

RbcastInstance::RbcastInstance(const Params& p, NodeId self, uint64_t height, uint16_t proposer,
                               Hooks hooks, Time fetch_timeout_us)
    : p_(p),
      self_(self),
      height_(height),
      proposer_(proposer),
      hooks_(std::move(hooks)),
      fetch_timeout_us_(fetch_timeout_us) {}

void RbcastInstance::start(BytesPtr payload) {
  if (self_ != proposer_ || payload_) return;
  payload_ = std::move(payload);
  payload_digest_ = sha256(*payload_);
  hooks_.broadcast(make_msg(RbInit{height_, proposer_, payload_}), Chan::RbPayload);
}

void RbcastInstance::on_init(NodeId src, const RbInit& m) {
  if (src != proposer_) return;  // only the proposer may INIT
  if (!payload_) {
    payload_ = m.payload;
    payload_digest_ = sha256(*payload_);
  }
  maybe_send_echo();
  try_deliver();
}

void RbcastInstance::maybe_send_echo() {
  // An ECHO advertises possession: only sent once the payload is held.
  if (echo_sent_ || !payload_digest_) return;
  echo_sent_ = true;
  hooks_.broadcast(make_msg(RbEcho{height_, proposer_, *payload_digest_}), Chan::RbDigest);
}

void RbcastInstance::on_echo(NodeId src, const RbEcho& m) {
  // Only a sender's first ECHO counts; equivocation and spam change nothing.
  if (!echo_seen_.insert(src).second) return;
  echoes_[m.digest].insert(src);
  maybe_progress();
}

void RbcastInstance::on_ready(NodeId src, const RbReady& m) {
  if (!ready_seen_.insert(src).second) return;
  readies_[m.digest].insert(src);
  maybe_progress();
}

void RbcastInstance::maybe_progress() {
  if (!ready_sent_) {
    for (const auto& [d, senders] : echoes_) {
      if (senders.size() >= p_.quorum()) {
        ready_sent_ = true;
        hooks_.broadcast(make_msg(RbReady{height_, proposer_, d}), Chan::RbDigest);
        break;
      }
    }
  }
  if (!ready_sent_) {
    for (const auto& [d, senders] : readies_) {
      if (senders.size() >= p_.witness()) {
        ready_sent_ = true;
        hooks_.broadcast(make_msg(RbReady{height_, proposer_, d}), Chan::RbDigest);
        break;
      }
    }
  }
  if (!accepted_digest_) {
    for (const auto& [d, senders] : readies_) {
      if (senders.size() >= p_.quorum()) {
        accepted_digest_ = d;
        break;
      }
    }
  }
  try_deliver();
}

void RbcastInstance::try_deliver() {
  if (delivered_ || !accepted_digest_) return;
  if (payload_ && payload_digest_ == accepted_digest_) {
    delivered_ = true;
    fetching_ = false;
    hooks_.deliver(payload_);
    return;
  }
  // Accepted a digest whose bytes are elsewhere (or the INIT we got does
  // not match the quorum digest): pull them.
  if (!fetching_) {
    fetching_ = true;
    start_fetch_round();
  }
}

void RbcastInstance::start_fetch_round() {
  // Ask the t+1 lowest-id echoers of the accepted digest not asked yet:
  // at most t of them can be Byzantine, so at least one answers. READY
  // senders are the fallback pool once echoers run out.
  std::set<NodeId> holders;
  auto e = echoes_.find(*accepted_digest_);
  if (e != echoes_.end()) holders = e->second;
  auto r = readies_.find(*accepted_digest_);
  size_t asked = 0;
  for (NodeId h : holders) {
    if (asked >= p_.witness()) break;
    if (h == self_ || fetch_asked_.count(h)) continue;
    fetch_asked_.insert(h);
    hooks_.unicast(h, make_msg(RbFetchReq{height_, proposer_, *accepted_digest_}), Chan::RbFetch);
    ++asked;
  }
  if (asked < p_.witness() && r != readies_.end()) {
    for (NodeId h : r->second) {
      if (asked >= p_.witness()) break;
      if (h == self_ || fetch_asked_.count(h)) continue;
      fetch_asked_.insert(h);
      hooks_.unicast(h, make_msg(RbFetchReq{height_, proposer_, *accepted_digest_}), Chan::RbFetch);
      ++asked;
    }
  }
  // Pool exhausted with nothing new to ask: forget history so the next
  // timeout retries nodes that may have acquired the payload meanwhile.
  if (asked == 0) fetch_asked_.clear();
  hooks_.arm_fetch_timer(fetch_timeout_us_);
}

void RbcastInstance::on_fetch_timer() {
  if (delivered_ || !fetching_) return;
  start_fetch_round();
}

void RbcastInstance::on_fetch_req(NodeId src, const RbFetchReq& m) {
  if (!payload_ || !payload_digest_ || !(*payload_digest_ == m.digest)) return;
  hooks_.unicast(src, make_msg(RbFetchResp{height_, proposer_, payload_}), Chan::RbFetch);
}

void RbcastInstance::on_fetch_resp(NodeId, const RbFetchResp& m) {
  if (delivered_ || !accepted_digest_ || !m.payload) return;
  Digest d = sha256(*m.payload);
  if (!(d == *accepted_digest_)) return;  // junk or stale response
  payload_ = m.payload;
  payload_digest_ = d;
  try_deliver();
}

}  // namespace rbb
