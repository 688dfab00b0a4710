#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>

#include "rbb/messages.hpp"
#include "rbb/params.hpp"

namespace rbb {

// Reliable broadcast of one payload per (height, proposer), Bracha-style,
// with the bandwidth optimization that ECHO and READY carry only the
// payload digest. A node can therefore accept a digest it has no payload
// for; the fetch fallback then pulls the bytes from nodes that echoed them
// (an ECHO implies possession, a READY does not).
//
// Properties for n >= 3t+1 with at most t Byzantine nodes:
//   validity    - a correct broadcaster's payload is delivered by all
//                 correct nodes;
//   agreement   - if any correct node delivers a payload, every correct
//                 node delivers that same payload;
//   integrity   - at most one delivery per instance, and only of a payload
//                 whose digest gathered the READY quorum.
class RbcastInstance {
 public:
  struct Hooks {
    std::function<void(MsgPtr, Chan)> broadcast;                 // to all replicas incl self
    std::function<void(NodeId, MsgPtr, Chan)> unicast;
    std::function<void(Time)> arm_fetch_timer;                   // one-shot, re-armed as needed
    std::function<void(BytesPtr)> deliver;                       // exactly once
  };

  RbcastInstance(const Params& p, NodeId self, uint64_t height, uint16_t proposer, Hooks hooks,
                 Time fetch_timeout_us);

  // Proposer entry point.
  void start(BytesPtr payload);

  void on_init(NodeId src, const RbInit& m);
  void on_echo(NodeId src, const RbEcho& m);
  void on_ready(NodeId src, const RbReady& m);
  void on_fetch_req(NodeId src, const RbFetchReq& m);
  void on_fetch_resp(NodeId src, const RbFetchResp& m);
  void on_fetch_timer();

  bool delivered() const { return delivered_; }
  bool accepted() const { return accepted_digest_.has_value(); }
  const std::optional<Digest>& accepted_digest() const { return accepted_digest_; }

  // How many distinct holders this node has fetched from (diagnostics).
  size_t fetch_targets_asked() const { return fetch_asked_.size(); }

 private:
  void maybe_send_echo();
  void maybe_progress();
  void try_deliver();
  void start_fetch_round();

  Params p_;
  NodeId self_;
  uint64_t height_;
  uint16_t proposer_;
  Hooks hooks_;
  Time fetch_timeout_us_;

  BytesPtr payload_;                 // bytes received via INIT or FETCH
  std::optional<Digest> payload_digest_;
  std::optional<Digest> accepted_digest_;  // fixed by the READY quorum
  bool echo_sent_ = false;
  bool ready_sent_ = false;
  bool delivered_ = false;
  bool fetching_ = false;

  std::map<Digest, std::set<NodeId>> echoes_;
  std::map<Digest, std::set<NodeId>> readies_;
  std::set<NodeId> echo_seen_;
  std::set<NodeId> ready_seen_;
  std::set<NodeId> fetch_asked_;
};

}  // namespace rbb
