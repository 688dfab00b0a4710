#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <set>

#include "rbb/messages.hpp"
#include "rbb/params.hpp"

namespace rbb {

struct BinTimeouts {
  Time round_base_us = 500000;  // doubles each round
  uint32_t round_max = 20;      // diagnostic bound, not a liveness assumption
};

// Binary Byzantine consensus, safe for n >= 3t+1 under partial synchrony,
// deterministic (no common coin). One instance runs per proposer per
// height and decides whether that proposal enters the superblock.
//
// Round structure (round r, values are bits):
//   EST phase   broadcast EST(est); re-broadcast a value backed by t+1
//               senders; a value backed by 2t+1 enters bin_values.
//   AUX phase   a weak coordinator (node r mod n) suggests the first value
//               it saw enter bin_values. Each node sends one AUX carrying
//               the coordinator's suggestion if that value is already in
//               its own bin_values, else (after the round timer) some
//               bin_values element. The coordinator can bias *which* value
//               wins a round but cannot forge one: AUX values outside the
//               receiver's bin_values are ignored, and bin_values only
//               admits values backed by 2t+1 senders.
//   decide      with n-t AUX messages whose values all lie in bin_values:
//               a singleton {v} decides v when v == r mod 2 (else leaves
//               est = v); the pair {0,1} leaves est = r mod 2.
//
// A decided instance keeps echoing for two more rounds so laggards
// terminate, then goes quiet.
class BinaryInstance {
 public:
  struct Hooks {
    std::function<void(MsgPtr, Chan)> broadcast;          // to all replicas incl self
    std::function<void(uint32_t round, Time delay)> arm_round_timer;
    std::function<void(uint8_t value)> decide;            // fired once
    std::function<void()> round_overflow;                 // round_max exceeded
  };

  BinaryInstance(const Params& p, NodeId self, uint64_t height, uint16_t inst, BinTimeouts to,
                 Hooks hooks);

  // Joining with an estimate. Messages arriving beforehand are absorbed
  // into state but trigger no sends; propose() replays their effects.
  void propose(uint8_t v);

  void on_est(NodeId src, const BinEst& m);
  void on_aux(NodeId src, const BinAux& m);
  void on_coord(NodeId src, const BinCoord& m);
  void on_round_timer(uint32_t round);

  bool proposed() const { return proposed_; }
  bool decided() const { return decided_; }
  uint8_t decision() const { return decision_; }
  uint32_t current_round() const { return round_; }
  uint32_t decided_round() const { return decided_round_; }
  bool halted() const { return halted_; }

 private:
  struct RoundState {
    std::array<std::set<NodeId>, 2> est_from;
    std::array<bool, 2> est_sent{false, false};
    std::array<bool, 2> bin_values{false, false};
    uint8_t first_bin_value = 2;  // 2 = none yet
    std::array<std::set<NodeId>, 2> aux_from;
    std::set<NodeId> aux_seen;
    bool aux_sent = false;
    bool coord_sent = false;
    uint8_t coord_value = 2;  // from the round coordinator, 2 = none
    bool timer_expired = false;
  };

  NodeId coordinator(uint32_t r) const { return static_cast<NodeId>(r % p_.n); }
  uint8_t parity(uint32_t r) const { return static_cast<uint8_t>(r % 2); }
  RoundState& rs(uint32_t r) { return rounds_[r]; }

  void enter_round(uint32_t r);
  void step();  // run every predicate for the current round
  void conclude_round(uint8_t next_est, std::optional<uint8_t> decide_value);

  Params p_;
  NodeId self_;
  uint64_t height_;
  uint16_t inst_;
  BinTimeouts to_;
  Hooks hooks_;

  std::map<uint32_t, RoundState> rounds_;
  uint32_t round_ = 0;  // 0 = not yet proposed
  uint8_t est_ = 0;
  bool proposed_ = false;
  bool decided_ = false;
  uint8_t decision_ = 0;
  uint32_t decided_round_ = 0;
  bool halted_ = false;
  bool in_step_ = false;
};

}  // namespace rbb
