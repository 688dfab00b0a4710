#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rbb/params.hpp"
#include "rbb/simulator.hpp"

namespace rbb {

// Fault injection. Byzantine replicas run the normal protocol code; the
// attack is a send-time transform, so their behavior stays correct in every
// protocol the attack does not name.
//
//   Byz1    equivocates: each destination gets a different garbage proposal
//           (same size as the real one), and every binary consensus vote is
//           flipped.
//   Byz2    withholds: its own proposal payload goes only to the t+1
//           lowest-id correct nodes and to fellow coalition members, and it
//           never answers a fetch. The remaining n-2t-1 correct nodes must
//           pull the payload from the holders.
//   Silent  crashed from the start: sends nothing (the replica also skips
//           all local work).
enum class AdversaryKind : uint8_t { None = 0, Byz1, Byz2, Silent };

const char* adversary_name(AdversaryKind k);
std::optional<AdversaryKind> adversary_from_name(const std::string& s);

class Adversary {
 public:
  // byz[i] marks replica i faulty; byz.size() == p.n.
  Adversary(AdversaryKind kind, const Params& p, std::vector<bool> byz);

  // Default faulty set: the `count` highest replica ids.
  static std::vector<bool> top_ids(uint16_t n, uint16_t count);

  AdversaryKind kind() const { return kind_; }
  bool is_byz(NodeId id) const { return id < byz_.size() && byz_[id]; }
  uint16_t byz_count() const { return count_; }
  const std::vector<NodeId>& byz2_targets() const { return targets_; }

  // Send transform for Simulator::set_send_filter. Only replica-to-replica
  // traffic from faulty senders is touched.
  SendFilter filter() const;

 private:
  MsgPtr transform(ActorId src, ActorId dst, const MsgPtr& m) const;

  AdversaryKind kind_;
  Params p_;
  std::vector<bool> byz_;
  uint16_t count_ = 0;
  std::vector<NodeId> targets_;  // t+1 lowest-id correct nodes
};

}  // namespace rbb
