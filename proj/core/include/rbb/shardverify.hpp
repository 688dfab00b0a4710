#pragma once

#include <map>
#include <set>
#include <vector>

#include "rbb/digest.hpp"
#include "rbb/params.hpp"
#include "rbb/utxo.hpp"

namespace rbb {

// Which replicas verify a transaction. The 2t+1 assigned verifiers are a
// contiguous id window starting at a pseudo-random offset derived from the
// transaction id and the consensus instance: the first t+1 (primary) verify
// immediately, the next t (extension) only verify if the primary quorum is
// late. Every correct replica computes the same window with no extra
// communication, and t+1 matching verdicts always exist because at least
// t+1 of the assigned verifiers are correct.
struct VerifierAssignment {
  std::vector<NodeId> verifiers;  // size 2t+1: [0..t] primary, [t+1..2t] extension
  uint16_t primary_count = 0;     // t+1

  bool is_assigned(NodeId id) const;
  bool is_primary(NodeId id) const;
  bool is_extension(NodeId id) const;
};

VerifierAssignment assign_verifiers(const Digest& txid, uint64_t instance, const Params& p);

// Collects verdicts from assigned verifiers; finalizes at t+1 matching.
class VerdictTracker {
 public:
  VerdictTracker(const VerifierAssignment* a, uint16_t need) : assign_(a), need_(need) {}

  // True when this attestation newly finalizes the verdict. Unassigned
  // verifiers and duplicates are counted but otherwise ignored.
  bool add(NodeId verifier, Verdict v);

  bool finalized() const { return finalized_; }
  Verdict final_verdict() const { return final_; }
  uint16_t attestations() const { return total_; }
  uint32_t ignored() const { return ignored_; }

 private:
  const VerifierAssignment* assign_;
  uint16_t need_;
  std::map<Verdict, std::set<NodeId>> votes_;
  std::set<NodeId> voted_;
  bool finalized_ = false;
  Verdict final_ = Verdict::Valid;
  uint16_t total_ = 0;
  uint32_t ignored_ = 0;
};

}  // namespace rbb
