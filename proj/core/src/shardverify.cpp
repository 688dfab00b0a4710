#include "rbb/shardverify.hpp"

#include <algorithm>

#include "rbb/serialize.hpp"

namespace rbb {

bool VerifierAssignment::is_assigned(NodeId id) const {
  return std::find(verifiers.begin(), verifiers.end(), id) != verifiers.end();
}

bool VerifierAssignment::is_primary(NodeId id) const {
  auto it = std::find(verifiers.begin(), verifiers.end(), id);
  return it != verifiers.end() && static_cast<uint16_t>(it - verifiers.begin()) < primary_count;
}

bool VerifierAssignment::is_extension(NodeId id) const {
  return is_assigned(id) && !is_primary(id);
}

VerifierAssignment assign_verifiers(const Digest& txid, uint64_t instance, const Params& p) {
  ByteWriter w;
  w.digest(txid);
  w.u64(instance);
  uint64_t h = sha256(w.take()).prefix_u64() % p.n;

  VerifierAssignment a;
  a.primary_count = p.witness();  // t+1
  uint16_t count = std::min<uint16_t>(static_cast<uint16_t>(2 * p.t + 1), p.n);
  a.verifiers.reserve(count);
  for (uint16_t i = 0; i < count; ++i)
    a.verifiers.push_back(static_cast<NodeId>((h + i) % p.n));
  return a;
}

bool VerdictTracker::add(NodeId verifier, Verdict v) {
  if (!assign_->is_assigned(verifier) || voted_.count(verifier)) {
    ++ignored_;
    return false;
  }
  voted_.insert(verifier);
  ++total_;
  auto& set = votes_[v];
  set.insert(verifier);
  if (!finalized_ && set.size() >= need_) {
    finalized_ = true;
    final_ = v;
    return true;
  }
  return false;
}

}  // namespace rbb
