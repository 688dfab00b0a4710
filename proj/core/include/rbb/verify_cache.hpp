#pragma once

#include <cstdint>
#include <functional>
#include <unordered_map>

#include "rbb/crypto.hpp"

namespace rbb {

// Signature verification is a pure function, so a process-wide cache can
// answer repeats instantly. The simulation still *accounts* one logical
// verification per replica that performs it; the cache only avoids paying
// the native EC cost for every copy.
class VerifyCache {
 public:
  bool check(const PublicKey& pk, const Digest& msg_hash, const Signature& sig);

  uint64_t hits() const { return hits_; }
  uint64_t misses() const { return misses_; }

 private:
  std::unordered_map<Digest, bool, DigestHash> seen_;
  uint64_t hits_ = 0;
  uint64_t misses_ = 0;
};

// Verification hook used by the ledger: defaults to raw crypto, tests and
// the simulator bind a cache (and counting) here.
using SigVerifier = std::function<bool(const PublicKey&, const Digest&, const Signature&)>;

SigVerifier plain_verifier();
SigVerifier cached_verifier(VerifyCache& cache);

}  // namespace rbb
