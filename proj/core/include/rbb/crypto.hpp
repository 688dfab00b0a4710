#pragma once

#include <array>
#include <optional>

#include "rbb/bytes.hpp"
#include "rbb/digest.hpp"

namespace rbb {

// ECDSA over secp256k1. Signatures are fixed-size r||s (64 bytes), public
// keys are compressed SEC1 points (33 bytes). Signing uses a deterministic
// nonce derived from the secret key and message, so the whole system is
// reproducible from seeds alone.

struct SecretKey {
  std::array<uint8_t, 32> d{};
};

struct PublicKey {
  std::array<uint8_t, 33> sec1{};
  bool operator==(const PublicKey& o) const = default;
  auto operator<=>(const PublicKey& o) const = default;
};

struct Signature {
  std::array<uint8_t, 64> rs{};
  bool operator==(const Signature& o) const = default;
};

struct KeyPair {
  SecretKey sk;
  PublicKey pk;
};

// An account is the hash of the compressed public key.
using Account = Digest;

// Derives a key pair from 32 bytes of seed material. The seed is hashed to
// a scalar; all-zero/out-of-range candidates retry with a counter, so every
// seed yields a valid key. Throws std::invalid_argument only on an all-zero
// seed (reserved as "no key").
KeyPair keygen(ByteSpan seed32);

Account account_of(const PublicKey& pk);

// Signs the given 32-byte message hash.
Signature sign(const SecretKey& sk, const Digest& msg_hash);

// Pure function of (pk, msg_hash, sig): no state, safe to cache.
bool verify(const PublicKey& pk, const Digest& msg_hash, const Signature& sig);

}  // namespace rbb
