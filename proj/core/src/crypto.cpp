#include "rbb/crypto.hpp"

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/obj_mac.h>

#include <cstring>
#include <stdexcept>

#include "rbb/serialize.hpp"

// secp256k1 ECDSA on top of OpenSSL's EC/BN primitives. The high-level
// ECDSA_* interface is deprecated in OpenSSL 3; the group/point/bignum
// layer is not, and doing the signature equations by hand keeps the nonce
// derivation deterministic, which the simulator requires.

namespace rbb {
namespace {

struct BnFree {
  void operator()(BIGNUM* b) const { BN_free(b); }
};
using BnPtr = std::unique_ptr<BIGNUM, BnFree>;

struct Secp {
  EC_GROUP* group = nullptr;
  BIGNUM* order = nullptr;
  BIGNUM* half_order = nullptr;
  BN_CTX* ctx = nullptr;

  Secp() {
    group = EC_GROUP_new_by_curve_name(NID_secp256k1);
    ctx = BN_CTX_new();
    order = BN_new();
    half_order = BN_new();
    if (!group || !ctx || !order || !half_order ||
        !EC_GROUP_get_order(group, order, ctx) || !BN_rshift1(half_order, order)) {
      throw std::runtime_error("secp256k1 init failed");
    }
  }
  ~Secp() {
    BN_free(half_order);
    BN_free(order);
    BN_CTX_free(ctx);
    EC_GROUP_free(group);
  }
};

Secp& secp() {
  static thread_local Secp s;
  return s;
}

void bn_to_32be(const BIGNUM* b, uint8_t* out32) {
  if (BN_bn2binpad(b, out32, 32) != 32) throw std::runtime_error("bn2binpad failed");
}

// candidate = SHA256(domain || material...) interpreted as a big-endian
// integer; retried with an incrementing counter until it lands in [1, order).
BnPtr hash_to_scalar(const char* domain, ByteSpan a, ByteSpan b) {
  Secp& S = secp();
  for (uint32_t ctr = 0;; ++ctr) {
    ByteWriter w;
    w.raw(ByteSpan{reinterpret_cast<const uint8_t*>(domain), strlen(domain)});
    w.raw(a);
    w.raw(b);
    w.u32(ctr);
    Digest h = sha256(w.bytes());
    BnPtr k(BN_bin2bn(h.data(), 32, nullptr));
    if (!k) throw std::runtime_error("bin2bn failed");
    if (!BN_is_zero(k.get()) && BN_cmp(k.get(), S.order) < 0) return k;
  }
}

}  // namespace

KeyPair keygen(ByteSpan seed32) {
  if (seed32.size() != 32) throw std::invalid_argument("seed must be 32 bytes");
  bool all_zero = true;
  for (uint8_t b : seed32)
    if (b != 0) all_zero = false;
  if (all_zero) throw std::invalid_argument("all-zero seed is reserved");

  Secp& S = secp();
  BnPtr d = hash_to_scalar("rbb-keygen", seed32, {});

  EC_POINT* pub = EC_POINT_new(S.group);
  if (!pub || !EC_POINT_mul(S.group, pub, d.get(), nullptr, nullptr, S.ctx)) {
    EC_POINT_free(pub);
    throw std::runtime_error("pubkey derivation failed");
  }

  KeyPair kp;
  bn_to_32be(d.get(), kp.sk.d.data());
  size_t len = EC_POINT_point2oct(S.group, pub, POINT_CONVERSION_COMPRESSED,
                                  kp.pk.sec1.data(), kp.pk.sec1.size(), S.ctx);
  EC_POINT_free(pub);
  if (len != kp.pk.sec1.size()) throw std::runtime_error("point compression failed");
  return kp;
}

Account account_of(const PublicKey& pk) {
  return sha256(ByteSpan{pk.sec1.data(), pk.sec1.size()});
}

Signature sign(const SecretKey& sk, const Digest& msg_hash) {
  Secp& S = secp();
  BnPtr d(BN_bin2bn(sk.d.data(), 32, nullptr));
  BnPtr z(BN_bin2bn(msg_hash.data(), 32, nullptr));
  if (!d || !z) throw std::runtime_error("bin2bn failed");
  if (BN_is_zero(d.get()) || BN_cmp(d.get(), S.order) >= 0)
    throw std::invalid_argument("secret key out of range");

  BnPtr r(BN_new()), s(BN_new()), kinv(BN_new()), tmp(BN_new());
  EC_POINT* R = EC_POINT_new(S.group);
  if (!r || !s || !kinv || !tmp || !R) throw std::runtime_error("alloc failed");

  Signature out;
  for (uint32_t attempt = 0;; ++attempt) {
    // Deterministic nonce: hash of secret, message and attempt counter.
    uint8_t actr[4] = {static_cast<uint8_t>(attempt), static_cast<uint8_t>(attempt >> 8),
                       static_cast<uint8_t>(attempt >> 16), static_cast<uint8_t>(attempt >> 24)};
    ByteWriter mat;
    mat.raw(ByteSpan{sk.d.data(), 32});
    mat.raw(ByteSpan{msg_hash.data(), 32});
    mat.raw(ByteSpan{actr, 4});
    BnPtr k = hash_to_scalar("rbb-nonce", mat.bytes(), {});

    if (!EC_POINT_mul(S.group, R, k.get(), nullptr, nullptr, S.ctx))
      throw std::runtime_error("nonce point failed");
    if (!EC_POINT_get_affine_coordinates(S.group, R, tmp.get(), nullptr, S.ctx))
      throw std::runtime_error("affine coords failed");
    if (!BN_nnmod(r.get(), tmp.get(), S.order, S.ctx)) throw std::runtime_error("mod failed");
    if (BN_is_zero(r.get())) continue;

    // s = k^-1 (z + r d) mod order
    if (!BN_mod_inverse(kinv.get(), k.get(), S.order, S.ctx))
      throw std::runtime_error("mod inverse failed");
    if (!BN_mod_mul(tmp.get(), r.get(), d.get(), S.order, S.ctx) ||
        !BN_mod_add(tmp.get(), tmp.get(), z.get(), S.order, S.ctx) ||
        !BN_mod_mul(s.get(), kinv.get(), tmp.get(), S.order, S.ctx))
      throw std::runtime_error("sig arithmetic failed");
    if (BN_is_zero(s.get())) continue;

    // Canonical low-s form so each message has a single valid encoding.
    if (BN_cmp(s.get(), S.half_order) > 0) {
      if (!BN_sub(s.get(), S.order, s.get())) throw std::runtime_error("low-s failed");
    }
    bn_to_32be(r.get(), out.rs.data());
    bn_to_32be(s.get(), out.rs.data() + 32);
    break;
  }
  EC_POINT_free(R);
  return out;
}

bool verify(const PublicKey& pk, const Digest& msg_hash, const Signature& sig) {
  Secp& S = secp();
  BnPtr r(BN_bin2bn(sig.rs.data(), 32, nullptr));
  BnPtr s(BN_bin2bn(sig.rs.data() + 32, 32, nullptr));
  BnPtr z(BN_bin2bn(msg_hash.data(), 32, nullptr));
  if (!r || !s || !z) return false;
  if (BN_is_zero(r.get()) || BN_cmp(r.get(), S.order) >= 0) return false;
  if (BN_is_zero(s.get()) || BN_cmp(s.get(), S.order) >= 0) return false;

  EC_POINT* Q = EC_POINT_new(S.group);
  EC_POINT* R = EC_POINT_new(S.group);
  bool ok = false;
  do {
    if (!Q || !R) break;
    if (!EC_POINT_oct2point(S.group, Q, pk.sec1.data(), pk.sec1.size(), S.ctx)) break;

    BnPtr w(BN_new()), u1(BN_new()), u2(BN_new()), v(BN_new());
    if (!w || !u1 || !u2 || !v) break;
    if (!BN_mod_inverse(w.get(), s.get(), S.order, S.ctx)) break;
    if (!BN_mod_mul(u1.get(), z.get(), w.get(), S.order, S.ctx)) break;
    if (!BN_mod_mul(u2.get(), r.get(), w.get(), S.order, S.ctx)) break;
    // R' = u1*G + u2*Q
    if (!EC_POINT_mul(S.group, R, u1.get(), Q, u2.get(), S.ctx)) break;
    if (EC_POINT_is_at_infinity(S.group, R)) break;
    if (!EC_POINT_get_affine_coordinates(S.group, R, v.get(), nullptr, S.ctx)) break;
    if (!BN_nnmod(v.get(), v.get(), S.order, S.ctx)) break;
    ok = BN_cmp(v.get(), r.get()) == 0;
  } while (false);
  EC_POINT_free(R);
  EC_POINT_free(Q);
  return ok;
}

}  // namespace rbb
