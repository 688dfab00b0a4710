#include "doctest.h"

#include "rbb/crypto.hpp"
#include "rbb/digest.hpp"
#include "rbb/rng.hpp"
#include "rbb/serialize.hpp"
#include "rbb/tx.hpp"

using namespace rbb;

namespace {

Bytes str_bytes(const char* s) {
  const auto* p = reinterpret_cast<const uint8_t*>(s);
  return Bytes(p, p + std::string(s).size());
}

KeyPair test_keys(uint64_t salt) {
  ByteWriter w;
  w.u64(salt);
  w.u64(0x6b657973);
  Digest d = sha256(w.bytes());
  return keygen(ByteSpan{d.data(), Digest::kSize});
}

}  // namespace

TEST_CASE("sha256 known vectors") {
  CHECK(sha256(ByteSpan{}).hex() ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256(str_bytes("abc")).hex() ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("digest hex roundtrip and prefix") {
  Digest d = sha256(str_bytes("roundtrip"));
  CHECK(Digest::from_hex_str(d.hex()) == d);

  // prefix_u64 reads the first eight bytes little-endian
  uint64_t expect = 0;
  for (int i = 7; i >= 0; --i) expect = (expect << 8) | d.data()[i];
  CHECK(d.prefix_u64() == expect);

  CHECK_THROWS(Digest::from_hex_str("zz"));
  CHECK_THROWS(Digest::from_hex_str("ab"));  // too short
}

TEST_CASE("byte codec roundtrip") {
  ByteWriter w;
  w.u8(0x1f);
  w.u16(0xbeef);
  w.u32(0xdeadbeef);
  w.u64(0x0123456789abcdefULL);
  Bytes blob = str_bytes("payload");
  w.var_bytes(ByteSpan{blob.data(), blob.size()});
  Digest d = sha256(blob);
  w.digest(d);

  ByteReader r(ByteSpan{w.bytes().data(), w.bytes().size()});
  CHECK(r.u8() == 0x1f);
  CHECK(r.u16() == 0xbeef);
  CHECK(r.u32() == 0xdeadbeef);
  CHECK(r.u64() == 0x0123456789abcdefULL);
  ByteSpan back = r.var_bytes(1024);
  CHECK(Bytes(back.begin(), back.end()) == blob);
  CHECK(r.digest() == d);
  CHECK(r.remaining() == 0);
  CHECK_NOTHROW(r.expect_done());
}

TEST_CASE("byte codec rejects truncation, oversize and trailing bytes") {
  ByteWriter w;
  w.u32(7);
  Bytes enc = w.take();

  ByteReader small(ByteSpan{enc.data(), 2});
  CHECK_THROWS_AS(small.u32(), DecodeError);

  ByteWriter w2;
  Bytes big(100, 9);
  w2.var_bytes(ByteSpan{big.data(), big.size()});
  Bytes enc2 = w2.take();
  ByteReader r2(ByteSpan{enc2.data(), enc2.size()});
  CHECK_THROWS_AS(r2.var_bytes(99), DecodeError);  // above the caller's cap

  ByteReader r3(ByteSpan{enc.data(), enc.size()});
  r3.u16();
  CHECK_THROWS_AS(r3.expect_done(), DecodeError);
}

TEST_CASE("keygen is deterministic and rejects the zero seed") {
  KeyPair a = test_keys(1);
  KeyPair b = test_keys(1);
  KeyPair c = test_keys(2);
  CHECK(a.pk == b.pk);
  CHECK(a.sk.d == b.sk.d);
  CHECK_FALSE(a.pk == c.pk);
  CHECK(account_of(a.pk) == sha256(ByteSpan{a.pk.sec1.data(), a.pk.sec1.size()}));

  std::array<uint8_t, 32> zero{};
  CHECK_THROWS(keygen(ByteSpan{zero.data(), zero.size()}));
}

TEST_CASE("sign/verify roundtrip across many keys and messages") {
  Rng rng(42);
  for (int i = 0; i < 200; ++i) {
    KeyPair kp = test_keys(rng.next());
    ByteWriter w;
    w.u64(rng.next());
    Digest msg = sha256(w.bytes());
    Signature sig = sign(kp.sk, msg);
    CHECK(verify(kp.pk, msg, sig));

    // deterministic nonces: same (key, message) gives the same signature
    CHECK(sign(kp.sk, msg) == sig);
  }
}

TEST_CASE("verify rejects tampered signatures, messages and keys") {
  Rng rng(43);
  int rejected = 0;
  const int kCases = 150;
  for (int i = 0; i < kCases; ++i) {
    KeyPair kp = test_keys(rng.next());
    ByteWriter w;
    w.u64(rng.next());
    Digest msg = sha256(w.bytes());
    Signature sig = sign(kp.sk, msg);

    switch (i % 3) {
      case 0: {  // flip one signature bit
        Signature bad = sig;
        bad.rs[rng.below(64)] ^= static_cast<uint8_t>(1u << rng.below(8));
        if (!verify(kp.pk, msg, bad)) ++rejected;
        break;
      }
      case 1: {  // different message
        ByteWriter w2;
        w2.u64(rng.next());
        if (!verify(kp.pk, sha256(w2.bytes()), sig)) ++rejected;
        break;
      }
      case 2: {  // different key
        KeyPair other = test_keys(rng.next());
        if (!verify(other.pk, msg, sig)) ++rejected;
        break;
      }
    }
  }
  CHECK(rejected == kCases);
}

TEST_CASE("transaction encoding roundtrips and ids are stable") {
  KeyPair kp = test_keys(7);
  Transaction tx;
  tx.nonce = 99;
  tx.inputs.push_back({sha256(str_bytes("src")), 3, kp.pk, Signature{}});
  tx.outputs.push_back({25, account_of(kp.pk)});
  tx.outputs.push_back({75, sha256(str_bytes("other"))});
  tx.inputs[0].sig = sign(kp.sk, tx.signing_hash());

  Bytes enc = tx.encoded();
  CHECK(enc.size() == tx.encoded_size());
  Transaction back = Transaction::from_bytes(ByteSpan{enc.data(), enc.size()});
  CHECK(back.id() == tx.id());
  CHECK(back.nonce == tx.nonce);
  CHECK(back.inputs[0].sig == tx.inputs[0].sig);

  // the signing hash covers everything but the signatures
  Transaction unsigned_tx = tx;
  unsigned_tx.inputs[0].sig = Signature{};
  CHECK(unsigned_tx.signing_hash() == tx.signing_hash());
  CHECK_FALSE(unsigned_tx.id() == tx.id());

  unsigned_tx.nonce = 100;
  CHECK_FALSE(unsigned_tx.signing_hash() == tx.signing_hash());

  enc.push_back(0);
  CHECK_THROWS_AS(Transaction::from_bytes(ByteSpan{enc.data(), enc.size()}), DecodeError);
}

TEST_CASE("malformed transaction encodings are rejected, not crashed on") {
  Rng rng(17);
  KeyPair kp = test_keys(5);
  Transaction tx;
  tx.nonce = 1;
  tx.inputs.push_back({sha256(str_bytes("a")), 0, kp.pk, Signature{}});
  tx.outputs.push_back({10, account_of(kp.pk)});
  tx.inputs[0].sig = sign(kp.sk, tx.signing_hash());
  Bytes enc = tx.encoded();

  for (int i = 0; i < 500; ++i) {
    Bytes mutated = enc;
    size_t cut = rng.below(mutated.size());
    mutated.resize(cut);  // truncations
    try {
      Transaction::from_bytes(ByteSpan{mutated.data(), mutated.size()});
    } catch (const DecodeError&) {
    }
    Bytes flipped = enc;
    flipped[rng.below(flipped.size())] ^= static_cast<uint8_t>(1 + rng.below(255));
    try {
      Transaction::from_bytes(ByteSpan{flipped.data(), flipped.size()});
    } catch (const DecodeError&) {
    }
  }
  CHECK(true);  // reaching here means no crash and no foreign exception
}

TEST_CASE("tx batch codec enforces its caps") {
  KeyPair kp = test_keys(11);
  std::vector<Transaction> txs;
  for (uint64_t i = 0; i < 5; ++i) {
    Transaction tx;
    tx.nonce = i;
    tx.inputs.push_back({sha256(str_bytes("in")), static_cast<uint32_t>(i), kp.pk, Signature{}});
    tx.outputs.push_back({1, account_of(kp.pk)});
    tx.inputs[0].sig = sign(kp.sk, tx.signing_hash());
    txs.push_back(std::move(tx));
  }
  Bytes enc = encode_tx_batch(txs);
  auto back = decode_tx_batch(ByteSpan{enc.data(), enc.size()}, kMaxTxsPerProposal);
  REQUIRE(back.size() == txs.size());
  for (size_t i = 0; i < txs.size(); ++i) CHECK(back[i].id() == txs[i].id());

  CHECK_THROWS_AS(decode_tx_batch(ByteSpan{enc.data(), enc.size()}, 4), DecodeError);
}

TEST_CASE("block ids commit to content and order") {
  Block b;
  b.index = 4;
  b.prev = sha256(str_bytes("prev"));
  b.meta.instance = 5;
  b.meta.proposal_mask = 0b1011;

  Bytes enc = b.encoded();
  Block back = Block::from_bytes(ByteSpan{enc.data(), enc.size()});
  CHECK(back.id() == b.id());
  CHECK(back.meta.proposal_mask == b.meta.proposal_mask);

  Block other = b;
  other.meta.proposal_mask = 0b1101;
  CHECK_FALSE(other.id() == b.id());
}

TEST_CASE("rng streams are stable") {
  Rng a(12345);
  // frozen first draw of splitmix64 seeded with 12345
  CHECK(a.next() == 0x22118258a9d111a0ULL);

  Rng b(12345);
  CHECK(b.next() == 0x22118258a9d111a0ULL);
  CHECK(b.below(10) < 10);

  Rng c(12345);
  c.next();
  Rng fork1 = c.fork(7);
  Rng c2(12345);
  c2.next();
  Rng fork2 = c2.fork(7);
  CHECK(fork1.next() == fork2.next());
}
