#pragma once

#include <variant>
#include <vector>

#include "rbb/tx.hpp"

namespace rbb {

// Wire protocol between replicas and clients. Every message has a canonical
// encoding; the simulator charges links for the encoded size.

// --- reliable broadcast (per height, per proposer) ---
struct RbInit {
  uint64_t height = 0;
  uint16_t proposer = 0;
  BytesPtr payload;
};
struct RbEcho {
  uint64_t height = 0;
  uint16_t proposer = 0;
  Digest digest;
};
struct RbReady {
  uint64_t height = 0;
  uint16_t proposer = 0;
  Digest digest;
};
struct RbFetchReq {
  uint64_t height = 0;
  uint16_t proposer = 0;
  Digest digest;
};
struct RbFetchResp {
  uint64_t height = 0;
  uint16_t proposer = 0;
  BytesPtr payload;
};

// --- binary consensus (per height, one instance per proposer) ---
struct BinEst {
  uint64_t height = 0;
  uint16_t inst = 0;
  uint32_t round = 0;
  uint8_t value = 0;
};
struct BinAux {
  uint64_t height = 0;
  uint16_t inst = 0;
  uint32_t round = 0;
  uint8_t value = 0;
};
struct BinCoord {
  uint64_t height = 0;
  uint16_t inst = 0;
  uint32_t round = 0;
  uint8_t value = 0;
};

// --- sharded verification ---
// One signed message carries all of a verifier's verdicts for a height:
// (candidate index, verdict) pairs.
struct Attest {
  uint64_t height = 0;
  uint16_t verifier = 0;
  std::vector<std::pair<uint32_t, uint8_t>> verdicts;
  Signature sig;
};

Digest attest_signing_hash(const Attest& a);

// --- leader-based baseline ---
struct C1Preprepare {
  uint64_t height = 0;
  uint32_t attempt = 0;
  BytesPtr payload;
};
struct C1Prepare {
  uint64_t height = 0;
  uint32_t attempt = 0;
  Digest digest;
};
struct C1Commit {
  uint64_t height = 0;
  uint32_t attempt = 0;
  Digest digest;
};

// --- client traffic ---
struct TxSubmit {
  std::shared_ptr<const Transaction> tx;
};
struct UtxoQuery {
  Account account;
  uint64_t rid = 0;  // echoed in the reply
};
struct UtxoReply {
  Account account;
  uint64_t rid = 0;
  std::vector<std::tuple<Digest, uint32_t, Amount>> utxos;  // (txid, index, amount)
};

using Message =
    std::variant<RbInit, RbEcho, RbReady, RbFetchReq, RbFetchResp, BinEst, BinAux, BinCoord,
                 Attest, C1Preprepare, C1Prepare, C1Commit, TxSubmit, UtxoQuery, UtxoReply>;
using MsgPtr = std::shared_ptr<const Message>;

template <typename M>
MsgPtr make_msg(M&& m) {
  return std::make_shared<const Message>(std::forward<M>(m));
}

// Traffic class for byte accounting.
enum class Chan : uint8_t {
  RbPayload = 0,  // INIT
  RbDigest,       // ECHO + READY
  RbFetch,        // FETCH_REQ + FETCH_RESP
  Bin,            // EST + AUX + COORD
  Attest,
  C1Payload,      // PRE_PREPARE
  C1Digest,       // PREPARE + COMMIT
  Client,
};
inline constexpr size_t kChanCount = 8;
const char* chan_name(Chan c);

// Decode bounds.
inline constexpr size_t kMaxPayload = 64u << 20;
inline constexpr size_t kMaxVerdicts = 1u << 22;
inline constexpr size_t kMaxReplyUtxos = 1u << 22;

Chan chan_of(const Message& m);

Bytes encode_message(const Message& m);
Message decode_message(ByteSpan b);  // throws DecodeError
size_t wire_size(const Message& m);  // == encode_message(m).size(), computed cheaply

}  // namespace rbb
