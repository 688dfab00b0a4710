#pragma once

#include <cstdint>
#include <vector>

#include "rbb/crypto.hpp"
#include "rbb/digest.hpp"
#include "rbb/serialize.hpp"

namespace rbb {

using Amount = uint64_t;

// One spent UTXO. The spender reveals the public key whose hash is the
// UTXO's owner account and signs the transaction's signing hash with it.
struct TxInput {
  Digest txid;       // transaction that created the UTXO
  uint32_t index = 0;
  PublicKey spender;
  Signature sig;
};

struct TxOutput {
  Amount amount = 0;
  Account owner;
};

struct Transaction {
  std::vector<TxInput> inputs;
  std::vector<TxOutput> outputs;
  uint64_t nonce = 0;  // issuer-chosen uniquifier

  // Hash of the full encoding (signatures included): the transaction id.
  Digest id() const;
  // Hash of the encoding with signatures zeroed: what inputs sign.
  Digest signing_hash() const;

  void encode(ByteWriter& w) const;
  static Transaction decode(ByteReader& r);

  Bytes encoded() const;
  static Transaction from_bytes(ByteSpan b);  // rejects trailing bytes

  size_t encoded_size() const;
};

// Upper bounds enforced by decoders; a proposal can never allocate more
// than a few MB regardless of input bytes.
inline constexpr size_t kMaxTxInputs = 1024;
inline constexpr size_t kMaxTxOutputs = 1024;
inline constexpr size_t kMaxTxsPerProposal = 1 << 20;

struct BlockMeta {
  uint64_t instance = 0;        // consensus instance that produced the block
  uint64_t proposal_mask = 0;   // bit i set when proposer i's batch was included
};

struct Block {
  uint64_t index = 0;
  Digest prev;
  BlockMeta meta;
  std::vector<Transaction> txs;

  Digest id() const;
  void encode(ByteWriter& w) const;
  static Block decode(ByteReader& r);
  Bytes encoded() const;
  static Block from_bytes(ByteSpan b);
};

// Proposal payload broadcast by a proposer: an ordered batch of
// transactions. Encoded form is what reliable broadcast carries.
Bytes encode_tx_batch(const std::vector<Transaction>& txs);
std::vector<Transaction> decode_tx_batch(ByteSpan b, size_t max_txs);

}  // namespace rbb
