#include "rbb/tx.hpp"

namespace rbb {

namespace {

void encode_tx(ByteWriter& w, const Transaction& tx, bool zero_sigs) {
  w.u32(static_cast<uint32_t>(tx.inputs.size()));
  for (const TxInput& in : tx.inputs) {
    w.digest(in.txid);
    w.u32(in.index);
    w.raw(ByteSpan{in.spender.sec1.data(), in.spender.sec1.size()});
    if (zero_sigs) {
      uint8_t zeros[64] = {0};
      w.raw(ByteSpan{zeros, 64});
    } else {
      w.raw(ByteSpan{in.sig.rs.data(), in.sig.rs.size()});
    }
  }
  w.u32(static_cast<uint32_t>(tx.outputs.size()));
  for (const TxOutput& out : tx.outputs) {
    w.u64(out.amount);
    w.digest(out.owner);
  }
  w.u64(tx.nonce);
}

}  // namespace

void Transaction::encode(ByteWriter& w) const { encode_tx(w, *this, false); }

Transaction Transaction::decode(ByteReader& r) {
  Transaction tx;
  uint32_t nin = r.u32();
  if (nin > kMaxTxInputs) throw DecodeError("too many inputs");
  tx.inputs.resize(nin);
  for (TxInput& in : tx.inputs) {
    in.txid = r.digest();
    in.index = r.u32();
    ByteSpan pk = r.raw(33);
    std::copy(pk.begin(), pk.end(), in.spender.sec1.begin());
    ByteSpan sig = r.raw(64);
    std::copy(sig.begin(), sig.end(), in.sig.rs.begin());
  }
  uint32_t nout = r.u32();
  if (nout > kMaxTxOutputs) throw DecodeError("too many outputs");
  tx.outputs.resize(nout);
  for (TxOutput& out : tx.outputs) {
    out.amount = r.u64();
    out.owner = r.digest();
  }
  tx.nonce = r.u64();
  return tx;
}

Digest Transaction::id() const { return sha256(encoded()); }

Digest Transaction::signing_hash() const {
  ByteWriter w;
  encode_tx(w, *this, true);
  return sha256(w.bytes());
}

Bytes Transaction::encoded() const {
  ByteWriter w;
  encode(w);
  return w.take();
}

Transaction Transaction::from_bytes(ByteSpan b) {
  ByteReader r(b);
  Transaction tx = decode(r);
  r.expect_done();
  return tx;
}

size_t Transaction::encoded_size() const {
  return 4 + inputs.size() * (32 + 4 + 33 + 64) + 4 + outputs.size() * (8 + 32) + 8;
}

void Block::encode(ByteWriter& w) const {
  w.u64(index);
  w.digest(prev);
  w.u64(meta.instance);
  w.u64(meta.proposal_mask);
  w.u32(static_cast<uint32_t>(txs.size()));
  for (const Transaction& tx : txs) tx.encode(w);
}

Block Block::decode(ByteReader& r) {
  Block b;
  b.index = r.u64();
  b.prev = r.digest();
  b.meta.instance = r.u64();
  b.meta.proposal_mask = r.u64();
  uint32_t n = r.u32();
  if (n > kMaxTxsPerProposal) throw DecodeError("too many txs in block");
  b.txs.reserve(n);
  for (uint32_t i = 0; i < n; ++i) b.txs.push_back(Transaction::decode(r));
  return b;
}

Digest Block::id() const { return sha256(encoded()); }

Bytes Block::encoded() const {
  ByteWriter w;
  encode(w);
  return w.take();
}

Block Block::from_bytes(ByteSpan b) {
  ByteReader r(b);
  Block blk = Block::decode(r);
  r.expect_done();
  return blk;
}

Bytes encode_tx_batch(const std::vector<Transaction>& txs) {
  ByteWriter w;
  w.u32(static_cast<uint32_t>(txs.size()));
  for (const Transaction& tx : txs) tx.encode(w);
  return w.take();
}

std::vector<Transaction> decode_tx_batch(ByteSpan b, size_t max_txs) {
  ByteReader r(b);
  uint32_t n = r.u32();
  if (n > max_txs) throw DecodeError("batch exceeds proposal bound");
  std::vector<Transaction> txs;
  txs.reserve(n);
  for (uint32_t i = 0; i < n; ++i) txs.push_back(Transaction::decode(r));
  r.expect_done();
  return txs;
}

}  // namespace rbb
