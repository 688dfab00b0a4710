#include "rbb/messages.hpp"

#include "rbb/serialize.hpp"
#include "rbb/utxo.hpp"

namespace rbb {

namespace {

enum class Tag : uint8_t {
  RbInit = 1,
  RbEcho,
  RbReady,
  RbFetchReq,
  RbFetchResp,
  BinEst,
  BinAux,
  BinCoord,
  Attest,
  C1Preprepare,
  C1Prepare,
  C1Commit,
  TxSubmit,
  UtxoQuery,
  UtxoReply,
};

void put_payload(ByteWriter& w, const BytesPtr& p) {
  if (p)
    w.var_bytes(ByteSpan{p->data(), p->size()});
  else
    w.var_bytes({});
}

BytesPtr get_payload(ByteReader& r) {
  ByteSpan s = r.var_bytes(kMaxPayload);
  return make_bytes(Bytes(s.begin(), s.end()));
}

}  // namespace

const char* chan_name(Chan c) {
  switch (c) {
    case Chan::RbPayload: return "rb_payload";
    case Chan::RbDigest: return "rb_digest";
    case Chan::RbFetch: return "rb_fetch";
    case Chan::Bin: return "bin";
    case Chan::Attest: return "attest";
    case Chan::C1Payload: return "c1_payload";
    case Chan::C1Digest: return "c1_digest";
    case Chan::Client: return "client";
  }
  return "?";
}

Chan chan_of(const Message& m) {
  struct V {
    Chan operator()(const RbInit&) { return Chan::RbPayload; }
    Chan operator()(const RbEcho&) { return Chan::RbDigest; }
    Chan operator()(const RbReady&) { return Chan::RbDigest; }
    Chan operator()(const RbFetchReq&) { return Chan::RbFetch; }
    Chan operator()(const RbFetchResp&) { return Chan::RbFetch; }
    Chan operator()(const BinEst&) { return Chan::Bin; }
    Chan operator()(const BinAux&) { return Chan::Bin; }
    Chan operator()(const BinCoord&) { return Chan::Bin; }
    Chan operator()(const Attest&) { return Chan::Attest; }
    Chan operator()(const C1Preprepare&) { return Chan::C1Payload; }
    Chan operator()(const C1Prepare&) { return Chan::C1Digest; }
    Chan operator()(const C1Commit&) { return Chan::C1Digest; }
    Chan operator()(const TxSubmit&) { return Chan::Client; }
    Chan operator()(const UtxoQuery&) { return Chan::Client; }
    Chan operator()(const UtxoReply&) { return Chan::Client; }
  };
  return std::visit(V{}, m);
}

Digest attest_signing_hash(const Attest& a) {
  ByteWriter w;
  const char* domain = "rbb-attest";
  w.raw(ByteSpan{reinterpret_cast<const uint8_t*>(domain), 10});
  w.u64(a.height);
  w.u16(a.verifier);
  w.u32(static_cast<uint32_t>(a.verdicts.size()));
  for (const auto& [idx, v] : a.verdicts) {
    w.u32(idx);
    w.u8(v);
  }
  return sha256(w.bytes());
}

Bytes encode_message(const Message& m) {
  ByteWriter w;
  struct V {
    ByteWriter& w;
    void operator()(const RbInit& x) {
      w.u8(static_cast<uint8_t>(Tag::RbInit));
      w.u64(x.height);
      w.u16(x.proposer);
      put_payload(w, x.payload);
    }
    void operator()(const RbEcho& x) {
      w.u8(static_cast<uint8_t>(Tag::RbEcho));
      w.u64(x.height);
      w.u16(x.proposer);
      w.digest(x.digest);
    }
    void operator()(const RbReady& x) {
      w.u8(static_cast<uint8_t>(Tag::RbReady));
      w.u64(x.height);
      w.u16(x.proposer);
      w.digest(x.digest);
    }
    void operator()(const RbFetchReq& x) {
      w.u8(static_cast<uint8_t>(Tag::RbFetchReq));
      w.u64(x.height);
      w.u16(x.proposer);
      w.digest(x.digest);
    }
    void operator()(const RbFetchResp& x) {
      w.u8(static_cast<uint8_t>(Tag::RbFetchResp));
      w.u64(x.height);
      w.u16(x.proposer);
      put_payload(w, x.payload);
    }
    void operator()(const BinEst& x) { bin(Tag::BinEst, x.height, x.inst, x.round, x.value); }
    void operator()(const BinAux& x) { bin(Tag::BinAux, x.height, x.inst, x.round, x.value); }
    void operator()(const BinCoord& x) { bin(Tag::BinCoord, x.height, x.inst, x.round, x.value); }
    void bin(Tag t, uint64_t h, uint16_t inst, uint32_t round, uint8_t value) {
      w.u8(static_cast<uint8_t>(t));
      w.u64(h);
      w.u16(inst);
      w.u32(round);
      w.u8(value);
    }
    void operator()(const Attest& x) {
      w.u8(static_cast<uint8_t>(Tag::Attest));
      w.u64(x.height);
      w.u16(x.verifier);
      w.u32(static_cast<uint32_t>(x.verdicts.size()));
      for (const auto& [idx, v] : x.verdicts) {
        w.u32(idx);
        w.u8(v);
      }
      w.raw(ByteSpan{x.sig.rs.data(), x.sig.rs.size()});
    }
    void operator()(const C1Preprepare& x) {
      w.u8(static_cast<uint8_t>(Tag::C1Preprepare));
      w.u64(x.height);
      w.u32(x.attempt);
      put_payload(w, x.payload);
    }
    void operator()(const C1Prepare& x) {
      w.u8(static_cast<uint8_t>(Tag::C1Prepare));
      w.u64(x.height);
      w.u32(x.attempt);
      w.digest(x.digest);
    }
    void operator()(const C1Commit& x) {
      w.u8(static_cast<uint8_t>(Tag::C1Commit));
      w.u64(x.height);
      w.u32(x.attempt);
      w.digest(x.digest);
    }
    void operator()(const TxSubmit& x) {
      w.u8(static_cast<uint8_t>(Tag::TxSubmit));
      x.tx->encode(w);
    }
    void operator()(const UtxoQuery& x) {
      w.u8(static_cast<uint8_t>(Tag::UtxoQuery));
      w.digest(x.account);
      w.u64(x.rid);
    }
    void operator()(const UtxoReply& x) {
      w.u8(static_cast<uint8_t>(Tag::UtxoReply));
      w.digest(x.account);
      w.u64(x.rid);
      w.u32(static_cast<uint32_t>(x.utxos.size()));
      for (const auto& [txid, index, amount] : x.utxos) {
        w.digest(txid);
        w.u32(index);
        w.u64(amount);
      }
    }
  };
  std::visit(V{w}, m);
  return w.take();
}

Message decode_message(ByteSpan b) {
  ByteReader r(b);
  Tag tag = static_cast<Tag>(r.u8());
  Message out;
  switch (tag) {
    case Tag::RbInit: {
      RbInit x;
      x.height = r.u64();
      x.proposer = r.u16();
      x.payload = get_payload(r);
      out = std::move(x);
      break;
    }
    case Tag::RbEcho: {
      RbEcho x;
      x.height = r.u64();
      x.proposer = r.u16();
      x.digest = r.digest();
      out = x;
      break;
    }
    case Tag::RbReady: {
      RbReady x;
      x.height = r.u64();
      x.proposer = r.u16();
      x.digest = r.digest();
      out = x;
      break;
    }
    case Tag::RbFetchReq: {
      RbFetchReq x;
      x.height = r.u64();
      x.proposer = r.u16();
      x.digest = r.digest();
      out = x;
      break;
    }
    case Tag::RbFetchResp: {
      RbFetchResp x;
      x.height = r.u64();
      x.proposer = r.u16();
      x.payload = get_payload(r);
      out = std::move(x);
      break;
    }
    case Tag::BinEst:
    case Tag::BinAux:
    case Tag::BinCoord: {
      uint64_t h = r.u64();
      uint16_t inst = r.u16();
      uint32_t round = r.u32();
      uint8_t value = r.u8();
      if (value > 1) throw DecodeError("binary value out of range");
      if (tag == Tag::BinEst)
        out = BinEst{h, inst, round, value};
      else if (tag == Tag::BinAux)
        out = BinAux{h, inst, round, value};
      else
        out = BinCoord{h, inst, round, value};
      break;
    }
    case Tag::Attest: {
      Attest x;
      x.height = r.u64();
      x.verifier = r.u16();
      uint32_t n = r.u32();
      if (n > kMaxVerdicts) throw DecodeError("too many verdicts");
      x.verdicts.reserve(n);
      for (uint32_t i = 0; i < n; ++i) {
        uint32_t idx = r.u32();
        uint8_t v = r.u8();
        if (v > static_cast<uint8_t>(Verdict::Malformed)) throw DecodeError("bad verdict");
        x.verdicts.push_back({idx, v});
      }
      ByteSpan sig = r.raw(64);
      std::copy(sig.begin(), sig.end(), x.sig.rs.begin());
      out = std::move(x);
      break;
    }
    case Tag::C1Preprepare: {
      C1Preprepare x;
      x.height = r.u64();
      x.attempt = r.u32();
      x.payload = get_payload(r);
      out = std::move(x);
      break;
    }
    case Tag::C1Prepare: {
      C1Prepare x;
      x.height = r.u64();
      x.attempt = r.u32();
      x.digest = r.digest();
      out = x;
      break;
    }
    case Tag::C1Commit: {
      C1Commit x;
      x.height = r.u64();
      x.attempt = r.u32();
      x.digest = r.digest();
      out = x;
      break;
    }
    case Tag::TxSubmit: {
      TxSubmit x;
      x.tx = std::make_shared<const Transaction>(Transaction::decode(r));
      out = std::move(x);
      break;
    }
    case Tag::UtxoQuery: {
      UtxoQuery x;
      x.account = r.digest();
      x.rid = r.u64();
      out = x;
      break;
    }
    case Tag::UtxoReply: {
      UtxoReply x;
      x.account = r.digest();
      x.rid = r.u64();
      uint32_t n = r.u32();
      if (n > kMaxReplyUtxos) throw DecodeError("too many utxos in reply");
      x.utxos.reserve(n);
      for (uint32_t i = 0; i < n; ++i) {
        Digest txid = r.digest();
        uint32_t index = r.u32();
        Amount amount = r.u64();
        x.utxos.push_back({txid, index, amount});
      }
      out = std::move(x);
      break;
    }
    default:
      throw DecodeError("unknown message tag");
  }
  r.expect_done();
  return out;
}

size_t wire_size(const Message& m) {
  struct V {
    size_t operator()(const RbInit& x) { return 1 + 8 + 2 + 4 + (x.payload ? x.payload->size() : 0); }
    size_t operator()(const RbEcho&) { return 1 + 8 + 2 + 32; }
    size_t operator()(const RbReady&) { return 1 + 8 + 2 + 32; }
    size_t operator()(const RbFetchReq&) { return 1 + 8 + 2 + 32; }
    size_t operator()(const RbFetchResp& x) {
      return 1 + 8 + 2 + 4 + (x.payload ? x.payload->size() : 0);
    }
    size_t operator()(const BinEst&) { return 1 + 8 + 2 + 4 + 1; }
    size_t operator()(const BinAux&) { return 1 + 8 + 2 + 4 + 1; }
    size_t operator()(const BinCoord&) { return 1 + 8 + 2 + 4 + 1; }
    size_t operator()(const Attest& x) { return 1 + 8 + 2 + 4 + 5 * x.verdicts.size() + 64; }
    size_t operator()(const C1Preprepare& x) {
      return 1 + 8 + 4 + 4 + (x.payload ? x.payload->size() : 0);
    }
    size_t operator()(const C1Prepare&) { return 1 + 8 + 4 + 32; }
    size_t operator()(const C1Commit&) { return 1 + 8 + 4 + 32; }
    size_t operator()(const TxSubmit& x) { return 1 + x.tx->encoded_size(); }
    size_t operator()(const UtxoQuery&) { return 1 + 32 + 8; }
    size_t operator()(const UtxoReply& x) { return 1 + 32 + 8 + 4 + 44 * x.utxos.size(); }
  };
  return std::visit(V{}, m);
}

}  // namespace rbb
