#include "rbb/utxo.hpp"

#include <algorithm>

#include "rbb/serialize.hpp"

namespace rbb {

bool VerifyCache::check(const PublicKey& pk, const Digest& msg_hash, const Signature& sig) {
  ByteWriter w;
  w.raw(ByteSpan{pk.sec1.data(), pk.sec1.size()});
  w.digest(msg_hash);
  w.raw(ByteSpan{sig.rs.data(), sig.rs.size()});
  Digest key = sha256(w.bytes());
  auto it = seen_.find(key);
  if (it != seen_.end()) {
    ++hits_;
    return it->second;
  }
  ++misses_;
  bool ok = verify(pk, msg_hash, sig);
  seen_.emplace(key, ok);
  return ok;
}

SigVerifier plain_verifier() {
  return [](const PublicKey& pk, const Digest& h, const Signature& s) { return verify(pk, h, s); };
}

SigVerifier cached_verifier(VerifyCache& cache) {
  return [&cache](const PublicKey& pk, const Digest& h, const Signature& s) {
    return cache.check(pk, h, s);
  };
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Valid: return "Valid";
    case Verdict::BadSignature: return "BadSignature";
    case Verdict::MissingInput: return "MissingInput";
    case Verdict::DoubleSpendWithinBlock: return "DoubleSpendWithinBlock";
    case Verdict::OverSpend: return "OverSpend";
    case Verdict::Malformed: return "Malformed";
  }
  return "?";
}

const UtxoEntry* UtxoTable::find(const UtxoKey& k) const {
  auto it = entries_.find(k);
  return it == entries_.end() ? nullptr : &it->second;
}

void UtxoTable::insert(const UtxoKey& k, const UtxoEntry& e) {
  auto [it, fresh] = entries_.emplace(k, e);
  if (!fresh) throw LedgerFault("UTXO key already present");
  by_owner_[e.owner][k] = e.amount;
  supply_ += e.amount;
}

void UtxoTable::erase(const UtxoKey& k) {
  auto it = entries_.find(k);
  if (it == entries_.end()) throw LedgerFault("erasing unknown UTXO");
  supply_ -= it->second.amount;
  auto own = by_owner_.find(it->second.owner);
  own->second.erase(k);
  if (own->second.empty()) by_owner_.erase(own);
  entries_.erase(it);
}

Amount UtxoTable::balance(const Account& a) const {
  auto it = by_owner_.find(a);
  if (it == by_owner_.end()) return 0;
  Amount sum = 0;
  for (const auto& [k, amount] : it->second) sum += amount;
  return sum;
}

std::vector<std::pair<UtxoKey, UtxoEntry>> UtxoTable::utxos_of(const Account& a) const {
  std::vector<std::pair<UtxoKey, UtxoEntry>> out;
  auto it = by_owner_.find(a);
  if (it == by_owner_.end()) return out;
  out.reserve(it->second.size());
  for (const auto& [k, amount] : it->second) out.push_back({k, UtxoEntry{amount, a}});
  return out;
}

Digest UtxoTable::digest() const {
  ByteWriter w;
  w.u64(entries_.size());
  for (const auto& [k, e] : entries_) {
    w.digest(k.txid);
    w.u32(k.index);
    w.u64(e.amount);
    w.digest(e.owner);
  }
  return sha256(w.bytes());
}

namespace {

// Validation view: base table plus the effects of earlier transactions of
// the same block. `added`/`spent` are null for snapshot validation.
struct BlockView {
  const UtxoTable& base;
  const std::map<UtxoKey, UtxoEntry>* added = nullptr;  // created in-block (chains on)
  const std::set<UtxoKey>* spent = nullptr;             // consumed in-block

  const UtxoEntry* lookup(const UtxoKey& k) const {
    if (added) {
      auto it = added->find(k);
      if (it != added->end()) return &it->second;
    }
    return base.find(k);
  }
  bool consumed(const UtxoKey& k) const { return spent && spent->count(k); }
};

Verdict validate_in_view(const BlockView& view, const Transaction& tx, SigPolicy sig,
                         const SigVerifier& verifier) {
  // Structure first.
  if (tx.inputs.empty() || tx.outputs.empty()) return Verdict::Malformed;
  if (tx.inputs.size() > kMaxTxInputs || tx.outputs.size() > kMaxTxOutputs)
    return Verdict::Malformed;
  for (const TxOutput& o : tx.outputs)
    if (o.amount == 0) return Verdict::Malformed;
  {
    std::set<UtxoKey> seen;
    for (const TxInput& in : tx.inputs)
      if (!seen.insert(UtxoKey{in.txid, in.index}).second) return Verdict::Malformed;
  }

  // Referenced UTXOs must exist somewhere in the block's history.
  for (const TxInput& in : tx.inputs) {
    UtxoKey k{in.txid, in.index};
    if (!view.lookup(k) && !view.consumed(k)) return Verdict::MissingInput;
  }
  for (const TxInput& in : tx.inputs) {
    if (view.consumed(UtxoKey{in.txid, in.index})) return Verdict::DoubleSpendWithinBlock;
  }

  Amount in_sum = 0;
  for (const TxInput& in : tx.inputs) {
    const UtxoEntry* e = view.lookup(UtxoKey{in.txid, in.index});
    if (account_of(in.spender) != e->owner) return Verdict::BadSignature;
    in_sum += e->amount;
  }
  if (sig == SigPolicy::Check) {
    Digest h = tx.signing_hash();
    for (const TxInput& in : tx.inputs)
      if (!verifier(in.spender, h, in.sig)) return Verdict::BadSignature;
  }

  Amount out_sum = 0;
  for (const TxOutput& o : tx.outputs) out_sum += o.amount;
  if (out_sum != in_sum) return Verdict::OverSpend;

  return Verdict::Valid;
}

}  // namespace

Verdict validate_tx(const UtxoTable& table, const Transaction& tx, SigPolicy sig,
                    const SigVerifier& verifier) {
  return validate_in_view(BlockView{table}, tx, sig, verifier);
}

FilterResult filter_conflicts(const UtxoTable& table, const std::vector<Transaction>& txs,
                              SigPolicy sig, bool allow_chains, const SigVerifier& verifier) {
  FilterResult res;
  std::map<UtxoKey, UtxoEntry> added;
  std::set<UtxoKey> spent;
  BlockView view{table, allow_chains ? &added : nullptr, &spent};

  for (uint32_t i = 0; i < txs.size(); ++i) {
    const Transaction& tx = txs[i];
    Verdict v = validate_in_view(view, tx, sig, verifier);
    if (v != Verdict::Valid) {
      res.rejected.push_back({i, v});
      continue;
    }
    res.accepted.push_back(i);
    Digest txid = tx.id();
    for (const TxInput& in : tx.inputs) {
      UtxoKey k{in.txid, in.index};
      added.erase(k);
      spent.insert(k);
    }
    for (uint32_t j = 0; j < tx.outputs.size(); ++j)
      added.emplace(UtxoKey{txid, j}, UtxoEntry{tx.outputs[j].amount, tx.outputs[j].owner});
  }
  return res;
}

UtxoTable apply_block(UtxoTable table, const Block& b) {
  Amount before = table.total_supply();
  for (const Transaction& tx : b.txs) {
    for (const TxInput& in : tx.inputs) table.erase(UtxoKey{in.txid, in.index});
    Digest txid = tx.id();
    for (uint32_t j = 0; j < tx.outputs.size(); ++j)
      table.insert(UtxoKey{txid, j}, UtxoEntry{tx.outputs[j].amount, tx.outputs[j].owner});
  }
  if (table.total_supply() != before)
    throw LedgerFault("block does not conserve value");
  return table;
}

}  // namespace rbb
