#include "rbb/workload.hpp"

#include <algorithm>

#include "rbb/serialize.hpp"

namespace rbb {

SyntheticFeed::SyntheticFeed(const Params& p, uint32_t batch_size, uint64_t seed)
    : batch_size_(batch_size) {
  genesis_.tag = kGenesisTag;
  streams_.resize(p.n);  // any replica can be asked, the baseline leader included
  uint64_t seq = 0;
  for (uint16_t i = 0; i < streams_.size(); ++i) {
    Stream& s = streams_[i];
    ByteWriter w;
    w.u64(seed);
    w.u16(i);
    w.raw(ByteSpan{reinterpret_cast<const uint8_t*>("feed-stream"), 11});
    Digest seed = sha256(w.take());
    s.keys = keygen(ByteSpan{seed.data(), Digest::kSize});
    s.account = account_of(s.keys.pk);
    genesis_.grants.push_back({s.account, kSlotAmount, batch_size_});
    s.tip.reserve(batch_size_);
    for (uint32_t j = 0; j < batch_size_; ++j) s.tip.push_back(genesis_key(genesis_.tag, seq++));
  }
}

const std::vector<Transaction>& SyntheticFeed::batch(NodeId proposer, uint64_t height) {
  Stream& s = streams_.at(proposer);
  while (s.built < height) {
    uint64_t k = s.built + 1;
    std::vector<Transaction> txs;
    txs.reserve(batch_size_);
    for (uint32_t j = 0; j < batch_size_; ++j) {
      Transaction tx;
      tx.nonce = (static_cast<uint64_t>(proposer) << 48) | (k << 16) | j;
      tx.inputs.push_back({s.tip[j].txid, s.tip[j].index, s.keys.pk, Signature{}});
      tx.outputs.push_back({kSlotAmount, s.account});
      tx.inputs[0].sig = sign(s.keys.sk, tx.signing_hash());
      s.tip[j] = UtxoKey{tx.id(), 0};
      txs.push_back(std::move(tx));
    }
    s.batches.emplace(k, std::move(txs));
    s.built = k;
  }
  return s.batches.at(height);
}

Requester::Requester(RequesterEnv& env, Config cfg)
    : env_(env), cfg_(std::move(cfg)), rng_(cfg_.rng_seed) {}

void Requester::on_start(Simulator& sim) {
  // Stagger first polls so the clients do not fire in lockstep.
  sim.set_timer(static_cast<Time>(rng_.below(static_cast<uint64_t>(cfg_.poll_us) + 1)),
                TimerFire{1, 0, 0, 0});
}

void Requester::on_timer(Simulator& sim, const TimerFire&) {
  poll(sim);
  sim.set_timer(cfg_.poll_us, TimerFire{1, 0, 0, 0});
}

void Requester::poll(Simulator& sim) {
  ++rid_;
  rid_done_ = false;
  replies_.clear();
  for (ActorId c : cfg_.connections) {
    sim.send(c, make_msg(UtxoQuery{cfg_.account, rid_}));
    env_.note_read();
    ++polls_;
  }
}

void Requester::on_message(Simulator& sim, ActorId, const Message& m) {
  const auto* r = std::get_if<UtxoReply>(&m);
  if (!r || r->rid != rid_ || rid_done_) return;
  replies_.push_back(r->utxos);

  // t+1 identical views make the set authoritative.
  const uint16_t need = static_cast<uint16_t>(cfg_.connections.size() / 2 + 1);
  for (const auto& view : replies_) {
    uint16_t same = 0;
    for (const auto& other : replies_)
      if (other == view) ++same;
    if (same >= need) {
      rid_done_ = true;
      spend(sim, view);
      return;
    }
  }
}

void Requester::spend(Simulator& sim, const UtxoSet& agreed) {
  for (const auto& [txid, index, amount] : agreed) {
    if (!spent_.insert({txid, index}).second) continue;  // already spent, commit pending
    Transaction tx;
    tx.nonce = (static_cast<uint64_t>(cfg_.index) << 32) | submitted_;
    tx.inputs.push_back({txid, index, cfg_.keys.pk, Signature{}});
    const Account& to =
        cfg_.peers.empty() ? cfg_.account : cfg_.peers[rng_.below(cfg_.peers.size())];
    if (amount > cfg_.payment) {
      tx.outputs.push_back({cfg_.payment, to});
      tx.outputs.push_back({amount - cfg_.payment, cfg_.account});
    } else {
      tx.outputs.push_back({amount, to});
    }
    tx.inputs[0].sig = sign(cfg_.keys.sk, tx.signing_hash());

    auto ptr = std::make_shared<const Transaction>(std::move(tx));
    env_.note_submit(ptr->id());
    ++submitted_;
    for (ActorId p : cfg_.submit_to) sim.send(p, make_msg(TxSubmit{ptr}));
  }
}

}  // namespace rbb
