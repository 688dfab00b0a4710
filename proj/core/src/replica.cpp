#include "rbb/replica.hpp"

#include <algorithm>

#include "rbb/serialize.hpp"

namespace rbb {

const char* protocol_name(Protocol p) { return p == Protocol::Rbbc ? "rbbc" : "cons1"; }

std::optional<Protocol> protocol_from_name(const std::string& s) {
  if (s == "rbbc") return Protocol::Rbbc;
  if (s == "cons1") return Protocol::Cons1;
  return std::nullopt;
}

ReplicaNode::ReplicaNode(ReplicaEnv& env, const Params& p, NodeId self, ReplicaConfig cfg,
                         UtxoTable genesis)
    : env_(env), p_(p), self_(self), cfg_(std::move(cfg)), ledger_(std::move(genesis)) {}

Digest ReplicaNode::chain_digest() const {
  ByteWriter w;
  for (const auto& b : chain_) w.digest(b.id());
  return sha256(w.take());
}

void ReplicaNode::on_start(Simulator& sim) {
  sim_ = &sim;
  if (cfg_.silent) return;
  if (cfg_.protocol == Protocol::Rbbc)
    sb_start_height(1);
  else
    c1_start_height(1);
}

void ReplicaNode::broadcast(const MsgPtr& m, Chan) {
  for (NodeId d = 0; d < p_.n; ++d) sim_->send(d, m);
}

void ReplicaNode::admit_to_mempool(const Transaction& tx) {
  // Structural admission only; signatures are the verifiers' job.
  if (tx.inputs.empty() || tx.outputs.empty()) return;
  if (tx.inputs.size() > kMaxTxInputs || tx.outputs.size() > kMaxTxOutputs) return;
  Digest id = tx.id();
  if (mempool_ids_.count(id) || committed_ids_.count(id)) return;
  mempool_ids_.insert(id);
  mempool_.push_back(tx);
}

std::vector<Transaction> ReplicaNode::next_batch(uint64_t height) {
  if (auto fed = env_.feed_batch(self_, height)) return std::move(*fed);
  std::vector<Transaction> out;
  while (!mempool_.empty() && out.size() < p_.beta) {
    Transaction tx = std::move(mempool_.front());
    mempool_.pop_front();
    Digest id = tx.id();
    mempool_ids_.erase(id);
    if (committed_ids_.count(id)) continue;
    out.push_back(std::move(tx));
  }
  return out;
}

void ReplicaNode::handle_client(ActorId src, const Message& m) {
  if (const auto* s = std::get_if<TxSubmit>(&m)) {
    if (s->tx) admit_to_mempool(*s->tx);
    return;
  }
  if (const auto* q = std::get_if<UtxoQuery>(&m)) {
    UtxoReply r;
    r.account = q->account;
    r.rid = q->rid;
    for (const auto& [key, entry] : ledger_.utxos_of(q->account)) {
      if (r.utxos.size() >= kMaxReplyUtxos) break;
      r.utxos.emplace_back(key.txid, key.index, entry.amount);
    }
    sim_->send(src, make_msg(std::move(r)));
    return;
  }
}

void ReplicaNode::on_message(Simulator& sim, ActorId src, const Message& m) {
  sim_ = &sim;
  if (cfg_.silent) return;

  if (std::holds_alternative<TxSubmit>(m) || std::holds_alternative<UtxoQuery>(m)) {
    handle_client(src, m);
    return;
  }

  if (cfg_.protocol == Protocol::Rbbc) {
    NodeId from = static_cast<NodeId>(src);
    auto live = [&](uint64_t k) { return k > finalized_ && k <= next_height() + kMaxHeightSkew; };
    if (const auto* v = std::get_if<RbInit>(&m)) {
      if (!live(v->height)) return;
      auto it = sb(v->height).rb.find(v->proposer);
      if (it != sb(v->height).rb.end()) it->second->on_init(from, *v);
    } else if (const auto* e = std::get_if<RbEcho>(&m)) {
      if (!live(e->height)) return;
      auto it = sb(e->height).rb.find(e->proposer);
      if (it != sb(e->height).rb.end()) it->second->on_echo(from, *e);
    } else if (const auto* r = std::get_if<RbReady>(&m)) {
      if (!live(r->height)) return;
      auto it = sb(r->height).rb.find(r->proposer);
      if (it != sb(r->height).rb.end()) it->second->on_ready(from, *r);
    } else if (const auto* f = std::get_if<RbFetchReq>(&m)) {
      if (!live(f->height)) return;
      auto it = sb(f->height).rb.find(f->proposer);
      if (it != sb(f->height).rb.end()) it->second->on_fetch_req(from, *f);
    } else if (const auto* fr = std::get_if<RbFetchResp>(&m)) {
      if (!live(fr->height)) return;
      auto it = sb(fr->height).rb.find(fr->proposer);
      if (it != sb(fr->height).rb.end()) it->second->on_fetch_resp(from, *fr);
    } else if (const auto* be = std::get_if<BinEst>(&m)) {
      if (!live(be->height)) return;
      auto it = sb(be->height).bin.find(be->inst);
      if (it != sb(be->height).bin.end()) it->second->on_est(from, *be);
    } else if (const auto* ba = std::get_if<BinAux>(&m)) {
      if (!live(ba->height)) return;
      auto it = sb(ba->height).bin.find(ba->inst);
      if (it != sb(ba->height).bin.end()) it->second->on_aux(from, *ba);
    } else if (const auto* bc = std::get_if<BinCoord>(&m)) {
      if (!live(bc->height)) return;
      auto it = sb(bc->height).bin.find(bc->inst);
      if (it != sb(bc->height).bin.end()) it->second->on_coord(from, *bc);
    } else if (const auto* a = std::get_if<Attest>(&m)) {
      sb_on_attest(src, *a);
    }
    return;
  }

  if (const auto* pp = std::get_if<C1Preprepare>(&m)) {
    c1_on_preprepare(src, *pp);
  } else if (const auto* pr = std::get_if<C1Prepare>(&m)) {
    c1_on_prepare(src, *pr);
  } else if (const auto* cm = std::get_if<C1Commit>(&m)) {
    c1_on_commit(src, *cm);
  }
}

void ReplicaNode::on_timer(Simulator& sim, const TimerFire& t) {
  sim_ = &sim;
  if (cfg_.silent) return;
  switch (t.kind) {
    case kBinRound: {
      if (t.a <= finalized_) return;
      auto it = sb_.find(t.a);
      if (it == sb_.end()) return;
      auto b = it->second.bin.find(static_cast<uint16_t>(t.b));
      if (b != it->second.bin.end()) b->second->on_round_timer(static_cast<uint32_t>(t.c));
      return;
    }
    case kRbFetch: {
      if (t.a <= finalized_) return;
      auto it = sb_.find(t.a);
      if (it == sb_.end()) return;
      auto r = it->second.rb.find(static_cast<uint16_t>(t.b));
      if (r != it->second.rb.end()) r->second->on_fetch_timer();
      return;
    }
    case kVerifyPrimary:
      if (t.a > finalized_) sb_run_primary(t.a);
      return;
    case kEscalation:
      if (t.a > finalized_) sb_run_escalation(t.a);
      return;
    case kFinalize:
      if (t.a > finalized_) sb_do_finalize(t.a);
      return;
    case kVerifyC1:
      if (t.a > finalized_) c1_run_verify(t.a);
      return;
    case kC1Retry: {
      if (t.a <= finalized_) return;
      auto it = c1_.find(t.a);
      if (it == c1_.end() || it->second.delivered) return;
      c1_start_height(t.a);  // resend with a fresh attempt
      return;
    }
    default:
      return;
  }
}

void ReplicaNode::commit_block(uint64_t height, uint64_t mask, std::vector<Transaction> ordered,
                               BlockStats st, uint32_t hop) {
  Block b;
  b.index = chain_.size();
  b.prev = chain_.empty() ? Digest{} : chain_.back().id();
  b.meta.instance = height;
  b.meta.proposal_mask = mask;
  b.txs = std::move(ordered);
  st.valid_txs = static_cast<uint32_t>(b.txs.size());

  ledger_ = apply_block(std::move(ledger_), b);
  for (const auto& tx : b.txs) {
    Digest id = tx.id();
    committed_ids_.insert(id);
    if (mempool_ids_.erase(id)) {
      auto it = std::find_if(mempool_.begin(), mempool_.end(),
                             [&](const Transaction& t) { return t.id() == id; });
      if (it != mempool_.end()) mempool_.erase(it);
    }
  }
  chain_.push_back(std::move(b));
  env_.block_committed(self_, chain_.back(), hop, st);

  finalized_ = height;
  sb_.erase(height);
  c1_.erase(height);

  if (cfg_.protocol == Protocol::Rbbc)
    sb_start_height(height + 1);
  else
    c1_start_height(height + 1);
}

}  // namespace rbb
