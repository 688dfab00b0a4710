#include <algorithm>

#include "rbb/replica.hpp"
#include "rbb/serialize.hpp"

// Leader-based baseline: one designated leader broadcasts the full batch,
// then two digest-only quorum phases commit it. Message depth is three.
// Every node verifies every transaction. The leader retries a height with a
// fresh attempt if it sees no decision in time; there is no leader change,
// so a crashed leader halts the protocol (a known property of this
// baseline, kept on purpose).

namespace rbb {

C1Height& ReplicaNode::c1(uint64_t k) { return c1_[k]; }

void ReplicaNode::c1_start_height(uint64_t k) {
  sim_->rebase_hop();
  // The height may already be decided from buffered quorums; verification
  // waits only for the local chain to catch up.
  c1_schedule_verify(k);
  if (self_ != cfg_.leader) return;
  C1Height& h = c1(k);
  if (h.delivered) return;
  uint32_t attempt = h.next_attempt++;
  C1Preprepare pp;
  pp.height = k;
  pp.attempt = attempt;
  pp.payload = make_bytes(encode_tx_batch(next_batch(k)));
  broadcast(make_msg(std::move(pp)), Chan::C1Payload);
  sim_->set_timer(cfg_.c1_retry_us, TimerFire{kC1Retry, k, attempt, 0});
}

void ReplicaNode::c1_on_preprepare(ActorId src, const C1Preprepare& m) {
  if (m.height <= finalized_ || m.height > next_height() + kMaxHeightSkew) return;
  if (static_cast<NodeId>(src) != cfg_.leader) return;
  C1Attempt& at = c1(m.height).attempts[m.attempt];
  if (!at.have_payload && m.payload) {
    at.have_payload = true;
    at.payload = m.payload;
    at.digest = sha256(*m.payload);
  }
  c1_try_progress(m.height, m.attempt);
}

void ReplicaNode::c1_on_prepare(ActorId src, const C1Prepare& m) {
  if (m.height <= finalized_ || m.height > next_height() + kMaxHeightSkew) return;
  C1Attempt& at = c1(m.height).attempts[m.attempt];
  at.prepares[m.digest].insert(static_cast<NodeId>(src));
  c1_try_progress(m.height, m.attempt);
}

void ReplicaNode::c1_on_commit(ActorId src, const C1Commit& m) {
  if (m.height <= finalized_ || m.height > next_height() + kMaxHeightSkew) return;
  C1Attempt& at = c1(m.height).attempts[m.attempt];
  at.commits[m.digest].insert(static_cast<NodeId>(src));
  c1_try_progress(m.height, m.attempt);
}

void ReplicaNode::c1_try_progress(uint64_t k, uint32_t attempt) {
  C1Height& h = c1_[k];
  C1Attempt& at = h.attempts[attempt];
  if (!at.have_payload) return;

  if (!at.prepare_sent) {
    at.prepare_sent = true;
    broadcast(make_msg(C1Prepare{k, attempt, at.digest}), Chan::C1Digest);
  }
  if (!at.commit_sent && at.prepares[at.digest].size() >= p_.quorum()) {
    at.commit_sent = true;
    broadcast(make_msg(C1Commit{k, attempt, at.digest}), Chan::C1Digest);
  }
  if (!h.delivered && at.commits[at.digest].size() >= p_.quorum()) {
    h.delivered = true;
    h.decided = at.payload;
    h.decided_hop = sim_->current_hop();
    c1_schedule_verify(k);
  }
}

void ReplicaNode::c1_schedule_verify(uint64_t k) {
  auto it = c1_.find(k);
  if (it == c1_.end()) return;
  C1Height& h = it->second;
  if (!h.delivered || h.verify_scheduled) return;
  if (k != next_height()) return;  // verify against the ledger as of k-1
  h.verify_scheduled = true;
  try {
    h.txs = decode_tx_batch(*h.decided, kMaxTxsPerProposal);
  } catch (const DecodeError&) {
    h.txs.clear();
  }
  sim_->set_timer(cfg_.verify_cost_us * static_cast<Time>(h.txs.size()),
                  TimerFire{kVerifyC1, k, 0, 0});
}

void ReplicaNode::c1_run_verify(uint64_t k) {
  auto it = c1_.find(k);
  if (it == c1_.end()) return;
  C1Height& h = it->second;
  if (k != next_height()) return;

  BlockStats st;
  st.candidate_txs = static_cast<uint32_t>(h.txs.size());
  for (const auto& tx : h.txs) env_.count_tx_verification(self_, tx.id());
  FilterResult fr = filter_conflicts(ledger_, h.txs, SigPolicy::Check,
                                     cfg_.allow_intra_block_chains, env_.tx_verifier());
  std::vector<Transaction> ordered;
  ordered.reserve(fr.accepted.size());
  for (uint32_t idx : fr.accepted) ordered.push_back(std::move(h.txs[idx]));
  st.invalid_txs = static_cast<uint32_t>(fr.rejected.size());

  commit_block(k, 1ull << cfg_.leader, std::move(ordered), st, h.decided_hop);
}

}  // namespace rbb
