#include <algorithm>

#include "rbb/replica.hpp"
#include "rbb/serialize.hpp"

// Superblock consensus: every proposer reliably broadcasts a batch, one
// binary consensus instance per proposer decides inclusion, and the block is
// the concatenation of the decided-1 batches in proposer-id order. Sharded
// verification then attests the candidate transactions; t+1 matching
// verdicts finalize each one.

namespace rbb {

SbHeight& ReplicaNode::sb(uint64_t k) {
  auto it = sb_.find(k);
  if (it != sb_.end()) return it->second;

  SbHeight& h = sb_[k];
  uint16_t pc = p_.proposer_count();
  h.proposers.reserve(pc);
  for (uint16_t i = 0; i < pc; ++i) h.proposers.push_back(static_cast<NodeId>(i));

  for (NodeId prop : h.proposers) {
    RbcastInstance::Hooks rh;
    rh.broadcast = [this](MsgPtr m, Chan c) { broadcast(m, c); };
    rh.unicast = [this](NodeId d, MsgPtr m, Chan) { sim_->send(d, std::move(m)); };
    rh.arm_fetch_timer = [this, k, prop](Time delay) {
      sim_->set_timer(delay, TimerFire{kRbFetch, k, prop, 0});
    };
    rh.deliver = [this, k, prop](BytesPtr payload) { sb_on_deliver(k, prop, std::move(payload)); };
    h.rb.emplace(prop, std::make_unique<RbcastInstance>(p_, self_, k, prop, std::move(rh),
                                                        cfg_.fetch_timeout_us));

    BinaryInstance::Hooks bh;
    bh.broadcast = [this](MsgPtr m, Chan c) { broadcast(m, c); };
    bh.arm_round_timer = [this, k, prop](uint32_t round, Time delay) {
      sim_->set_timer(delay, TimerFire{kBinRound, k, prop, round});
    };
    bh.decide = [this, k, prop](uint8_t v) { sb_on_decide(k, prop, v); };
    bh.round_overflow = [this, k, prop]() { env_.bin_round_overflow(self_, k, prop); };
    h.bin.emplace(prop,
                  std::make_unique<BinaryInstance>(p_, self_, k, prop, cfg_.bin, std::move(bh)));
  }
  return h;
}

void ReplicaNode::sb_start_height(uint64_t k) {
  // A fresh height: causal depth restarts here, so a commit's hop count is
  // the message depth of one superblock round.
  sim_->rebase_hop();
  SbHeight& h = sb(k);
  if (!h.proposal_sent &&
      std::find(h.proposers.begin(), h.proposers.end(), self_) != h.proposers.end()) {
    h.proposal_sent = true;
    auto batch = next_batch(k);
    h.rb.at(self_)->start(make_bytes(encode_tx_batch(batch)));
  }
  // Peers may already have driven this height to completion.
  sb_try_fix_candidate(k);
}

void ReplicaNode::sb_on_deliver(uint64_t k, uint16_t proposer, const BytesPtr& payload) {
  SbHeight& h = sb(k);
  h.delivered[proposer] = payload;
  auto& inst = h.bin.at(proposer);
  if (!inst->proposed()) inst->propose(1);
  sb_try_fix_candidate(k);
}

void ReplicaNode::sb_on_decide(uint64_t k, uint16_t inst, uint8_t v) {
  SbHeight& h = sb(k);
  h.decision[inst] = v;
  if (v == 1) {
    ++h.ones;
    // Enough proposals are in: vote 0 for the stragglers so the height
    // terminates without waiting for slow or silent proposers.
    uint16_t trigger =
        static_cast<uint16_t>(std::max<int>(static_cast<int>(h.proposers.size()) - p_.t, 1));
    if (!h.zero_fill_done && h.ones >= trigger) {
      h.zero_fill_done = true;
      for (auto& [q, b] : h.bin)
        if (!b->proposed()) b->propose(0);
    }
  }
  sb_try_fix_candidate(k);
}

void ReplicaNode::sb_try_fix_candidate(uint64_t k) {
  auto it = sb_.find(k);
  if (it == sb_.end()) return;
  SbHeight& h = it->second;
  // The candidate is verified against the ledger as of height k-1, so wait
  // until this replica has applied that block even if the decisions are in.
  if (h.candidate_fixed || k != next_height()) return;
  if (h.decision.size() != h.proposers.size()) return;
  for (const auto& [prop, v] : h.decision)
    if (v == 1 && !h.delivered.count(prop)) return;  // payload fetch in flight

  h.candidate_fixed = true;
  std::set<Digest> seen;
  for (NodeId prop : h.proposers) {
    if (h.decision.at(prop) != 1) continue;
    std::vector<Transaction> txs;
    try {
      txs = decode_tx_batch(*h.delivered.at(prop), kMaxTxsPerProposal);
    } catch (const DecodeError&) {
      continue;  // a garbage batch that won agreement contributes nothing
    }
    h.mask |= (1ull << prop);
    for (auto& tx : txs) {
      ++h.candidate_raw;
      Digest id = tx.id();
      if (!seen.insert(id).second) {
        ++h.duplicates;
        continue;
      }
      h.cand_ids.push_back(id);
      h.candidate.push_back(std::move(tx));
    }
  }

  size_t m = h.candidate.size();
  h.assign.reserve(m);  // trackers keep pointers into this vector: no growth after this loop
  for (size_t i = 0; i < m; ++i) h.assign.push_back(assign_verifiers(h.cand_ids[i], k, p_));
  h.tracker.reserve(m);
  for (size_t i = 0; i < m; ++i) h.tracker.emplace_back(&h.assign[i], p_.witness());
  h.unresolved = static_cast<uint32_t>(m);
  for (uint32_t i = 0; i < m; ++i) {
    if (h.assign[i].is_primary(self_))
      h.my_primary.push_back(i);
    else if (h.assign[i].is_extension(self_))
      h.my_ext.push_back(i);
  }

  if (!h.my_primary.empty())
    sim_->set_timer(cfg_.verify_cost_us * static_cast<Time>(h.my_primary.size()),
                    TimerFire{kVerifyPrimary, k, 0, 0});
  if (!h.my_ext.empty()) sim_->set_timer(cfg_.escalation_timeout_us, TimerFire{kEscalation, k, 0, 0});

  auto buffered = std::move(h.attest_buffer);
  h.attest_buffer.clear();
  for (const auto& a : buffered) sb_apply_attest(k, a);
  if (h.unresolved == 0) sb_try_finalize(k);
}

void ReplicaNode::sb_send_attest(uint64_t k, const std::vector<uint32_t>& idxs) {
  SbHeight& h = sb_.at(k);
  Attest a;
  a.height = k;
  a.verifier = self_;
  a.verdicts.reserve(idxs.size());
  for (uint32_t i : idxs) {
    Verdict v = validate_tx(ledger_, h.candidate[i], SigPolicy::Check, env_.tx_verifier());
    env_.count_tx_verification(self_, h.cand_ids[i]);
    a.verdicts.emplace_back(i, static_cast<uint8_t>(v));
  }
  a.sig = sign(env_.node_keys(self_).sk, attest_signing_hash(a));
  broadcast(make_msg(std::move(a)), Chan::Attest);
}

void ReplicaNode::sb_run_primary(uint64_t k) {
  auto it = sb_.find(k);
  if (it == sb_.end()) return;
  SbHeight& h = it->second;
  if (!h.candidate_fixed || h.primary_done) return;
  h.primary_done = true;
  sb_send_attest(k, h.my_primary);
}

void ReplicaNode::sb_run_escalation(uint64_t k) {
  auto it = sb_.find(k);
  if (it == sb_.end()) return;
  SbHeight& h = it->second;
  if (!h.candidate_fixed || h.escalation_done) return;
  h.escalation_done = true;
  std::vector<uint32_t> pending;
  for (uint32_t i : h.my_ext)
    if (!h.tracker[i].finalized()) pending.push_back(i);
  if (pending.empty()) return;
  sb_send_attest(k, pending);
}

void ReplicaNode::sb_on_attest(ActorId src, const Attest& a) {
  (void)src;  // attests are validated by signature, not by network source
  if (a.height <= finalized_ || a.height > next_height() + kMaxHeightSkew) return;
  if (a.verifier >= p_.n) return;
  SbHeight& h = sb(a.height);
  auto& count = h.attest_count[static_cast<NodeId>(a.verifier)];
  if (count >= 2) return;  // a correct verifier attests at most twice
  if (!env_.protocol_sig_ok(static_cast<NodeId>(a.verifier), attest_signing_hash(a), a.sig)) return;
  ++count;
  if (!h.candidate_fixed) {
    if (h.attest_buffer.size() < 2u * p_.n) h.attest_buffer.push_back(a);
    return;
  }
  sb_apply_attest(a.height, a);
}

void ReplicaNode::sb_apply_attest(uint64_t k, const Attest& a) {
  SbHeight& h = sb_.at(k);
  for (const auto& [idx, vv] : a.verdicts) {
    if (idx >= h.candidate.size() || vv > static_cast<uint8_t>(Verdict::Malformed)) {
      ++h.ignored_attest_entries;
      continue;
    }
    if (h.tracker[idx].add(static_cast<NodeId>(a.verifier), static_cast<Verdict>(vv)))
      --h.unresolved;
  }
  if (h.unresolved == 0) sb_try_finalize(k);
}

void ReplicaNode::sb_try_finalize(uint64_t k) {
  auto it = sb_.find(k);
  if (it == sb_.end()) return;
  SbHeight& h = it->second;
  if (!h.candidate_fixed || h.finalize_scheduled || h.unresolved != 0) return;
  // Commit via a zero-delay timer: the call stack may be deep inside an
  // instance whose height state the commit would destroy.
  h.finalize_scheduled = true;
  sim_->set_timer(0, TimerFire{kFinalize, k, 0, 0});
}

void ReplicaNode::sb_do_finalize(uint64_t k) {
  auto it = sb_.find(k);
  if (it == sb_.end()) return;
  SbHeight& h = it->second;
  if (k != next_height()) return;

  BlockStats st;
  st.candidate_txs = h.candidate_raw;
  st.duplicate_txs = h.duplicates;

  std::vector<Transaction> accepted;
  uint32_t attested_invalid = 0;
  for (uint32_t i = 0; i < h.candidate.size(); ++i) {
    if (h.tracker[i].final_verdict() == Verdict::Valid)
      accepted.push_back(std::move(h.candidate[i]));
    else
      ++attested_invalid;
  }
  // Verdicts are per transaction against the height snapshot; conflicts
  // between accepted transactions are settled here, first spender wins.
  FilterResult fr = filter_conflicts(ledger_, accepted, SigPolicy::AssumeValid,
                                     cfg_.allow_intra_block_chains, env_.tx_verifier());
  std::vector<Transaction> ordered;
  ordered.reserve(fr.accepted.size());
  for (uint32_t idx : fr.accepted) ordered.push_back(std::move(accepted[idx]));
  st.invalid_txs = attested_invalid + static_cast<uint32_t>(fr.rejected.size());

  commit_block(k, h.mask, std::move(ordered), st, sim_->current_hop());
}

}  // namespace rbb
