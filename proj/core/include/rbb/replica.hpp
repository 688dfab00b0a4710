#pragma once

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "rbb/binconsensus.hpp"
#include "rbb/crypto.hpp"
#include "rbb/messages.hpp"
#include "rbb/params.hpp"
#include "rbb/rbcast.hpp"
#include "rbb/shardverify.hpp"
#include "rbb/simulator.hpp"
#include "rbb/tx.hpp"
#include "rbb/utxo.hpp"

namespace rbb {

enum class Protocol : uint8_t { Rbbc, Cons1 };

const char* protocol_name(Protocol p);
std::optional<Protocol> protocol_from_name(const std::string& s);

// Per-block accounting reported alongside each commit.
struct BlockStats {
  uint32_t candidate_txs = 0;  // after concatenation, before dedup
  uint32_t duplicate_txs = 0;  // removed by dedup (same txid twice in candidate)
  uint32_t invalid_txs = 0;    // attested or filtered out
  uint32_t valid_txs = 0;
};

// Services a replica obtains from its host (the experiment world). Keeps the
// protocol logic free of workload, metrics and key-management concerns.
class ReplicaEnv {
 public:
  virtual ~ReplicaEnv() = default;

  virtual const KeyPair& node_keys(NodeId id) = 0;

  // Signature check for protocol signatures (attestations). Cached, and not
  // charged as a transaction verification.
  virtual bool protocol_sig_ok(NodeId signer, const Digest& msg, const Signature& sig) = 0;

  // Transaction signature verifier handed to the ledger (cached).
  virtual const SigVerifier& tx_verifier() = 0;

  // Called once per transaction signature verification a replica executes.
  virtual void count_tx_verification(NodeId who, const Digest& txid) = 0;

  // Pre-signed proposal stream, if the run uses one. nullopt means proposals
  // come from the local mempool.
  virtual std::optional<std::vector<Transaction>> feed_batch(NodeId proposer, uint64_t height) = 0;

  virtual void block_committed(NodeId who, const Block& b, uint32_t hop, const BlockStats& st) = 0;

  // Binary consensus exceeded its diagnostic round bound (never expected).
  virtual void bin_round_overflow(NodeId who, uint64_t height, uint16_t inst) = 0;
};

struct ReplicaConfig {
  Protocol protocol = Protocol::Rbbc;
  NodeId leader = 0;            // CONS1 only
  Time verify_cost_us = 128;    // CPU charge per transaction verification
  Time fetch_timeout_us = 2'000'000;
  Time escalation_timeout_us = 4'000'000;  // extension verifiers wait this long
  Time c1_retry_us = 10'000'000;
  BinTimeouts bin;
  bool allow_intra_block_chains = false;
  bool silent = false;  // crashed: ignores everything, sends nothing
};

// One in-flight consensus height under the superblock protocol.
struct SbHeight {
  std::vector<NodeId> proposers;
  std::map<uint16_t, std::unique_ptr<RbcastInstance>> rb;
  std::map<uint16_t, std::unique_ptr<BinaryInstance>> bin;
  std::map<uint16_t, BytesPtr> delivered;
  std::map<uint16_t, uint8_t> decision;
  uint16_t ones = 0;
  bool zero_fill_done = false;
  bool proposal_sent = false;

  // Candidate = concatenation of decided-1 proposals in proposer-id order.
  bool candidate_fixed = false;
  uint64_t mask = 0;  // bit p set when proposal p decided 1 and decoded
  std::vector<Transaction> candidate;
  std::vector<Digest> cand_ids;
  std::vector<VerifierAssignment> assign;
  std::vector<VerdictTracker> tracker;
  uint32_t unresolved = 0;
  uint32_t duplicates = 0;
  uint32_t candidate_raw = 0;
  std::vector<uint32_t> my_primary, my_ext;
  bool primary_done = false;
  bool escalation_done = false;
  bool finalize_scheduled = false;
  uint32_t ignored_attest_entries = 0;
  std::map<NodeId, uint8_t> attest_count;  // two legitimate attests max (primary + escalation)
  std::vector<Attest> attest_buffer;
};

// One in-flight height under the leader-based baseline.
struct C1Attempt {
  BytesPtr payload;
  Digest digest{};
  bool have_payload = false;
  bool prepare_sent = false;
  bool commit_sent = false;
  std::map<Digest, std::set<NodeId>> prepares, commits;
};

struct C1Height {
  std::map<uint32_t, C1Attempt> attempts;
  uint32_t next_attempt = 0;  // leader side
  bool delivered = false;
  BytesPtr decided;
  uint32_t decided_hop = 0;
  bool verify_scheduled = false;
  std::vector<Transaction> txs;  // decoded payload, set when verification is scheduled
};

class ReplicaNode : public Actor {
 public:
  ReplicaNode(ReplicaEnv& env, const Params& p, NodeId self, ReplicaConfig cfg, UtxoTable genesis);

  void on_start(Simulator& sim) override;
  void on_message(Simulator& sim, ActorId src, const Message& m) override;
  void on_timer(Simulator& sim, const TimerFire& t) override;

  const std::vector<Block>& chain() const { return chain_; }
  Digest chain_digest() const;  // hash over the chain's block ids
  const UtxoTable& ledger() const { return ledger_; }
  size_t mempool_size() const { return mempool_.size(); }
  NodeId id() const { return self_; }

  // Timer kinds (TimerFire::kind).
  enum Tk : uint32_t {
    kBinRound = 1,    // a=height b=instance c=round
    kRbFetch,         // a=height b=proposer
    kVerifyPrimary,   // a=height
    kEscalation,      // a=height
    kFinalize,        // a=height; zero-delay, decouples commit from instance callbacks
    kVerifyC1,        // a=height b=attempt
    kC1Retry,         // a=height b=attempt
  };

 private:
  // shared
  uint64_t next_height() const { return chain_.size() + 1; }
  void broadcast(const MsgPtr& m, Chan chan);
  std::vector<Transaction> next_batch(uint64_t height);
  void admit_to_mempool(const Transaction& tx);
  void commit_block(uint64_t height, uint64_t mask, std::vector<Transaction> ordered, BlockStats st,
                    uint32_t hop);
  void handle_client(ActorId src, const Message& m);

  // superblock protocol
  SbHeight& sb(uint64_t k);
  void sb_start_height(uint64_t k);
  void sb_on_deliver(uint64_t k, uint16_t proposer, const BytesPtr& payload);
  void sb_on_decide(uint64_t k, uint16_t inst, uint8_t v);
  void sb_try_fix_candidate(uint64_t k);
  void sb_run_primary(uint64_t k);
  void sb_run_escalation(uint64_t k);
  void sb_send_attest(uint64_t k, const std::vector<uint32_t>& idxs);
  void sb_on_attest(ActorId src, const Attest& a);
  void sb_apply_attest(uint64_t k, const Attest& a);
  void sb_try_finalize(uint64_t k);
  void sb_do_finalize(uint64_t k);

  // leader-based baseline
  C1Height& c1(uint64_t k);
  void c1_start_height(uint64_t k);
  void c1_on_preprepare(ActorId src, const C1Preprepare& m);
  void c1_on_prepare(ActorId src, const C1Prepare& m);
  void c1_on_commit(ActorId src, const C1Commit& m);
  void c1_try_progress(uint64_t k, uint32_t attempt);
  void c1_run_verify(uint64_t k);
  void c1_schedule_verify(uint64_t k);

  ReplicaEnv& env_;
  Params p_;
  NodeId self_;
  ReplicaConfig cfg_;
  Simulator* sim_ = nullptr;  // valid inside callbacks

  UtxoTable ledger_;
  std::vector<Block> chain_;
  std::deque<Transaction> mempool_;
  std::set<Digest> mempool_ids_;
  std::set<Digest> committed_ids_;

  std::map<uint64_t, SbHeight> sb_;
  std::map<uint64_t, C1Height> c1_;
  uint64_t finalized_ = 0;  // heights <= this are done; late messages ignored

  // Heights too far ahead of the local chain are ignored outright; correct
  // peers never run more than a couple of heights ahead.
  static constexpr uint64_t kMaxHeightSkew = 64;
};

}  // namespace rbb
