#pragma once

#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "rbb/adversary.hpp"
#include "rbb/config.hpp"
#include "rbb/genesis.hpp"
#include "rbb/latency.hpp"
#include "rbb/metrics.hpp"
#include "rbb/replica.hpp"
#include "rbb/simulator.hpp"
#include "rbb/verify_cache.hpp"
#include "rbb/workload.hpp"

namespace rbb {

// The genesis a config implies: feed-backed runs grant to the per-proposer
// streams, requester runs grant to the requester accounts (unless a genesis
// file overrides them). Deterministic in the config alone.
GenesisSpec genesis_for(const ExperimentConfig& cfg);

// Resolves "aws14", "uniform[:lat_ms[:mbps]]" or a CSV path. Uniform grids
// get one region per actor so every distinct pair sees the same latency.
LatencyMatrix resolve_matrix(const ExperimentConfig& cfg);

// Builds and runs one experiment: replicas on a latency matrix, a workload,
// optionally an adversary, and all the bookkeeping behind a RunLog.
class World : public ReplicaEnv, public RequesterEnv {
 public:
  explicit World(ExperimentConfig cfg);
  ~World() override;

  World(const World&) = delete;
  World& operator=(const World&) = delete;

  RunLog run();

  // Resolved pieces, available after construction.
  const LatencyMatrix& matrix() const { return matrix_; }
  const GenesisSpec& genesis() const { return genesis_spec_; }
  int32_t leader() const { return leader_; }
  const Params& params() const { return params_; }
  const std::vector<bool>& byzantine() const { return byz_; }

  // Post-run inspection. The reference chain is the lowest correct id's.
  const Simulator& sim() const { return *sim_; }
  const std::vector<Block>& reference_chain() const { return replicas_.at(reference_)->chain(); }
  const ReplicaNode& replica(NodeId id) const { return *replicas_.at(id); }

  // ReplicaEnv
  const KeyPair& node_keys(NodeId id) override { return node_keys_.at(id); }
  bool protocol_sig_ok(NodeId signer, const Digest& msg, const Signature& sig) override;
  const SigVerifier& tx_verifier() override { return tx_verifier_; }
  void count_tx_verification(NodeId who, const Digest& txid) override;
  std::optional<std::vector<Transaction>> feed_batch(NodeId proposer, uint64_t height) override;
  void block_committed(NodeId who, const Block& b, uint32_t hop, const BlockStats& st) override;
  void bin_round_overflow(NodeId who, uint64_t height, uint16_t inst) override;

  // RequesterEnv
  void note_submit(const Digest& txid) override;
  void note_read() override;

 private:
  void build();
  void finish_log(RunLog& log, const Simulator::RunStatus& status);

  ExperimentConfig cfg_;
  Params params_;
  LatencyMatrix matrix_;
  std::string matrix_name_;
  GenesisSpec genesis_spec_;
  int32_t leader_ = -1;
  NodeId reference_ = 0;  // lowest correct id

  std::unique_ptr<Adversary> adversary_;
  std::vector<bool> byz_;
  std::vector<KeyPair> node_keys_;
  std::vector<PublicKey> node_pks_;
  std::unique_ptr<SyntheticFeed> feed_;

  VerifyCache cache_;
  SigVerifier tx_verifier_;

  std::unique_ptr<Simulator> sim_;
  std::vector<std::unique_ptr<ReplicaNode>> replicas_;
  std::vector<std::unique_ptr<Requester>> requesters_;
  std::vector<size_t> replica_region_;

  std::vector<uint64_t> commits_;  // chain length per replica
  std::vector<BlockRecord> blocks_;
  std::vector<uint64_t> tx_latencies_;
  std::unordered_map<Digest, Time, DigestHash> submit_times_;
  std::unordered_map<Digest, uint32_t, DigestHash> verif_count_;
  std::vector<uint64_t> verif_per_node_;
  uint64_t reads_total_ = 0;
  uint64_t submits_total_ = 0;
  RunFlags flags_;
  bool built_ = false;
  bool ran_ = false;
};

// Convenience: one config, one log.
RunLog run_experiment(const ExperimentConfig& cfg);

}  // namespace rbb
