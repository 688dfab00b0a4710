#pragma once

#include <map>
#include <set>
#include <vector>

#include "rbb/crypto.hpp"
#include "rbb/genesis.hpp"
#include "rbb/params.hpp"
#include "rbb/rng.hpp"
#include "rbb/simulator.hpp"
#include "rbb/tx.hpp"

namespace rbb {

// Pre-signed self-paying transaction streams, one per proposer, disjoint
// across proposers. The batch for height k spends exactly the outputs the
// height k-1 batch created, so batches are valid precisely when blocks
// commit in order. Batches are built lazily and memoized; every call for
// the same (proposer, height) returns the same transactions.
class SyntheticFeed {
 public:
  SyntheticFeed(const Params& p, uint32_t batch_size, uint64_t seed);

  GenesisSpec genesis() const { return genesis_; }
  const std::vector<Transaction>& batch(NodeId proposer, uint64_t height);

  static constexpr Amount kSlotAmount = 10;
  static constexpr uint64_t kGenesisTag = 0xfeedu;

 private:
  struct Stream {
    KeyPair keys;
    Account account;
    std::vector<UtxoKey> tip;  // output each slot spends next
    uint64_t built = 0;        // heights generated so far
    std::map<uint64_t, std::vector<Transaction>> batches;
  };

  uint32_t batch_size_;
  GenesisSpec genesis_;
  std::vector<Stream> streams_;
};

// Client-side services a requester needs from the experiment world.
class RequesterEnv {
 public:
  virtual ~RequesterEnv() = default;
  virtual void note_submit(const Digest& txid) = 0;  // first submission, for latency
  virtual void note_read() = 0;                      // one UTXO query sent
};

// A client that spends every UTXO it owns as soon as it learns of it, then
// polls until the resulting outputs show up. Payments of `payment` coins go
// to a random other requester with change back to self; a UTXO worth no
// more than `payment` is spent whole. State of record is only what t+1 of
// the 2t+1 polled replicas agree on.
class Requester : public Actor {
 public:
  struct Config {
    uint32_t index = 0;
    KeyPair keys;
    Account account;
    Amount payment = 10;
    Time poll_us = 100'000;
    std::vector<ActorId> submit_to;    // t+1 replicas
    std::vector<ActorId> connections;  // 2t+1 replicas
    std::vector<Account> peers;        // payment recipients (never self)
    uint64_t rng_seed = 1;
  };

  Requester(RequesterEnv& env, Config cfg);

  void on_start(Simulator& sim) override;
  void on_message(Simulator& sim, ActorId src, const Message& m) override;
  void on_timer(Simulator& sim, const TimerFire& t) override;

  uint64_t txs_submitted() const { return submitted_; }
  uint64_t polls() const { return polls_; }

 private:
  using UtxoSet = std::vector<std::tuple<Digest, uint32_t, Amount>>;

  void poll(Simulator& sim);
  void spend(Simulator& sim, const UtxoSet& agreed);

  RequesterEnv& env_;
  Config cfg_;
  Rng rng_;

  uint64_t rid_ = 0;
  bool rid_done_ = false;               // current rid already acted on
  std::vector<UtxoSet> replies_;        // replies for the current rid
  std::set<std::pair<Digest, uint32_t>> spent_;  // spent or in flight
  uint64_t submitted_ = 0;
  uint64_t polls_ = 0;
};

}  // namespace rbb
