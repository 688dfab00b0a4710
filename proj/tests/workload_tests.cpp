#include "doctest.h"

#include "rbb/utxo.hpp"
#include "rbb/verify_cache.hpp"
#include "rbb/workload.hpp"

using namespace rbb;

namespace {

struct CountingEnv : RequesterEnv {
  std::vector<Digest> submits;
  uint64_t reads = 0;
  void note_submit(const Digest& txid) override { submits.push_back(txid); }
  void note_read() override { ++reads; }
};

// Serves a fixed UTXO view and records whatever transactions arrive.
struct MockReplica : Actor {
  std::vector<std::tuple<Digest, uint32_t, Amount>> view;
  std::vector<Transaction> received;
  void on_message(Simulator& sim, ActorId src, const Message& m) override {
    if (const auto* q = std::get_if<UtxoQuery>(&m)) {
      sim.send(src, make_msg(UtxoReply{q->account, q->rid, view}));
    } else if (const auto* s = std::get_if<TxSubmit>(&m)) {
      received.push_back(*s->tx);
    }
  }
  void on_timer(Simulator&, const TimerFire&) override {}
};

}  // namespace

TEST_CASE("synthetic feed: genesis shape and deterministic batches") {
  Params p;
  p.n = 4;
  p.t = 1;
  SyntheticFeed feed(p, 8, 99);

  GenesisSpec g = feed.genesis();
  CHECK(g.tag == SyntheticFeed::kGenesisTag);
  REQUIRE(g.grants.size() == 4);
  for (const auto& grant : g.grants) {
    CHECK(grant.amount == SyntheticFeed::kSlotAmount);
    CHECK(grant.count == 8);
  }
  CHECK(g.total() == 4 * 8 * SyntheticFeed::kSlotAmount);
  // distinct key streams per proposer
  CHECK(g.grants[0].owner != g.grants[1].owner);

  // memoized: same object both times
  const auto& b1 = feed.batch(2, 1);
  CHECK(&feed.batch(2, 1) == &b1);
  REQUIRE(b1.size() == 8);

  // reproducible across a fresh feed with the same seed, distinct otherwise
  SyntheticFeed again(p, 8, 99);
  CHECK(again.batch(2, 1)[0].id() == b1[0].id());
  SyntheticFeed other(p, 8, 100);
  CHECK(other.batch(2, 1)[0].id() != b1[0].id());
}

TEST_CASE("synthetic feed: batch k spends exactly what batch k-1 created") {
  Params p;
  p.n = 4;
  p.t = 1;
  SyntheticFeed feed(p, 5, 7);
  UtxoTable table = feed.genesis().build();
  auto verifier = plain_verifier();

  // heights may be requested out of order; building is idempotent
  feed.batch(0, 3);

  for (uint64_t h = 1; h <= 4; ++h) {
    std::vector<Transaction> all;
    for (NodeId prop = 0; prop < 4; ++prop) {
      const auto& batch = feed.batch(prop, h);
      REQUIRE(batch.size() == 5);
      for (const auto& tx : batch) {
        REQUIRE(tx.inputs.size() == 1);
        REQUIRE(tx.outputs.size() == 1);
        CHECK(tx.outputs[0].amount == SyntheticFeed::kSlotAmount);
        all.push_back(tx);
      }
    }
    // every stream's batch is valid at once: disjoint inputs across proposers
    FilterResult fr = filter_conflicts(table, all, SigPolicy::Check, false, verifier);
    CHECK(fr.accepted.size() == all.size());
    CHECK(fr.rejected.empty());
    Block b;
    b.txs = all;
    table = apply_block(table, b);
    CHECK(table.total_supply() == feed.genesis().total());
  }

  // a batch replayed against the advanced table is a double spend story:
  // its inputs are gone
  const auto& stale = feed.batch(1, 1);
  CHECK(validate_tx(table, stale[0], SigPolicy::Check, verifier) == Verdict::MissingInput);
}

TEST_CASE("requester spends an agreed view once, with change") {
  LatencyMatrix m = LatencyMatrix::uniform(2, 1000, 100.0);
  Simulator sim(m, NetConfig{});
  CountingEnv env;

  MockReplica r0, r1, r2;
  ActorId a0 = sim.add_actor(&r0, 0);
  ActorId a1 = sim.add_actor(&r1, 0);
  ActorId a2 = sim.add_actor(&r2, 1);

  KeyPair kp = keygen(ByteSpan{sha256(Bytes{42}).data(), Digest::kSize});
  KeyPair peer = keygen(ByteSpan{sha256(Bytes{43}).data(), Digest::kSize});
  Digest owned_tx = sha256(Bytes{1, 2, 3});
  std::tuple<Digest, uint32_t, Amount> owned{owned_tx, 1, 30};
  r0.view = {owned};
  r1.view = {owned};
  r2.view = {owned};

  Requester::Config cfg;
  cfg.index = 0;
  cfg.keys = kp;
  cfg.account = account_of(kp.pk);
  cfg.payment = 10;
  cfg.poll_us = 50'000;
  cfg.submit_to = {a0, a1};
  cfg.connections = {a0, a1, a2};
  cfg.peers = {account_of(peer.pk)};
  cfg.rng_seed = 5;
  Requester req(env, cfg);
  sim.add_actor(&req, 0);

  sim.run(400'000, 100'000);

  // several poll rounds happened, each reading every connection
  CHECK(req.polls() >= 3 * 3);
  CHECK(env.reads == req.polls());

  // the UTXO was spent exactly once despite repeated identical views
  CHECK(req.txs_submitted() == 1);
  REQUIRE(env.submits.size() == 1);
  REQUIRE(r0.received.size() == 1);
  REQUIRE(r1.received.size() == 1);
  CHECK(r2.received.empty());
  const Transaction& tx = r0.received[0];
  CHECK(tx.id() == env.submits[0]);
  CHECK(tx.id() == r1.received[0].id());
  REQUIRE(tx.inputs.size() == 1);
  CHECK(tx.inputs[0].txid == owned_tx);
  REQUIRE(tx.outputs.size() == 2);
  CHECK(tx.outputs[0].amount == 10);
  CHECK(tx.outputs[0].owner == account_of(peer.pk));
  CHECK(tx.outputs[1].amount == 20);
  CHECK(tx.outputs[1].owner == cfg.account);
}

TEST_CASE("requester needs a majority of identical replies") {
  LatencyMatrix m = LatencyMatrix::uniform(2, 1000, 100.0);
  Simulator sim(m, NetConfig{});
  CountingEnv env;

  MockReplica r0, r1, r2;
  ActorId a0 = sim.add_actor(&r0, 0);
  ActorId a1 = sim.add_actor(&r1, 0);
  ActorId a2 = sim.add_actor(&r2, 1);

  KeyPair kp = keygen(ByteSpan{sha256(Bytes{44}).data(), Digest::kSize});
  std::tuple<Digest, uint32_t, Amount> real{sha256(Bytes{7}), 0, 8};
  std::tuple<Digest, uint32_t, Amount> fake{sha256(Bytes{8}), 0, 1000};
  r0.view = {real};
  r1.view = {fake};  // a lying replica cannot move the majority
  r2.view = {real};

  Requester::Config cfg;
  cfg.keys = kp;
  cfg.account = account_of(kp.pk);
  cfg.payment = 10;  // more than the UTXO: spent whole, no change
  cfg.poll_us = 50'000;
  cfg.submit_to = {a0};
  cfg.connections = {a0, a1, a2};
  cfg.rng_seed = 6;
  Requester req(env, cfg);
  sim.add_actor(&req, 1);

  sim.run(300'000, 100'000);

  REQUIRE(r0.received.size() == 1);
  const Transaction& tx = r0.received[0];
  CHECK(tx.inputs[0].txid == std::get<0>(real));
  REQUIRE(tx.outputs.size() == 1);  // amount <= payment: no change output
  CHECK(tx.outputs[0].amount == 8);
  CHECK(tx.outputs[0].owner == cfg.account);  // no peers: pays itself
}

TEST_CASE("requester stays quiet when views never agree") {
  LatencyMatrix m = LatencyMatrix::uniform(2, 1000, 100.0);
  Simulator sim(m, NetConfig{});
  CountingEnv env;

  MockReplica r0, r1, r2;
  ActorId a0 = sim.add_actor(&r0, 0);
  ActorId a1 = sim.add_actor(&r1, 0);
  ActorId a2 = sim.add_actor(&r2, 1);
  r0.view = {{sha256(Bytes{1}), 0, 5}};
  r1.view = {{sha256(Bytes{2}), 0, 5}};
  r2.view = {{sha256(Bytes{3}), 0, 5}};

  KeyPair kp = keygen(ByteSpan{sha256(Bytes{45}).data(), Digest::kSize});
  Requester::Config cfg;
  cfg.keys = kp;
  cfg.account = account_of(kp.pk);
  cfg.poll_us = 40'000;
  cfg.submit_to = {a0};
  cfg.connections = {a0, a1, a2};
  Requester req(env, cfg);
  sim.add_actor(&req, 0);

  sim.run(300'000, 100'000);
  CHECK(req.polls() > 0);
  CHECK(req.txs_submitted() == 0);
  CHECK(r0.received.empty());
}
