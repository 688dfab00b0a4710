#include "doctest.h"

#include "brute_ledger.hpp"
#include "tx_gen.hpp"

#include "rbb/genesis.hpp"
#include "rbb/utxo.hpp"
#include "rbb/verify_cache.hpp"

using namespace rbb;
using rbb::testing::brute_filter;
using rbb::testing::TxGen;

namespace {

KeyPair kp_of(uint64_t salt) {
  ByteWriter w;
  w.u64(salt);
  w.u64(0x6c6564676572);
  Digest d = sha256(w.bytes());
  return keygen(ByteSpan{d.data(), Digest::kSize});
}

Transaction pay(const KeyPair& from, const UtxoKey& src, Amount amount,
                const Account& to, uint64_t nonce) {
  Transaction tx;
  tx.nonce = nonce;
  tx.inputs.push_back({src.txid, src.index, from.pk, Signature{}});
  tx.outputs.push_back({amount, to});
  tx.inputs[0].sig = sign(from.sk, tx.signing_hash());
  return tx;
}

}  // namespace

TEST_CASE("utxo table bookkeeping") {
  UtxoTable t;
  KeyPair a = kp_of(1), b = kp_of(2);
  UtxoKey k1 = genesis_key(1, 0), k2 = genesis_key(1, 1);
  t.insert(k1, {100, account_of(a.pk)});
  t.insert(k2, {50, account_of(a.pk)});
  CHECK(t.total_supply() == 150);
  CHECK(t.balance(account_of(a.pk)) == 150);
  CHECK(t.balance(account_of(b.pk)) == 0);
  CHECK(t.utxos_of(account_of(a.pk)).size() == 2);

  CHECK_THROWS_AS(t.insert(k1, {1, account_of(b.pk)}), LedgerFault);
  t.erase(k1);
  CHECK(t.total_supply() == 50);
  CHECK_THROWS_AS(t.erase(k1), LedgerFault);

  UtxoTable t2;
  t2.insert(k2, {50, account_of(a.pk)});
  CHECK(t2.digest() == t.digest());
}

TEST_CASE("verdicts cover every rejection reason with fixed precedence") {
  KeyPair a = kp_of(3), b = kp_of(4);
  GenesisSpec g;
  g.tag = 9;
  g.grants.push_back({account_of(a.pk), 100, 2});
  UtxoTable t = g.build();
  auto v = plain_verifier();
  UtxoKey u0 = genesis_key(9, 0);

  SUBCASE("valid") {
    Transaction tx = pay(a, u0, 100, account_of(b.pk), 1);
    CHECK(validate_tx(t, tx, SigPolicy::Check, v) == Verdict::Valid);
  }
  SUBCASE("no inputs or no outputs is malformed") {
    Transaction tx;
    tx.outputs.push_back({1, account_of(b.pk)});
    CHECK(validate_tx(t, tx, SigPolicy::Check, v) == Verdict::Malformed);
    Transaction tx2 = pay(a, u0, 100, account_of(b.pk), 1);
    tx2.outputs.clear();
    CHECK(validate_tx(t, tx2, SigPolicy::Check, v) == Verdict::Malformed);
  }
  SUBCASE("zero output is malformed") {
    Transaction tx = pay(a, u0, 100, account_of(b.pk), 1);
    tx.outputs.push_back({0, account_of(b.pk)});
    tx.inputs[0].sig = sign(a.sk, tx.signing_hash());
    CHECK(validate_tx(t, tx, SigPolicy::Check, v) == Verdict::Malformed);
  }
  SUBCASE("duplicate input within one tx is malformed, not double spend") {
    Transaction tx;
    tx.nonce = 1;
    tx.inputs.push_back({u0.txid, u0.index, a.pk, Signature{}});
    tx.inputs.push_back({u0.txid, u0.index, a.pk, Signature{}});
    tx.outputs.push_back({200, account_of(b.pk)});
    Digest h = tx.signing_hash();
    tx.inputs[0].sig = sign(a.sk, h);
    tx.inputs[1].sig = sign(a.sk, h);
    CHECK(validate_tx(t, tx, SigPolicy::Check, v) == Verdict::Malformed);
  }
  SUBCASE("unknown input") {
    Transaction tx = pay(a, UtxoKey{sha256(Bytes{1, 2, 3}), 0}, 100, account_of(b.pk), 1);
    CHECK(validate_tx(t, tx, SigPolicy::Check, v) == Verdict::MissingInput);
  }
  SUBCASE("spender key that is not the owner") {
    Transaction tx = pay(b, u0, 100, account_of(b.pk), 1);
    CHECK(validate_tx(t, tx, SigPolicy::Check, v) == Verdict::BadSignature);
  }
  SUBCASE("wrong signature under the right key") {
    Transaction tx = pay(a, u0, 100, account_of(b.pk), 1);
    tx.inputs[0].sig = sign(b.sk, tx.signing_hash());
    CHECK(validate_tx(t, tx, SigPolicy::Check, v) == Verdict::BadSignature);
    // quorum-backed path skips the signature math
    CHECK(validate_tx(t, tx, SigPolicy::AssumeValid, v) == Verdict::Valid);
  }
  SUBCASE("value must balance exactly, both directions") {
    Transaction more = pay(a, u0, 101, account_of(b.pk), 1);
    CHECK(validate_tx(t, more, SigPolicy::Check, v) == Verdict::OverSpend);
    Transaction less = pay(a, u0, 99, account_of(b.pk), 1);
    CHECK(validate_tx(t, less, SigPolicy::Check, v) == Verdict::OverSpend);
  }
}

TEST_CASE("filter_conflicts: first spender wins, chains are a policy") {
  KeyPair a = kp_of(5), b = kp_of(6);
  GenesisSpec g;
  g.tag = 12;
  g.grants.push_back({account_of(a.pk), 100, 1});
  UtxoTable t = g.build();
  auto v = plain_verifier();
  UtxoKey u0 = genesis_key(12, 0);

  Transaction first = pay(a, u0, 100, account_of(b.pk), 1);
  Transaction second = pay(a, u0, 100, account_of(b.pk), 2);  // same UTXO
  Transaction chained = pay(b, UtxoKey{first.id(), 0}, 100, account_of(a.pk), 3);

  std::vector<Transaction> txs{first, second, chained};

  FilterResult no_chains = filter_conflicts(t, txs, SigPolicy::Check, false, v);
  REQUIRE(no_chains.accepted == std::vector<uint32_t>{0});
  REQUIRE(no_chains.rejected.size() == 2);
  CHECK(no_chains.rejected[0] == std::pair<uint32_t, Verdict>{1, Verdict::DoubleSpendWithinBlock});
  CHECK(no_chains.rejected[1] == std::pair<uint32_t, Verdict>{2, Verdict::MissingInput});

  FilterResult chains = filter_conflicts(t, txs, SigPolicy::Check, true, v);
  CHECK(chains.accepted == std::vector<uint32_t>{0, 2});

  // applying the accepted set conserves supply
  Block blk;
  blk.txs = {first, chained};
  UtxoTable after = apply_block(t, blk);
  CHECK(after.total_supply() == t.total_supply());
  CHECK(after.balance(account_of(a.pk)) == 100);

  // an unfiltered conflicting block must refuse to apply
  Block bad;
  bad.txs = {first, second};
  CHECK_THROWS_AS(apply_block(t, bad), LedgerFault);
}

TEST_CASE("random blocks: filter matches the reference validator") {
  for (bool allow_chains : {false, true}) {
    TxGen gen(allow_chains ? 2024 : 2023, 6, 32, 500);
    for (int round = 0; round < 60; ++round) {
      auto txs = gen.block(40);
      auto brute = brute_filter(gen.table(), txs, true, allow_chains);
      auto fr = filter_conflicts(gen.table(), txs, SigPolicy::Check, allow_chains,
                                 plain_verifier());
      REQUIRE(fr.accepted == brute.accepted);
      REQUIRE(fr.rejected == brute.rejected);

      Block b;
      for (uint32_t i : fr.accepted) b.txs.push_back(txs[i]);
      UtxoTable applied = apply_block(gen.table(), b);
      CHECK(applied.entries() == brute.final_entries);

      gen.advance(txs, fr.accepted);
    }
  }
}

TEST_CASE("genesis build, totals and text roundtrip") {
  KeyPair a = kp_of(7), b = kp_of(8);
  GenesisSpec g;
  g.tag = 77;
  g.grants.push_back({account_of(a.pk), 1000, 3});
  g.grants.push_back({account_of(b.pk), 5, 2});

  CHECK(g.total() == 3010);
  UtxoTable t = g.build();
  CHECK(t.total_supply() == 3010);
  CHECK(t.size() == 5);
  CHECK(t.balance(account_of(a.pk)) == 3000);
  // keys are synthesized sequentially under the tag
  CHECK(t.contains(genesis_key(77, 0)));
  CHECK(t.contains(genesis_key(77, 4)));
  CHECK_FALSE(t.contains(genesis_key(77, 5)));
  CHECK_FALSE(t.contains(genesis_key(78, 0)));

  GenesisSpec back = GenesisSpec::parse(g.serialize());
  CHECK(back.tag == g.tag);
  REQUIRE(back.grants.size() == 2);
  CHECK(back.grants[1].owner == account_of(b.pk));
  CHECK(back.grants[1].amount == 5);
  CHECK(back.grants[1].count == 2);
  CHECK(back.build().digest() == t.digest());

  CHECK_THROWS(GenesisSpec::parse("tag 1\nutxo nothex 5 1\n"));
  CHECK_THROWS(GenesisSpec::parse("grant?\n"));
}

TEST_CASE("verify cache agrees with plain verification and counts hits") {
  KeyPair a = kp_of(9);
  Digest msg = sha256(Bytes{9, 9, 9});
  Signature good = sign(a.sk, msg);
  Signature bad = good;
  bad.rs[0] ^= 1;

  VerifyCache cache;
  auto v = cached_verifier(cache);
  CHECK(v(a.pk, msg, good));
  CHECK(v(a.pk, msg, good));
  CHECK_FALSE(v(a.pk, msg, bad));
  CHECK_FALSE(v(a.pk, msg, bad));  // negative results are cached too
  CHECK(cache.hits() == 2);
  CHECK(cache.misses() == 2);
}
