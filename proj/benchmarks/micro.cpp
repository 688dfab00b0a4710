// Microbenchmarks for the hot paths: hashing, signatures, batch codecs,
// block filtering, and a whole small simulation as a macro reference.

#include <benchmark/benchmark.h>

#include "rbb/utxo.hpp"
#include "rbb/verify_cache.hpp"
#include "rbb/world.hpp"

using namespace rbb;

namespace {

KeyPair bench_keys() {
  Digest d = sha256(ByteSpan{reinterpret_cast<const uint8_t*>("bench"), 5});
  return keygen(ByteSpan{d.data(), Digest::kSize});
}

Transaction self_pay(const KeyPair& kp, const Digest& src, uint64_t nonce) {
  Transaction tx;
  tx.nonce = nonce;
  tx.inputs.push_back({src, 0, kp.pk, Signature{}});
  tx.outputs.push_back({10, account_of(kp.pk)});
  tx.inputs[0].sig = sign(kp.sk, tx.signing_hash());
  return tx;
}

std::vector<Transaction> chain_batch(size_t count) {
  KeyPair kp = bench_keys();
  std::vector<Transaction> txs;
  Digest prev = sha256(ByteSpan{reinterpret_cast<const uint8_t*>("seed"), 4});
  for (size_t i = 0; i < count; ++i) {
    txs.push_back(self_pay(kp, prev, i));
    prev = txs.back().id();
  }
  return txs;
}

void BM_sha256_256B(benchmark::State& state) {
  Bytes buf(256, 0xab);
  for (auto _ : state) benchmark::DoNotOptimize(sha256(ByteSpan{buf.data(), buf.size()}));
}
BENCHMARK(BM_sha256_256B);

void BM_sign(benchmark::State& state) {
  KeyPair kp = bench_keys();
  Digest msg = sha256(ByteSpan{reinterpret_cast<const uint8_t*>("m"), 1});
  for (auto _ : state) benchmark::DoNotOptimize(sign(kp.sk, msg));
}
BENCHMARK(BM_sign);

void BM_verify(benchmark::State& state) {
  KeyPair kp = bench_keys();
  Digest msg = sha256(ByteSpan{reinterpret_cast<const uint8_t*>("m"), 1});
  Signature sig = sign(kp.sk, msg);
  for (auto _ : state) benchmark::DoNotOptimize(verify(kp.pk, msg, sig));
}
BENCHMARK(BM_verify);

void BM_verify_cached(benchmark::State& state) {
  KeyPair kp = bench_keys();
  Digest msg = sha256(ByteSpan{reinterpret_cast<const uint8_t*>("m"), 1});
  Signature sig = sign(kp.sk, msg);
  VerifyCache cache;
  SigVerifier v = cached_verifier(cache);
  v(kp.pk, msg, sig);  // warm
  for (auto _ : state) benchmark::DoNotOptimize(v(kp.pk, msg, sig));
}
BENCHMARK(BM_verify_cached);

void BM_tx_batch_codec(benchmark::State& state) {
  auto txs = chain_batch(100);
  Bytes enc = encode_tx_batch(txs);
  for (auto _ : state) {
    benchmark::DoNotOptimize(decode_tx_batch(ByteSpan{enc.data(), enc.size()}, kMaxTxsPerProposal));
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * enc.size()));
}
BENCHMARK(BM_tx_batch_codec);

void BM_filter_conflicts_200(benchmark::State& state) {
  KeyPair kp = bench_keys();
  GenesisSpec g;
  g.tag = 7;
  g.grants.push_back({account_of(kp.pk), 10, 200});
  UtxoTable base = g.build();

  std::vector<Transaction> txs;
  for (uint32_t i = 0; i < 200; ++i) txs.push_back(self_pay(kp, genesis_key(7, i).txid, i));

  for (auto _ : state) {
    UtxoTable t = base;
    auto fr = filter_conflicts(t, txs, SigPolicy::Check, false, plain_verifier());
    benchmark::DoNotOptimize(fr);
  }
}
BENCHMARK(BM_filter_conflicts_200);

void BM_world_small(benchmark::State& state) {
  for (auto _ : state) {
    ExperimentConfig cfg;
    cfg.n = 4;
    cfg.beta = 10;
    cfg.rounds = 2;
    cfg.matrix = "uniform";
    RunLog log = run_experiment(cfg);
    benchmark::DoNotOptimize(log);
  }
}
BENCHMARK(BM_world_small)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
