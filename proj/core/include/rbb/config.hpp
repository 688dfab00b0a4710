#pragma once

#include <string>

#include "rbb/adversary.hpp"
#include "rbb/params.hpp"
#include "rbb/replica.hpp"

namespace rbb {

// One experiment, fully specified. Everything that affects the outcome is
// in here (plus the matrix file contents, when one is referenced), so a run
// can be reproduced from its echo in the report.
struct ExperimentConfig {
  Protocol protocol = Protocol::Rbbc;
  uint16_t n = 4;
  int32_t t = -1;  // -1: largest tolerable, (n-1)/3
  uint32_t beta = 100;
  ProposerMode proposer_mode = ProposerMode::AllN;
  AdversaryKind adversary = AdversaryKind::None;  // faulty set is the byz_count highest ids
  int32_t byz_count = -1;                         // -1: exactly t
  uint64_t seed = 1;
  uint32_t rounds = 10;  // blocks every correct replica must commit
  uint32_t warmup = 0;   // leading blocks excluded from rate metrics

  // "aws14", "uniform[:lat_ms[:mbps]]", or a CSV path.
  std::string matrix = "aws14";
  int64_t jitter_us = 0;
  Time gst_us = 0;
  double pre_gst_mult = 1.0;

  uint32_t requesters = 0;          // 0: pre-signed per-proposer feeds instead of clients
  uint32_t requester_regions = 0;   // 0: spread over every region in the matrix
  Amount genesis_amount = 100'000;
  uint32_t genesis_utxos = 1;  // per requester
  Amount payment = 10;
  Time poll_floor_us = 10'000;
  std::string genesis_path;  // overrides the generated genesis (requester runs)

  Time verify_cost_us = 128;
  Time bin_round_us = 500'000;
  uint32_t bin_round_max = 20;
  Time fetch_timeout_us = 2'000'000;
  Time escalation_timeout_us = 0;  // 0: four times the largest one-way latency
  Time c1_retry_us = 10'000'000;
  int32_t c1_leader = -1;  // -1: most central correct replica
  bool allow_chains = false;

  Time max_vtime_us = 100'000'000'000;
  uint64_t max_events = 400'000'000;

  uint16_t faulty() const { return t < 0 ? Params::max_faulty(n) : static_cast<uint16_t>(t); }
  uint16_t byzantine_count() const {
    return byz_count < 0 ? faulty() : static_cast<uint16_t>(byz_count);
  }
  Params params() const;       // validated
  void validate() const;       // throws std::invalid_argument

  // key=value lines, one per key, '#' comments. parse() rejects unknown
  // keys and malformed values.
  std::string serialize() const;
  static ExperimentConfig parse_kv(const std::string& text);
};

}  // namespace rbb
