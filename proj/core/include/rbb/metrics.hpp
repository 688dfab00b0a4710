#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "rbb/config.hpp"
#include "rbb/messages.hpp"

namespace rbb {

// One committed block as observed at the reference replica (the lowest
// correct id). Byte counters are cumulative network totals at commit time,
// so per-block costs are adjacent differences.
struct BlockRecord {
  uint64_t index = 0;
  std::string block_id;  // hex
  uint64_t instance = 0;
  uint64_t proposal_mask = 0;
  uint32_t candidate_txs = 0;
  uint32_t duplicate_txs = 0;
  uint32_t invalid_txs = 0;
  uint32_t valid_txs = 0;
  int64_t commit_vtime_us = 0;
  uint32_t commit_hop = 0;
  std::array<uint64_t, kChanCount> chan_bytes_cum{};
  uint64_t latency_sum_us = 0;  // over valid txs with a recorded submit time
  uint32_t latency_count = 0;
  uint64_t reads_cum = 0;
};

struct NodeSummary {
  uint16_t id = 0;
  std::string role;  // correct | byz1 | byz2 | silent
  std::string region;
  uint64_t blocks = 0;
  std::string chain_digest;  // hex
  uint64_t egress_bytes = 0;
  std::array<uint64_t, kChanCount> egress_chan{};
  uint64_t tx_verifications = 0;
};

struct RunFlags {
  bool fork = false;
  bool conservation_violation = false;
  bool bin_round_overflow = false;
  bool no_progress = false;  // some correct replica missed the round target
  bool aborted = false;      // event or time cap hit

  bool clean() const {
    return !fork && !conservation_violation && !bin_round_overflow && !no_progress && !aborted;
  }
};

// Everything a run produces. Serializes to JSON lines (one header object,
// then one object per block) and parses back; reports are computed from
// the log alone, so an exported log carries the whole result.
struct RunLog {
  ExperimentConfig config;
  std::string matrix_name;
  int32_t leader = -1;  // resolved leader (baseline runs), else -1
  std::vector<BlockRecord> blocks;
  std::vector<NodeSummary> nodes;
  std::map<uint32_t, uint64_t> verifications_histogram;  // executions -> #txs
  uint64_t reads_total = 0;
  uint64_t submits_total = 0;
  Amount genesis_total = 0;
  Amount final_supply = 0;
  int64_t end_vtime_us = 0;
  uint64_t events = 0;
  uint64_t total_bytes = 0;
  std::array<uint64_t, kChanCount> chan_bytes_total{};
  double tx_latency_p50_ms = 0;  // whole-run percentiles over per-tx commit latency
  double tx_latency_p95_ms = 0;
  RunFlags flags;
  std::string diagnostic;  // set on abort: deadline info plus a queue dump

  std::string to_jsonl() const;
  static RunLog from_jsonl(const std::string& text);
};

// Aggregate view over the measured window (blocks at index >= warmup).
struct MetricsReport {
  uint32_t blocks = 0;       // in window
  double span_s = 0;         // window wall time (virtual)
  double tx_per_s = 0;       // committed valid txs per second
  double reads_per_s = 0;
  double rw_ratio = 0;       // reads per committed valid tx
  double valid_per_block = 0;
  double invalid_per_block = 0;
  double duplicate_per_block = 0;
  double interblock_ms = 0;
  double tx_latency_ms = 0;      // mean submit-to-commit, when submit times exist
  double tx_latency_p50_ms = 0;  // echoed from the log (whole-run percentiles)
  double tx_latency_p95_ms = 0;
  double verif_mean = 0;     // executions per verified tx
  uint32_t verif_min = 0;
  uint32_t verif_max = 0;
  uint32_t hop_min = 0;
  uint32_t hop_max = 0;
  std::array<double, kChanCount> chan_bytes_per_block{};
  double bytes_per_block = 0;
  uint64_t egress_max = 0;    // over correct replicas, whole run
  uint64_t egress_median = 0;

  static MetricsReport compute(const RunLog& log);

  std::string summary() const;  // one human-readable paragraph

  static std::string csv_header();
  std::string csv_row(const RunLog& log) const;
};

// Mean/stdev across seed sweeps, one line per metric column.
std::string aggregate_csv(const std::vector<RunLog>& logs);

}  // namespace rbb
