#pragma once

#include <string>
#include <vector>

#include "rbb/metrics.hpp"
#include "rbb/world.hpp"

namespace rbb {

// Runs `seeds` experiments that differ only in cfg.seed (base.seed, base.seed+1, ...).
std::vector<RunLog> run_sweep(const ExperimentConfig& base, uint32_t seeds);

// Writes the standard artifact set under out_dir (created if missing):
//   results.csv        one row per run
//   aggregate.csv      mean/stdev/min/max over the runs
//   blocks-<seed>.jsonl  full run log, one per seed
//   config.txt         the base config, reparseable
//   genesis.txt        the genesis the config implies
//   matrix.csv         the resolved latency matrix
// Returns the paths written, relative to out_dir.
std::vector<std::string> write_artifacts(const std::string& out_dir,
                                         const ExperimentConfig& base,
                                         const std::vector<RunLog>& logs);

}  // namespace rbb
