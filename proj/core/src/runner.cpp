#include "rbb/runner.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace rbb {

namespace fs = std::filesystem;

std::vector<RunLog> run_sweep(const ExperimentConfig& base, uint32_t seeds) {
  if (seeds == 0) throw std::invalid_argument("seeds must be positive");
  std::vector<RunLog> logs;
  logs.reserve(seeds);
  for (uint32_t i = 0; i < seeds; ++i) {
    ExperimentConfig cfg = base;
    cfg.seed = base.seed + i;
    logs.push_back(run_experiment(cfg));
  }
  return logs;
}

namespace {

void write_file(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + p.string() + " for writing");
  out << body;
  if (!out) throw std::runtime_error("short write to " + p.string());
}

}  // namespace

std::vector<std::string> write_artifacts(const std::string& out_dir,
                                         const ExperimentConfig& base,
                                         const std::vector<RunLog>& logs) {
  fs::path dir(out_dir);
  fs::create_directories(dir);
  std::vector<std::string> written;

  std::string results = MetricsReport::csv_header() + "\n";
  for (const auto& log : logs) results += MetricsReport::compute(log).csv_row(log) + "\n";
  write_file(dir / "results.csv", results);
  written.push_back("results.csv");

  write_file(dir / "aggregate.csv", aggregate_csv(logs));
  written.push_back("aggregate.csv");

  for (const auto& log : logs) {
    std::string name = "blocks-" + std::to_string(log.config.seed) + ".jsonl";
    write_file(dir / name, log.to_jsonl());
    written.push_back(name);
  }

  write_file(dir / "config.txt", base.serialize());
  written.push_back("config.txt");

  write_file(dir / "genesis.txt", genesis_for(base).serialize());
  written.push_back("genesis.txt");

  write_file(dir / "matrix.csv", resolve_matrix(base).to_csv());
  written.push_back("matrix.csv");

  return written;
}

}  // namespace rbb
