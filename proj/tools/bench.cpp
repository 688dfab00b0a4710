// bench: run experiments from a config file (plus flag overrides), emit
// genesis files, and inspect latency matrices.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "rbb/runner.hpp"

using namespace rbb;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int cmd_run(const ExperimentConfig& cfg, uint32_t seeds, const std::string& out_dir, bool quiet) {
  cfg.validate();
  std::vector<RunLog> logs = run_sweep(cfg, seeds);

  int rc = 0;
  for (const auto& log : logs) {
    MetricsReport r = MetricsReport::compute(log);
    if (!quiet) {
      std::printf("seed %llu: %s\n", (unsigned long long)log.config.seed, r.summary().c_str());
      if (!log.flags.clean()) {
        std::printf("  FLAGS:%s%s%s%s%s\n", log.flags.fork ? " fork" : "",
                    log.flags.conservation_violation ? " conservation-violation" : "",
                    log.flags.bin_round_overflow ? " bin-round-overflow" : "",
                    log.flags.no_progress ? " no-progress" : "",
                    log.flags.aborted ? " aborted" : "");
        if (!log.diagnostic.empty()) std::printf("  %s\n", log.diagnostic.c_str());
      }
    }
    if (!log.flags.clean()) rc = 1;
  }

  if (!out_dir.empty()) {
    auto files = write_artifacts(out_dir, cfg, logs);
    if (!quiet) {
      std::printf("wrote %s/{", out_dir.c_str());
      for (size_t i = 0; i < files.size(); ++i)
        std::printf("%s%s", i ? "," : "", files[i].c_str());
      std::printf("}\n");
    }
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Red Belly consensus benchmark harness"};
  app.require_subcommand(1);

  // --- run ---
  auto* run = app.add_subcommand("run", "run one experiment (or a seed sweep)");
  std::string config_path, out_dir;
  uint32_t seeds = 1;
  bool quiet = false;
  run->add_option("--config", config_path, "config file (key=value lines)")
      ->check(CLI::ExistingFile);
  run->add_option("--out-dir", out_dir, "write results.csv, blocks-*.jsonl, config, genesis");
  run->add_option("--seeds", seeds, "consecutive seeds to sweep")->default_val(1);
  run->add_flag("--quiet", quiet, "suppress per-run summaries");

  // Overrides. Only flags the user passed are applied on top of the file.
  std::string o_protocol, o_proposers, o_adversary, o_matrix;
  uint64_t o_nodes = 0, o_seed = 0, o_rounds = 0, o_warmup = 0, o_beta = 0;
  int64_t o_faulty = 0, o_byz = 0, o_gst_ms = 0, o_jitter_ms = 0;
  uint64_t o_requesters = 0, o_req_regions = 0, o_gen_amount = 0, o_gen_utxos = 0;
  auto* f_protocol = run->add_option("--protocol", o_protocol, "rbbc | cons1");
  auto* f_nodes = run->add_option("--nodes", o_nodes, "replica count n");
  auto* f_faulty = run->add_option("--faulty", o_faulty, "tolerated failures t (-1: (n-1)/3)");
  auto* f_proposers = run->add_option("--proposers", o_proposers, "all | t+1");
  auto* f_beta = run->add_option("--proposal-size", o_beta, "transactions per proposal");
  auto* f_adversary =
      run->add_option("--adversary", o_adversary, "none | byz1 | byz2 | silent");
  auto* f_byz = run->add_option("--byzantine-count", o_byz, "faulty replicas (-1: t)");
  auto* f_seed = run->add_option("--seed", o_seed, "base RNG seed");
  auto* f_rounds = run->add_option("--rounds", o_rounds, "blocks to commit");
  auto* f_warmup = run->add_option("--warmup", o_warmup, "leading blocks outside rate metrics");
  auto* f_matrix =
      run->add_option("--latency-matrix", o_matrix, "aws14 | uniform[:ms[:mbps]] | CSV path");
  auto* f_gst = run->add_option("--gst-ms", o_gst_ms, "global stabilization time");
  auto* f_jitter = run->add_option("--jitter-ms", o_jitter_ms, "uniform extra delay bound");
  auto* f_requesters = run->add_option("--requesters", o_requesters, "client count");
  auto* f_req_regions =
      run->add_option("--requester-regions", o_req_regions, "regions clients spread over");
  auto* f_gen_amount =
      run->add_option("--genesis-per-requester", o_gen_amount, "coins granted per client");
  auto* f_gen_utxos =
      run->add_option("--genesis-utxos-per-requester", o_gen_utxos, "granted outputs per client");

  // --- genesis ---
  auto* gen = app.add_subcommand("genesis", "emit the genesis a config implies");
  std::string gen_config, gen_out;
  gen->add_option("--config", gen_config, "config file")->check(CLI::ExistingFile)->required();
  gen->add_option("--out", gen_out, "write here instead of stdout");

  // --- matrix ---
  auto* mat = app.add_subcommand("matrix", "resolve, validate and dump a latency matrix");
  std::string mat_name = "aws14", mat_out;
  mat->add_option("name", mat_name, "aws14 | uniform[:ms[:mbps]] | CSV path");
  mat->add_option("--out", mat_out, "write the CSV here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ExperimentConfig cfg;
      if (!config_path.empty()) cfg = ExperimentConfig::parse_kv(slurp(config_path));
      if (*f_protocol) {
        auto p = protocol_from_name(o_protocol);
        if (!p) throw std::invalid_argument("unknown protocol '" + o_protocol + "'");
        cfg.protocol = *p;
      }
      if (*f_nodes) cfg.n = static_cast<uint16_t>(o_nodes);
      if (*f_faulty) cfg.t = static_cast<int32_t>(o_faulty);
      if (*f_proposers)
        cfg.proposer_mode = o_proposers == "all" ? ProposerMode::AllN : ProposerMode::TPlus1;
      if (*f_beta) cfg.beta = static_cast<uint32_t>(o_beta);
      if (*f_adversary) {
        auto a = adversary_from_name(o_adversary);
        if (!a) throw std::invalid_argument("unknown adversary '" + o_adversary + "'");
        cfg.adversary = *a;
      }
      if (*f_byz) cfg.byz_count = static_cast<int32_t>(o_byz);
      if (*f_seed) cfg.seed = o_seed;
      if (*f_rounds) cfg.rounds = static_cast<uint32_t>(o_rounds);
      if (*f_warmup) cfg.warmup = static_cast<uint32_t>(o_warmup);
      if (*f_matrix) cfg.matrix = o_matrix;
      if (*f_gst) cfg.gst_us = o_gst_ms * 1000;
      if (*f_jitter) cfg.jitter_us = o_jitter_ms * 1000;
      if (*f_requesters) cfg.requesters = static_cast<uint32_t>(o_requesters);
      if (*f_req_regions) cfg.requester_regions = static_cast<uint32_t>(o_req_regions);
      if (*f_gen_amount) cfg.genesis_amount = static_cast<Amount>(o_gen_amount);
      if (*f_gen_utxos) cfg.genesis_utxos = static_cast<uint32_t>(o_gen_utxos);
      return cmd_run(cfg, seeds, out_dir, quiet);
    }

    if (*gen) {
      ExperimentConfig cfg = ExperimentConfig::parse_kv(slurp(gen_config));
      std::string body = genesis_for(cfg).serialize();
      if (gen_out.empty()) {
        std::fputs(body.c_str(), stdout);
      } else {
        std::ofstream out(gen_out, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + gen_out);
        out << body;
      }
      return 0;
    }

    if (*mat) {
      ExperimentConfig cfg;
      cfg.matrix = mat_name;
      LatencyMatrix m = resolve_matrix(cfg);
      for (const auto& w : m.validate())
        std::fprintf(stderr, "warning: %s\n", w.c_str());
      std::string body = m.to_csv();
      if (mat_out.empty()) {
        std::fputs(body.c_str(), stdout);
      } else {
        std::ofstream out(mat_out, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + mat_out);
        out << body;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
