#include "rbb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace rbb {

namespace {

using json = nlohmann::ordered_json;

json chan_json(const std::array<uint64_t, kChanCount>& a) {
  return json(std::vector<uint64_t>(a.begin(), a.end()));
}

std::array<uint64_t, kChanCount> chan_parse(const json& j) {
  std::array<uint64_t, kChanCount> out{};
  if (!j.is_array() || j.size() != kChanCount) throw std::invalid_argument("bad channel array");
  for (size_t i = 0; i < kChanCount; ++i) out[i] = j[i].get<uint64_t>();
  return out;
}

}  // namespace

std::string RunLog::to_jsonl() const {
  json h;
  h["kind"] = "run";
  h["config"] = config.serialize();
  h["matrix"] = matrix_name;
  h["leader"] = leader;
  h["reads_total"] = reads_total;
  h["submits_total"] = submits_total;
  h["genesis_total"] = genesis_total;
  h["final_supply"] = final_supply;
  h["end_vtime_us"] = end_vtime_us;
  h["events"] = events;
  h["total_bytes"] = total_bytes;
  h["chan_bytes_total"] = chan_json(chan_bytes_total);
  h["tx_latency_p50_ms"] = tx_latency_p50_ms;
  h["tx_latency_p95_ms"] = tx_latency_p95_ms;
  h["diagnostic"] = diagnostic;
  h["flags"] = json{{"fork", flags.fork},
                    {"conservation_violation", flags.conservation_violation},
                    {"bin_round_overflow", flags.bin_round_overflow},
                    {"no_progress", flags.no_progress},
                    {"aborted", flags.aborted}};
  json hist = json::object();
  for (const auto& [k, v] : verifications_histogram) hist[std::to_string(k)] = v;
  h["verifications"] = hist;
  json njs = json::array();
  for (const auto& n : nodes) {
    json j;
    j["id"] = n.id;
    j["role"] = n.role;
    j["region"] = n.region;
    j["blocks"] = n.blocks;
    j["chain"] = n.chain_digest;
    j["egress"] = n.egress_bytes;
    j["egress_chan"] = chan_json(n.egress_chan);
    j["verifications"] = n.tx_verifications;
    njs.push_back(std::move(j));
  }
  h["nodes"] = njs;

  std::ostringstream out;
  out << h.dump() << "\n";
  for (const auto& b : blocks) {
    json j;
    j["kind"] = "block";
    j["index"] = b.index;
    j["id"] = b.block_id;
    j["instance"] = b.instance;
    j["mask"] = b.proposal_mask;
    j["candidate"] = b.candidate_txs;
    j["duplicate"] = b.duplicate_txs;
    j["invalid"] = b.invalid_txs;
    j["valid"] = b.valid_txs;
    j["commit_us"] = b.commit_vtime_us;
    j["hop"] = b.commit_hop;
    j["chan_cum"] = chan_json(b.chan_bytes_cum);
    j["latency_sum_us"] = b.latency_sum_us;
    j["latency_count"] = b.latency_count;
    j["reads_cum"] = b.reads_cum;
    out << j.dump() << "\n";
  }
  return out.str();
}

RunLog RunLog::from_jsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty run log");
  json h = json::parse(line);
  if (h.at("kind") != "run") throw std::invalid_argument("first line is not a run header");

  RunLog log;
  log.config = ExperimentConfig::parse_kv(h.at("config").get<std::string>());
  log.matrix_name = h.at("matrix").get<std::string>();
  log.leader = h.at("leader").get<int32_t>();
  log.reads_total = h.at("reads_total").get<uint64_t>();
  log.submits_total = h.at("submits_total").get<uint64_t>();
  log.genesis_total = h.at("genesis_total").get<Amount>();
  log.final_supply = h.at("final_supply").get<Amount>();
  log.end_vtime_us = h.at("end_vtime_us").get<int64_t>();
  log.events = h.at("events").get<uint64_t>();
  log.total_bytes = h.at("total_bytes").get<uint64_t>();
  log.chan_bytes_total = chan_parse(h.at("chan_bytes_total"));
  log.tx_latency_p50_ms = h.at("tx_latency_p50_ms").get<double>();
  log.tx_latency_p95_ms = h.at("tx_latency_p95_ms").get<double>();
  log.diagnostic = h.at("diagnostic").get<std::string>();
  const json& f = h.at("flags");
  log.flags.fork = f.at("fork").get<bool>();
  log.flags.conservation_violation = f.at("conservation_violation").get<bool>();
  log.flags.bin_round_overflow = f.at("bin_round_overflow").get<bool>();
  log.flags.no_progress = f.at("no_progress").get<bool>();
  log.flags.aborted = f.at("aborted").get<bool>();
  for (const auto& [k, v] : h.at("verifications").items())
    log.verifications_histogram[static_cast<uint32_t>(std::stoul(k))] = v.get<uint64_t>();
  for (const auto& n : h.at("nodes")) {
    NodeSummary s;
    s.id = n.at("id").get<uint16_t>();
    s.role = n.at("role").get<std::string>();
    s.region = n.at("region").get<std::string>();
    s.blocks = n.at("blocks").get<uint64_t>();
    s.chain_digest = n.at("chain").get<std::string>();
    s.egress_bytes = n.at("egress").get<uint64_t>();
    s.egress_chan = chan_parse(n.at("egress_chan"));
    s.tx_verifications = n.at("verifications").get<uint64_t>();
    log.nodes.push_back(std::move(s));
  }

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    if (j.at("kind") != "block") throw std::invalid_argument("unexpected line kind");
    BlockRecord b;
    b.index = j.at("index").get<uint64_t>();
    b.block_id = j.at("id").get<std::string>();
    b.instance = j.at("instance").get<uint64_t>();
    b.proposal_mask = j.at("mask").get<uint64_t>();
    b.candidate_txs = j.at("candidate").get<uint32_t>();
    b.duplicate_txs = j.at("duplicate").get<uint32_t>();
    b.invalid_txs = j.at("invalid").get<uint32_t>();
    b.valid_txs = j.at("valid").get<uint32_t>();
    b.commit_vtime_us = j.at("commit_us").get<int64_t>();
    b.commit_hop = j.at("hop").get<uint32_t>();
    b.chan_bytes_cum = chan_parse(j.at("chan_cum"));
    b.latency_sum_us = j.at("latency_sum_us").get<uint64_t>();
    b.latency_count = j.at("latency_count").get<uint32_t>();
    b.reads_cum = j.at("reads_cum").get<uint64_t>();
    log.blocks.push_back(std::move(b));
  }
  return log;
}

MetricsReport MetricsReport::compute(const RunLog& log) {
  MetricsReport r{};
  const auto& bs = log.blocks;
  uint32_t w = log.config.warmup;
  if (bs.size() <= w) return r;

  size_t first = w;
  size_t last = bs.size() - 1;
  int64_t t0 = w > 0 ? bs[w - 1].commit_vtime_us : 0;
  double span_us = static_cast<double>(bs[last].commit_vtime_us - t0);
  r.blocks = static_cast<uint32_t>(last - first + 1);
  r.span_s = span_us / 1e6;

  uint64_t valid = 0, invalid = 0, dup = 0, latsum = 0;
  uint32_t latn = 0;
  r.hop_min = bs[first].commit_hop;
  r.hop_max = bs[first].commit_hop;
  for (size_t i = first; i <= last; ++i) {
    valid += bs[i].valid_txs;
    invalid += bs[i].invalid_txs;
    dup += bs[i].duplicate_txs;
    latsum += bs[i].latency_sum_us;
    latn += bs[i].latency_count;
    r.hop_min = std::min(r.hop_min, bs[i].commit_hop);
    r.hop_max = std::max(r.hop_max, bs[i].commit_hop);
  }
  if (span_us > 0) {
    r.tx_per_s = static_cast<double>(valid) * 1e6 / span_us;
    uint64_t reads0 = w > 0 ? bs[w - 1].reads_cum : 0;
    r.reads_per_s = static_cast<double>(bs[last].reads_cum - reads0) * 1e6 / span_us;
  }
  if (valid > 0) {
    uint64_t reads0 = w > 0 ? bs[w - 1].reads_cum : 0;
    r.rw_ratio = static_cast<double>(bs[last].reads_cum - reads0) / static_cast<double>(valid);
  }
  r.valid_per_block = static_cast<double>(valid) / r.blocks;
  r.invalid_per_block = static_cast<double>(invalid) / r.blocks;
  r.duplicate_per_block = static_cast<double>(dup) / r.blocks;
  r.interblock_ms = span_us / 1000.0 / r.blocks;
  r.tx_latency_ms = latn > 0 ? static_cast<double>(latsum) / 1000.0 / latn : 0.0;
  r.tx_latency_p50_ms = log.tx_latency_p50_ms;
  r.tx_latency_p95_ms = log.tx_latency_p95_ms;

  uint64_t vtx = 0, vexec = 0;
  bool first_bucket = true;
  for (const auto& [execs, count] : log.verifications_histogram) {
    vtx += count;
    vexec += static_cast<uint64_t>(execs) * count;
    if (first_bucket) {
      r.verif_min = execs;
      first_bucket = false;
    }
    r.verif_max = execs;
  }
  if (vtx > 0) r.verif_mean = static_cast<double>(vexec) / static_cast<double>(vtx);

  double total_pb = 0;
  for (size_t c = 0; c < kChanCount; ++c) {
    uint64_t base = w > 0 ? bs[w - 1].chan_bytes_cum[c] : 0;
    r.chan_bytes_per_block[c] =
        static_cast<double>(bs[last].chan_bytes_cum[c] - base) / r.blocks;
    total_pb += r.chan_bytes_per_block[c];
  }
  r.bytes_per_block = total_pb;

  std::vector<uint64_t> egress;
  for (const auto& n : log.nodes)
    if (n.role == "correct") egress.push_back(n.egress_bytes);
  if (!egress.empty()) {
    std::sort(egress.begin(), egress.end());
    r.egress_max = egress.back();
    r.egress_median = egress[egress.size() / 2];
  }
  return r;
}

std::string MetricsReport::summary() const {
  std::ostringstream o;
  o << std::fixed << std::setprecision(2);
  o << blocks << " blocks in " << span_s << "s virtual: " << tx_per_s << " tx/s, "
    << valid_per_block << " valid/" << invalid_per_block << " invalid/" << duplicate_per_block
    << " dup per block, interblock " << interblock_ms << " ms";
  if (tx_latency_ms > 0) o << ", tx latency " << tx_latency_ms << " ms";
  if (reads_per_s > 0) o << ", " << reads_per_s << " reads/s (R/W " << rw_ratio << ")";
  o << ", verifications/tx " << verif_mean << " [" << verif_min << "," << verif_max << "]"
    << ", hop [" << hop_min << "," << hop_max << "]"
    << ", " << std::setprecision(0) << bytes_per_block << " bytes/block";
  return o.str();
}

std::string MetricsReport::csv_header() {
  std::ostringstream o;
  o << "protocol,nodes,faulty,proposers,proposal_size,adversary,seed,requesters,matrix,"
       "blocks,span_s,tx_per_s,reads_per_s,rw_ratio,valid_per_block,invalid_per_block,"
       "duplicate_per_block,interblock_ms,tx_latency_ms,tx_latency_p50_ms,tx_latency_p95_ms,"
       "verif_mean,verif_min,verif_max,hop_min,hop_max,bytes_per_block";
  for (size_t c = 0; c < kChanCount; ++c) o << "," << chan_name(static_cast<Chan>(c)) << "_pb";
  o << ",egress_max,egress_median,total_bytes,end_vtime_us,clean";
  return o.str();
}

std::string MetricsReport::csv_row(const RunLog& log) const {
  std::ostringstream o;
  const auto& c = log.config;
  o << protocol_name(c.protocol) << "," << c.n << "," << c.faulty() << ","
    << (c.proposer_mode == ProposerMode::AllN ? "all" : "t+1") << "," << c.beta << ","
    << adversary_name(c.adversary) << "," << c.seed << "," << c.requesters << ","
    << log.matrix_name << ",";
  o << std::fixed << std::setprecision(4);
  o << blocks << "," << span_s << "," << tx_per_s << "," << reads_per_s << "," << rw_ratio << ","
    << valid_per_block << "," << invalid_per_block << "," << duplicate_per_block << ","
    << interblock_ms << "," << tx_latency_ms << "," << tx_latency_p50_ms << ","
    << tx_latency_p95_ms << "," << verif_mean << "," << verif_min << "," << verif_max << ","
    << hop_min << "," << hop_max << "," << bytes_per_block;
  for (size_t i = 0; i < kChanCount; ++i) o << "," << chan_bytes_per_block[i];
  o << "," << egress_max << "," << egress_median << "," << log.total_bytes << ","
    << log.end_vtime_us << "," << (log.flags.clean() ? 1 : 0);
  return o.str();
}

std::string aggregate_csv(const std::vector<RunLog>& logs) {
  std::vector<MetricsReport> reps;
  reps.reserve(logs.size());
  for (const auto& l : logs) reps.push_back(MetricsReport::compute(l));

  struct Row {
    const char* name;
    std::function<double(const MetricsReport&)> get;
  };
  const Row rows[] = {
      {"tx_per_s", [](const MetricsReport& r) { return r.tx_per_s; }},
      {"reads_per_s", [](const MetricsReport& r) { return r.reads_per_s; }},
      {"rw_ratio", [](const MetricsReport& r) { return r.rw_ratio; }},
      {"valid_per_block", [](const MetricsReport& r) { return r.valid_per_block; }},
      {"invalid_per_block", [](const MetricsReport& r) { return r.invalid_per_block; }},
      {"duplicate_per_block", [](const MetricsReport& r) { return r.duplicate_per_block; }},
      {"interblock_ms", [](const MetricsReport& r) { return r.interblock_ms; }},
      {"tx_latency_ms", [](const MetricsReport& r) { return r.tx_latency_ms; }},
      {"verif_mean", [](const MetricsReport& r) { return r.verif_mean; }},
      {"bytes_per_block", [](const MetricsReport& r) { return r.bytes_per_block; }},
      {"egress_max", [](const MetricsReport& r) { return static_cast<double>(r.egress_max); }},
  };

  std::ostringstream o;
  o << "metric,mean,stdev,min,max,samples\n";
  o << std::fixed << std::setprecision(4);
  for (const auto& row : rows) {
    double sum = 0, sq = 0, mn = 0, mx = 0;
    for (size_t i = 0; i < reps.size(); ++i) {
      double v = row.get(reps[i]);
      sum += v;
      sq += v * v;
      mn = i == 0 ? v : std::min(mn, v);
      mx = i == 0 ? v : std::max(mx, v);
    }
    size_t k = reps.size();
    double mean = k ? sum / k : 0;
    double var = k ? std::max(0.0, sq / k - mean * mean) : 0;
    o << row.name << "," << mean << "," << std::sqrt(var) << "," << mn << "," << mx << "," << k
      << "\n";
  }
  return o.str();
}

}  // namespace rbb
