#include "rbb/config.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace rbb {

namespace {

const char* proposer_mode_name(ProposerMode m) {
  return m == ProposerMode::AllN ? "all" : "t+1";
}

ProposerMode proposer_mode_from(const std::string& s) {
  if (s == "all") return ProposerMode::AllN;
  if (s == "t+1" || s == "t1") return ProposerMode::TPlus1;
  throw std::invalid_argument("proposers must be 'all' or 't+1', got '" + s + "'");
}

int64_t parse_int(const std::string& key, const std::string& v) {
  int64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw std::invalid_argument(key + ": not an integer: '" + v + "'");
  return out;
}

uint64_t parse_uint(const std::string& key, const std::string& v) {
  uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw std::invalid_argument(key + ": not a non-negative integer: '" + v + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return out;
  } catch (...) {
    throw std::invalid_argument(key + ": not a number: '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument(key + ": not a boolean: '" + v + "'");
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

}  // namespace

Params ExperimentConfig::params() const {
  Params p;
  p.n = n;
  p.t = faulty();
  p.beta = beta;
  p.proposer_mode = proposer_mode;
  p.validate();
  return p;
}

void ExperimentConfig::validate() const {
  params();  // n/t/beta structural checks
  if (rounds == 0) throw std::invalid_argument("rounds must be positive");
  if (warmup >= rounds) throw std::invalid_argument("warmup must be below rounds");
  if (pre_gst_mult < 1.0) throw std::invalid_argument("pre-gst-mult must be >= 1");
  if (jitter_us < 0) throw std::invalid_argument("jitter must be >= 0");
  if (gst_us < 0) throw std::invalid_argument("gst must be >= 0");
  if (verify_cost_us < 0) throw std::invalid_argument("verify-cost-us must be >= 0");
  if (bin_round_us <= 0) throw std::invalid_argument("bin-round-ms must be positive");
  if (bin_round_max < 2) throw std::invalid_argument("bin-round-max must be at least 2");
  if (c1_leader >= static_cast<int32_t>(n)) throw std::invalid_argument("c1-leader out of range");
  if (byz_count >= static_cast<int32_t>(n)) throw std::invalid_argument("byz-count out of range");
  if (adversary != AdversaryKind::None && byzantine_count() == 0)
    throw std::invalid_argument("an adversary needs byz-count > 0 (or faulty > 0)");
  if (requesters == 0 && !genesis_path.empty())
    throw std::invalid_argument("a genesis file needs a requester workload to spend it");
  if (requesters > 0 && genesis_utxos == 0)
    throw std::invalid_argument("genesis-utxos must be positive");
  if (requesters > 0 && genesis_amount <= 0)
    throw std::invalid_argument("genesis-amount must be positive");
  if (requesters > 0 && payment <= 0) throw std::invalid_argument("payment must be positive");
  if (matrix.empty()) throw std::invalid_argument("latency-matrix must be set");
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream o;
  o << "protocol=" << protocol_name(protocol) << "\n";
  o << "nodes=" << n << "\n";
  o << "faulty=" << t << "\n";
  o << "proposers=" << proposer_mode_name(proposer_mode) << "\n";
  o << "proposal-size=" << beta << "\n";
  o << "adversary=" << adversary_name(adversary) << "\n";
  o << "byz-count=" << byz_count << "\n";
  o << "seed=" << seed << "\n";
  o << "rounds=" << rounds << "\n";
  o << "warmup=" << warmup << "\n";
  o << "latency-matrix=" << matrix << "\n";
  o << "jitter-us=" << jitter_us << "\n";
  o << "gst-us=" << gst_us << "\n";
  o << "pre-gst-mult=" << pre_gst_mult << "\n";
  o << "requesters=" << requesters << "\n";
  o << "requester-regions=" << requester_regions << "\n";
  o << "genesis-amount=" << genesis_amount << "\n";
  o << "genesis-utxos=" << genesis_utxos << "\n";
  o << "payment=" << payment << "\n";
  o << "poll-floor-us=" << poll_floor_us << "\n";
  o << "genesis=" << genesis_path << "\n";
  o << "verify-cost-us=" << verify_cost_us << "\n";
  o << "bin-round-us=" << bin_round_us << "\n";
  o << "bin-round-max=" << bin_round_max << "\n";
  o << "fetch-timeout-us=" << fetch_timeout_us << "\n";
  o << "escalation-timeout-us=" << escalation_timeout_us << "\n";
  o << "c1-retry-us=" << c1_retry_us << "\n";
  o << "c1-leader=" << c1_leader << "\n";
  o << "allow-chains=" << (allow_chains ? "true" : "false") << "\n";
  o << "max-vtime-us=" << max_vtime_us << "\n";
  o << "max-events=" << max_events << "\n";
  return o.str();
}

ExperimentConfig ExperimentConfig::parse_kv(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));

    if (key == "protocol") {
      auto p = protocol_from_name(val);
      if (!p) throw std::invalid_argument("unknown protocol '" + val + "'");
      c.protocol = *p;
    } else if (key == "nodes") {
      c.n = static_cast<uint16_t>(parse_uint(key, val));
    } else if (key == "faulty") {
      c.t = static_cast<int32_t>(parse_int(key, val));
    } else if (key == "proposers") {
      c.proposer_mode = proposer_mode_from(val);
    } else if (key == "proposal-size") {
      c.beta = static_cast<uint32_t>(parse_uint(key, val));
    } else if (key == "adversary") {
      auto a = adversary_from_name(val);
      if (!a) throw std::invalid_argument("unknown adversary '" + val + "'");
      c.adversary = *a;
    } else if (key == "byz-count") {
      c.byz_count = static_cast<int32_t>(parse_int(key, val));
    } else if (key == "seed") {
      c.seed = parse_uint(key, val);
    } else if (key == "rounds") {
      c.rounds = static_cast<uint32_t>(parse_uint(key, val));
    } else if (key == "warmup") {
      c.warmup = static_cast<uint32_t>(parse_uint(key, val));
    } else if (key == "latency-matrix") {
      c.matrix = val;
    } else if (key == "jitter-us") {
      c.jitter_us = parse_int(key, val);
    } else if (key == "gst-us") {
      c.gst_us = parse_int(key, val);
    } else if (key == "pre-gst-mult") {
      c.pre_gst_mult = parse_double(key, val);
    } else if (key == "requesters") {
      c.requesters = static_cast<uint32_t>(parse_uint(key, val));
    } else if (key == "requester-regions") {
      c.requester_regions = static_cast<uint32_t>(parse_uint(key, val));
    } else if (key == "genesis-amount") {
      c.genesis_amount = parse_int(key, val);
    } else if (key == "genesis-utxos") {
      c.genesis_utxos = static_cast<uint32_t>(parse_uint(key, val));
    } else if (key == "payment") {
      c.payment = parse_int(key, val);
    } else if (key == "poll-floor-us") {
      c.poll_floor_us = parse_int(key, val);
    } else if (key == "genesis") {
      c.genesis_path = val;
    } else if (key == "verify-cost-us") {
      c.verify_cost_us = parse_int(key, val);
    } else if (key == "bin-round-us") {
      c.bin_round_us = parse_int(key, val);
    } else if (key == "bin-round-max") {
      c.bin_round_max = static_cast<uint32_t>(parse_uint(key, val));
    } else if (key == "fetch-timeout-us") {
      c.fetch_timeout_us = parse_int(key, val);
    } else if (key == "escalation-timeout-us") {
      c.escalation_timeout_us = parse_int(key, val);
    } else if (key == "c1-retry-us") {
      c.c1_retry_us = parse_int(key, val);
    } else if (key == "c1-leader") {
      c.c1_leader = static_cast<int32_t>(parse_int(key, val));
    } else if (key == "allow-chains") {
      c.allow_chains = parse_bool(key, val);
    } else if (key == "max-vtime-us") {
      c.max_vtime_us = parse_int(key, val);
    } else if (key == "max-events") {
      c.max_events = parse_uint(key, val);
    } else {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" +
                                  key + "'");
    }
  }
  return c;
}

}  // namespace rbb
