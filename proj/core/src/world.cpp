#include "rbb/world.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rbb/serialize.hpp"

namespace rbb {

namespace {

KeyPair derive_keys(uint64_t seed, const char* domain, uint64_t index) {
  ByteWriter w;
  w.u64(seed);
  w.u64(index);
  w.raw(ByteSpan{reinterpret_cast<const uint8_t*>(domain), strlen(domain)});
  Digest d = sha256(w.take());
  return keygen(ByteSpan{d.data(), Digest::kSize});
}

uint64_t account_window_start(const Account& a, uint16_t n) {
  ByteWriter w;
  w.digest(a);
  w.raw(ByteSpan{reinterpret_cast<const uint8_t*>("assign"), 6});
  return sha256(w.take()).prefix_u64() % n;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

GenesisSpec genesis_for(const ExperimentConfig& cfg) {
  if (cfg.requesters == 0) {
    SyntheticFeed feed(cfg.params(), cfg.beta, cfg.seed);
    return feed.genesis();
  }
  if (!cfg.genesis_path.empty()) return GenesisSpec::parse(read_file(cfg.genesis_path));
  GenesisSpec g;
  g.tag = 1;
  for (uint32_t i = 0; i < cfg.requesters; ++i) {
    KeyPair kp = derive_keys(cfg.seed, "requester", i);
    g.grants.push_back({account_of(kp.pk), cfg.genesis_amount, cfg.genesis_utxos});
  }
  return g;
}

LatencyMatrix resolve_matrix(const ExperimentConfig& cfg) {
  const std::string& m = cfg.matrix;
  if (m == "aws14") return LatencyMatrix::aws14();
  if (m.rfind("uniform", 0) == 0) {
    int64_t lat_ms = 50;
    double mbps = 100.0;
    std::string rest = m.substr(7);
    if (!rest.empty()) {
      if (rest[0] != ':') throw std::invalid_argument("bad matrix spec '" + m + "'");
      std::istringstream ss(rest.substr(1));
      std::string tok;
      if (std::getline(ss, tok, ':')) lat_ms = std::stoll(tok);
      if (std::getline(ss, tok, ':')) mbps = std::stod(tok);
      if (std::getline(ss, tok, ':')) throw std::invalid_argument("bad matrix spec '" + m + "'");
    }
    size_t actors = static_cast<size_t>(cfg.n) + cfg.requesters;
    return LatencyMatrix::uniform(actors, lat_ms * 1000, mbps);
  }
  return LatencyMatrix::parse_csv(read_file(m));
}

World::World(ExperimentConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  params_ = cfg_.params();
  build();
}

World::~World() = default;

void World::build() {
  built_ = true;
  matrix_ = resolve_matrix(cfg_);
  matrix_name_ = cfg_.matrix;

  const uint16_t n = params_.n;
  const size_t nregions = matrix_.size();
  replica_region_.resize(n);
  for (uint16_t i = 0; i < n; ++i) replica_region_[i] = i % nregions;

  byz_ = cfg_.adversary == AdversaryKind::None
             ? std::vector<bool>(n, false)
             : Adversary::top_ids(n, cfg_.byzantine_count());
  adversary_ = std::make_unique<Adversary>(cfg_.adversary, params_, byz_);
  for (reference_ = 0; reference_ < n && byz_[reference_]; ++reference_) {
  }

  // Leader: the correct replica with the smallest summed latency to the
  // rest, the operator's natural placement for a fixed primary.
  if (cfg_.protocol == Protocol::Cons1) {
    if (cfg_.c1_leader >= 0) {
      leader_ = cfg_.c1_leader;
    } else {
      int64_t best = -1;
      for (uint16_t u = 0; u < n; ++u) {
        if (byz_[u]) continue;
        int64_t sum = 0;
        for (uint16_t v = 0; v < n; ++v)
          if (v != u) sum += matrix_.latency_us(replica_region_[u], replica_region_[v]);
        if (best < 0 || sum < best) {
          best = sum;
          leader_ = u;
        }
      }
    }
  }

  Time esc = cfg_.escalation_timeout_us;
  if (esc == 0) {
    int64_t max_lat = 0;
    for (uint16_t u = 0; u < n; ++u)
      for (uint16_t v = 0; v < n; ++v)
        max_lat = std::max(max_lat, matrix_.latency_us(replica_region_[u], replica_region_[v]));
    esc = std::max<Time>(4 * max_lat, 100'000);
  }

  node_keys_.reserve(n);
  node_pks_.reserve(n);
  for (uint16_t i = 0; i < n; ++i) {
    node_keys_.push_back(derive_keys(cfg_.seed, "replica", i));
    node_pks_.push_back(node_keys_.back().pk);
  }

  genesis_spec_ = genesis_for(cfg_);
  UtxoTable genesis_table = genesis_spec_.build();
  if (cfg_.requesters == 0) feed_ = std::make_unique<SyntheticFeed>(params_, cfg_.beta, cfg_.seed);

  tx_verifier_ = cached_verifier(cache_);

  NetConfig net;
  net.seed = cfg_.seed;
  net.jitter_us = cfg_.jitter_us;
  net.gst_us = cfg_.gst_us;
  net.pre_gst_multiplier = cfg_.pre_gst_mult;
  sim_ = std::make_unique<Simulator>(matrix_, net);

  commits_.assign(n, 0);
  verif_per_node_.assign(n, 0);

  for (uint16_t i = 0; i < n; ++i) {
    ReplicaConfig rc;
    rc.protocol = cfg_.protocol;
    rc.leader = static_cast<NodeId>(leader_ < 0 ? 0 : leader_);
    rc.verify_cost_us = cfg_.verify_cost_us;
    rc.fetch_timeout_us = cfg_.fetch_timeout_us;
    rc.escalation_timeout_us = esc;
    rc.c1_retry_us = cfg_.c1_retry_us;
    rc.bin.round_base_us = cfg_.bin_round_us;
    rc.bin.round_max = cfg_.bin_round_max;
    rc.allow_intra_block_chains = cfg_.allow_chains;
    rc.silent = cfg_.adversary == AdversaryKind::Silent && byz_[i];
    replicas_.push_back(
        std::make_unique<ReplicaNode>(*this, params_, static_cast<NodeId>(i), rc, genesis_table));
    ActorId got = sim_->add_actor(replicas_.back().get(), replica_region_[i]);
    if (got != i) throw std::logic_error("replica actor ids must equal node ids");
  }

  if (cfg_.requesters > 0) {
    std::vector<KeyPair> req_keys;
    std::vector<Account> accounts;
    req_keys.reserve(cfg_.requesters);
    accounts.reserve(cfg_.requesters);
    for (uint32_t i = 0; i < cfg_.requesters; ++i) {
      req_keys.push_back(derive_keys(cfg_.seed, "requester", i));
      accounts.push_back(account_of(req_keys.back().pk));
    }
    for (uint32_t i = 0; i < cfg_.requesters; ++i) {
      Requester::Config rc;
      rc.index = i;
      rc.keys = req_keys[i];
      rc.account = accounts[i];
      rc.payment = cfg_.payment;
      ByteWriter w;
      w.u64(cfg_.seed);
      w.u32(i);
      w.raw(ByteSpan{reinterpret_cast<const uint8_t*>("req-rng"), 7});
      rc.rng_seed = sha256(w.take()).prefix_u64();

      uint64_t start = cfg_.protocol == Protocol::Cons1
                           ? static_cast<uint64_t>(leader_)
                           : account_window_start(rc.account, params_.n);
      for (uint16_t j = 0; j < params_.witness(); ++j)
        rc.submit_to.push_back(static_cast<ActorId>((start + j) % params_.n));
      for (uint16_t j = 0; j < params_.quorum(); ++j)
        rc.connections.push_back(static_cast<ActorId>((start + j) % params_.n));

      for (uint32_t j = 0; j < cfg_.requesters; ++j)
        if (j != i) rc.peers.push_back(accounts[j]);

      size_t spread = cfg_.requester_regions > 0
                          ? std::min<size_t>(cfg_.requester_regions, nregions)
                          : nregions;
      size_t region = (params_.n + i % spread) % nregions;
      // The interval must cover the slowest connection's round trip with room
      // for serialization, or every reply lands after the next poll already
      // retired its request id.
      Time farthest = 0;
      for (ActorId c : rc.connections)
        farthest = std::max(farthest, 2 * matrix_.latency_us(region, replica_region_[c]));
      rc.poll_us = std::max(cfg_.poll_floor_us, farthest + farthest / 2 + 1000);

      requesters_.push_back(std::make_unique<Requester>(*this, std::move(rc)));
      sim_->add_actor(requesters_.back().get(), region);
    }
  }

  if (adversary_->kind() != AdversaryKind::None) sim_->set_send_filter(adversary_->filter());
}

bool World::protocol_sig_ok(NodeId signer, const Digest& msg, const Signature& sig) {
  return tx_verifier_(node_pks_.at(signer), msg, sig);
}

void World::count_tx_verification(NodeId who, const Digest& txid) {
  ++verif_count_[txid];
  ++verif_per_node_.at(who);
}

std::optional<std::vector<Transaction>> World::feed_batch(NodeId proposer, uint64_t height) {
  if (!feed_) return std::nullopt;
  return feed_->batch(proposer, height);
}

void World::block_committed(NodeId who, const Block& b, uint32_t hop, const BlockStats& st) {
  commits_.at(who) = b.index + 1;

  if (who == reference_) {
    BlockRecord r;
    r.index = b.index;
    r.block_id = b.id().hex();
    r.instance = b.meta.instance;
    r.proposal_mask = b.meta.proposal_mask;
    r.candidate_txs = st.candidate_txs;
    r.duplicate_txs = st.duplicate_txs;
    r.invalid_txs = st.invalid_txs;
    r.valid_txs = st.valid_txs;
    r.commit_vtime_us = sim_->now();
    r.commit_hop = hop;
    r.chan_bytes_cum = sim_->chan_bytes_snapshot();
    for (const auto& tx : b.txs) {
      auto it = submit_times_.find(tx.id());
      if (it != submit_times_.end()) {
        uint64_t lat = static_cast<uint64_t>(sim_->now() - it->second);
        r.latency_sum_us += lat;
        ++r.latency_count;
        tx_latencies_.push_back(lat);
      }
    }
    r.reads_cum = reads_total_;
    blocks_.push_back(std::move(r));
  }

  uint64_t done = cfg_.rounds;
  for (uint16_t i = 0; i < params_.n; ++i)
    if (!byz_[i] || cfg_.adversary != AdversaryKind::Silent)
      done = std::min(done, commits_[i]);
  if (done >= cfg_.rounds) sim_->request_stop();
}

void World::bin_round_overflow(NodeId, uint64_t, uint16_t) { flags_.bin_round_overflow = true; }

void World::note_submit(const Digest& txid) {
  submit_times_.emplace(txid, sim_->now());
  ++submits_total_;
}

void World::note_read() { ++reads_total_; }

RunLog World::run() {
  if (ran_) throw std::logic_error("a World runs once");
  ran_ = true;

  Simulator::RunStatus status;
  try {
    status = sim_->run(cfg_.max_vtime_us, cfg_.max_events);
  } catch (const LedgerFault&) {
    flags_.conservation_violation = true;
    status.at = sim_->now();
    status.events = sim_->events_processed();
  }

  RunLog log;
  finish_log(log, status);
  return log;
}

void World::finish_log(RunLog& log, const Simulator::RunStatus& status) {
  log.config = cfg_;
  log.matrix_name = matrix_name_;
  log.leader = leader_;
  log.blocks = blocks_;
  log.reads_total = reads_total_;
  log.submits_total = submits_total_;
  log.end_vtime_us = status.at;
  log.events = status.events;
  log.total_bytes = sim_->total_network_bytes();
  log.chan_bytes_total = sim_->chan_bytes_snapshot();
  log.genesis_total = genesis_spec_.total();
  log.final_supply = replicas_.at(reference_)->ledger().total_supply();

  if (!tx_latencies_.empty()) {
    std::sort(tx_latencies_.begin(), tx_latencies_.end());
    log.tx_latency_p50_ms =
        static_cast<double>(tx_latencies_[tx_latencies_.size() / 2]) / 1000.0;
    log.tx_latency_p95_ms =
        static_cast<double>(tx_latencies_[tx_latencies_.size() * 95 / 100]) / 1000.0;
  }

  if (status.deadline) {
    flags_.aborted = true;
    log.diagnostic = "deadline at " + std::to_string(status.at) + "us after " +
                     std::to_string(status.events) + " events; pending: " + sim_->queue_dump(12);
  }
  for (uint16_t i = 0; i < params_.n; ++i) {
    bool skip = byz_[i] && cfg_.adversary == AdversaryKind::Silent;
    if (!skip && commits_[i] < cfg_.rounds) flags_.no_progress = true;
  }
  if (log.final_supply != log.genesis_total) flags_.conservation_violation = true;

  // Correct replicas must agree on every index they both committed.
  const auto& ref_chain = replicas_.at(reference_)->chain();
  for (uint16_t i = 0; i < params_.n; ++i) {
    if (byz_[i]) continue;
    const auto& c = replicas_[i]->chain();
    size_t common = std::min(c.size(), ref_chain.size());
    for (size_t k = 0; k < common; ++k)
      if (!(c[k].id() == ref_chain[k].id())) flags_.fork = true;
  }

  log.nodes.reserve(params_.n);
  for (uint16_t i = 0; i < params_.n; ++i) {
    NodeSummary s;
    s.id = i;
    s.role = byz_[i] ? adversary_name(cfg_.adversary) : "correct";
    s.region = matrix_.region(replica_region_[i]);
    s.blocks = commits_[i];
    s.chain_digest = replicas_[i]->chain_digest().hex();
    s.egress_bytes = sim_->egress_bytes(i);
    for (size_t c = 0; c < kChanCount; ++c)
      s.egress_chan[c] = sim_->egress_chan_bytes(i, static_cast<Chan>(c));
    s.tx_verifications = verif_per_node_[i];
    log.nodes.push_back(std::move(s));
  }

  for (const auto& [txid, count] : verif_count_) ++log.verifications_histogram[count];
  log.flags = flags_;
}

RunLog run_experiment(const ExperimentConfig& cfg) {
  World w(cfg);
  return w.run();
}

}  // namespace rbb
