#include "doctest.h"

#include <fstream>
#include <sstream>

#include "rbb/latency.hpp"
#include "rbb/simulator.hpp"

using namespace rbb;

namespace {

// Scriptable actor: records every delivery and hands control to lambdas.
struct Probe : Actor {
  struct Rec {
    Time at;
    ActorId src;
    uint32_t hop;
    Chan chan;
  };
  std::vector<Rec> recs;
  std::vector<std::pair<Time, uint32_t>> timers;  // (fire time, hop)
  std::function<void(Simulator&)> start;
  std::function<void(Simulator&, ActorId, const Message&)> handler;
  std::function<void(Simulator&, const TimerFire&)> on_fire;

  void on_start(Simulator& s) override {
    if (start) start(s);
  }
  void on_message(Simulator& s, ActorId src, const Message& m) override {
    recs.push_back({s.now(), src, s.current_hop(), chan_of(m)});
    if (handler) handler(s, src, m);
  }
  void on_timer(Simulator& s, const TimerFire& t) override {
    timers.push_back({s.now(), s.current_hop()});
    if (on_fire) on_fire(s, t);
  }
};

MsgPtr echo_msg(uint16_t proposer = 0) {
  RbEcho e;
  e.height = 1;
  e.proposer = proposer;
  e.digest = sha256(Bytes{1});
  return make_msg(std::move(e));
}

}  // namespace

TEST_CASE("aws14 matrix shape and spot values") {
  const LatencyMatrix& m = LatencyMatrix::aws14();
  REQUIRE(m.size() == 14);
  CHECK(m.region(0) == "tokyo");
  CHECK(m.region(4) == "sydney");
  CHECK(m.region(9) == "saopaulo");
  CHECK(m.region(13) == "oregon");

  // the two extremes of the measured grid
  CHECK(m.latency_us(4, 9) == 332000);
  CHECK(m.latency_us(9, 4) == 332000);
  CHECK(m.latency_us(8, 7) == 12000);  // london-ireland
  CHECK(m.mbps_x1000(0, 1) == 551000);  // tokyo-seoul, 551 Mbps

  for (size_t i = 0; i < m.size(); ++i) {
    CHECK(m.latency_us(i, i) == 0);
    for (size_t j = 0; j < m.size(); ++j) {
      CHECK(m.latency_us(i, j) == m.latency_us(j, i));
      CHECK(m.mbps_x1000(i, j) == m.mbps_x1000(j, i));
      if (i != j) CHECK(m.latency_us(i, j) > 0);
      CHECK(m.mbps_x1000(i, j) > 0);
    }
  }

  // most central region minimizes the row sum
  size_t best = 0;
  for (size_t i = 1; i < m.size(); ++i)
    if (m.latency_sum_from(i) < m.latency_sum_from(best)) best = i;
  CHECK(m.most_central() == best);

  // validate flags the handful of links measured above the nominal NIC rate
  auto warnings = m.validate();
  CHECK(!warnings.empty());
  for (const auto& w : warnings) CHECK(w.find("exceeds nominal") != std::string::npos);
}

TEST_CASE("shipped csv equals the builtin matrix") {
  std::ifstream in(std::string(RBB_DATA_DIR) + "/aws14_latency.csv");
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  LatencyMatrix file = LatencyMatrix::parse_csv(buf.str());
  const LatencyMatrix& builtin = LatencyMatrix::aws14();
  REQUIRE(file.size() == builtin.size());
  for (size_t i = 0; i < file.size(); ++i) {
    CHECK(file.region(i) == builtin.region(i));
    for (size_t j = 0; j < file.size(); ++j) {
      CHECK(file.latency_us(i, j) == builtin.latency_us(i, j));
      CHECK(file.mbps_x1000(i, j) == builtin.mbps_x1000(i, j));
    }
  }
}

TEST_CASE("csv roundtrip and parse errors") {
  LatencyMatrix u = LatencyMatrix::uniform(3, 50000, 8.0);
  CHECK(u.latency_us(0, 1) == 50000);
  CHECK(u.latency_us(1, 1) == 0);
  CHECK(u.mbps_x1000(0, 2) == 8000);
  // 8 Mbps == 1 byte/us, so serialization is byte count; ceil rounding
  CHECK(u.ser_delay_us(0, 1, 1500) == 1500);
  CHECK(LatencyMatrix::uniform(2, 1000, 12.0).ser_delay_us(0, 1, 1) == 1);
  CHECK(u.validate().empty());

  LatencyMatrix back = LatencyMatrix::parse_csv(u.to_csv());
  CHECK(back.to_csv() == u.to_csv());
  for (size_t i = 0; i < 3; ++i)
    for (size_t j = 0; j < 3; ++j) {
      CHECK(back.latency_us(i, j) == u.latency_us(i, j));
      CHECK(back.mbps_x1000(i, j) == u.mbps_x1000(i, j));
    }

  CHECK_THROWS_AS(LatencyMatrix::parse_csv("region,a\n"), std::invalid_argument);
  CHECK_THROWS_AS(LatencyMatrix::parse_csv("region,a\nb,0/10\n"), std::invalid_argument);
  CHECK_THROWS_AS(LatencyMatrix::parse_csv("region,a,b\na,0/10\nb,5/10,0/10\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(LatencyMatrix::parse_csv("region,a\na,5;10\n"), std::invalid_argument);
  CHECK_THROWS_AS(LatencyMatrix::parse_csv("region,a\na,x/10\n"), std::invalid_argument);
  // diagonal latency must be zero, bandwidth positive
  CHECK_THROWS_AS(LatencyMatrix::parse_csv("region,a\na,3/10\n"), std::invalid_argument);
  CHECK_THROWS_AS(LatencyMatrix::parse_csv("region,a,b\na,0/10,4/0\nb,4/10,0/10\n"),
                  std::invalid_argument);
}

TEST_CASE("delivery pays latency, serialization, and per-link queueing") {
  // 8 Mbps: serialization is exactly one microsecond per byte.
  LatencyMatrix m = LatencyMatrix::uniform(2, 10000, 8.0);
  Simulator sim(m, NetConfig{});
  Probe a, b;
  ActorId ia = sim.add_actor(&a, 0);
  ActorId ib = sim.add_actor(&b, 1);

  MsgPtr msg = echo_msg();
  const int64_t ser = static_cast<int64_t>(wire_size(*msg));
  a.start = [&](Simulator& s) {
    s.send(ib, msg);
    s.send(ib, msg);  // queues behind the first on the same link
  };
  auto st = sim.run(1'000'000, 1'000'000);
  CHECK(st.idle);

  REQUIRE(b.recs.size() == 2);
  CHECK(b.recs[0].at == ser + 10000);
  CHECK(b.recs[1].at == 2 * ser + 10000);
  CHECK(b.recs[0].src == ia);
  CHECK(b.recs[0].hop == 1);
  CHECK(b.recs[1].hop == 1);
  CHECK(b.recs[0].chan == Chan::RbDigest);

  CHECK(sim.total_network_bytes() == 2 * static_cast<uint64_t>(ser));
  CHECK(sim.egress_bytes(ia) == 2 * static_cast<uint64_t>(ser));
  CHECK(sim.egress_bytes(ib) == 0);
  CHECK(sim.pair_msgs(ia, ib, Chan::RbDigest) == 2);
  CHECK(sim.pair_msgs(ib, ia, Chan::RbDigest) == 0);
  CHECK(sim.chan_traffic(Chan::RbDigest).msgs == 2);
  CHECK(sim.chan_traffic(Chan::RbPayload).bytes == 0);
}

TEST_CASE("self-sends are instantaneous and never touch the wire") {
  LatencyMatrix m = LatencyMatrix::uniform(1, 0, 100.0);
  Simulator sim(m, NetConfig{});
  Probe a;
  ActorId ia = sim.add_actor(&a, 0);
  a.start = [&](Simulator& s) { s.send(ia, echo_msg()); };
  CHECK(sim.run(1000, 1000).idle);
  REQUIRE(a.recs.size() == 1);
  CHECK(a.recs[0].at == 0);
  CHECK(a.recs[0].hop == 1);
  CHECK(sim.total_network_bytes() == 0);
  CHECK(sim.egress_bytes(ia) == 0);
}

TEST_CASE("hop counts message depth; timers resume where they were armed") {
  LatencyMatrix m = LatencyMatrix::uniform(2, 1000, 100.0);
  Simulator sim(m, NetConfig{});
  Probe a, b;
  ActorId ia = sim.add_actor(&a, 0);
  ActorId ib = sim.add_actor(&b, 1);

  a.start = [&](Simulator& s) { s.send(ib, echo_msg()); };
  b.handler = [&](Simulator& s, ActorId, const Message&) {
    s.set_timer(5000, TimerFire{7, 0, 0, 0});  // armed at hop 1
    s.send(ia, echo_msg());                    // travels, hop 2 at a
  };
  b.on_fire = [&](Simulator& s, const TimerFire&) {
    s.rebase_hop();
    s.send(ia, echo_msg(1));  // a new round: depth restarts at 1
  };
  CHECK(sim.run(1'000'000, 1'000'000).idle);

  REQUIRE(b.recs.size() == 1);
  CHECK(b.recs[0].hop == 1);
  REQUIRE(a.recs.size() == 2);
  CHECK(a.recs[0].hop == 2);
  REQUIRE(b.timers.size() == 1);
  CHECK(b.timers[0].second == 1);  // resumed, not advanced
  CHECK(a.recs[1].hop == 1);       // rebased before the send
}

TEST_CASE("jitter stays inside its bound; equal seeds replay exactly") {
  LatencyMatrix m = LatencyMatrix::uniform(2, 10000, 1000.0);
  auto run_once = [&](uint64_t seed) {
    NetConfig nc;
    nc.seed = seed;
    nc.jitter_us = 400;
    Simulator sim(m, nc);
    Probe a, b;
    ActorId ib = 0;
    sim.add_actor(&a, 0);
    ib = sim.add_actor(&b, 1);
    a.start = [&](Simulator& s) {
      for (int i = 0; i < 50; ++i) s.send(ib, echo_msg());
    };
    CHECK(sim.run(10'000'000, 1'000'000).idle);
    std::vector<Time> at;
    for (auto& r : b.recs) at.push_back(r.at);
    return at;
  };

  MsgPtr probe = echo_msg();
  const int64_t ser = LatencyMatrix::uniform(2, 10000, 1000.0).ser_delay_us(0, 1, wire_size(*probe));
  std::vector<Time> first = run_once(11);
  REQUIRE(first.size() == 50);
  // deliveries are processed in time order, not necessarily send order
  for (size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i] >= 10000 + ser);
    CHECK(first[i] <= 10000 + 50 * ser + 400);
  }
  CHECK(run_once(11) == first);
  CHECK(run_once(12) != first);
}

TEST_CASE("pre-GST sends take a bounded random penalty; post-GST none") {
  LatencyMatrix m = LatencyMatrix::uniform(2, 10000, 1000.0);
  NetConfig nc;
  nc.seed = 5;
  nc.gst_us = 40000;
  nc.pre_gst_multiplier = 3.0;  // up to two extra latencies before GST
  Simulator sim(m, nc);
  Probe a, b;
  ActorId ib = 0;
  sim.add_actor(&a, 0);
  ib = sim.add_actor(&b, 1);

  MsgPtr msg = echo_msg();
  const int64_t ser = m.ser_delay_us(0, 1, wire_size(*msg));
  a.start = [&](Simulator& s) {
    s.send(ib, msg);
    s.set_timer(50000, TimerFire{1, 0, 0, 0});
  };
  a.on_fire = [&](Simulator& s, const TimerFire&) { s.send(ib, msg); };
  CHECK(sim.run(10'000'000, 1'000'000).idle);

  REQUIRE(b.recs.size() == 2);
  CHECK(b.recs[0].at >= ser + 10000);
  CHECK(b.recs[0].at <= ser + 30000);
  CHECK(b.recs[1].at == 50000 + ser + 10000);  // after GST: exact
}

TEST_CASE("send filter can drop or replace; inject is out of band") {
  LatencyMatrix m = LatencyMatrix::uniform(2, 1000, 100.0);
  Simulator sim(m, NetConfig{});
  Probe a, b;
  ActorId ia = sim.add_actor(&a, 0);
  ActorId ib = sim.add_actor(&b, 1);

  sim.set_send_filter([&](ActorId, ActorId, const MsgPtr& msg) -> MsgPtr {
    if (std::holds_alternative<RbEcho>(*msg)) return nullptr;  // suppress echoes
    if (std::holds_alternative<RbReady>(*msg)) {
      RbReady r = std::get<RbReady>(*msg);
      r.digest = sha256(Bytes{0xbb});
      return make_msg(std::move(r));
    }
    return msg;
  });

  a.start = [&](Simulator& s) {
    s.send(ib, echo_msg());  // dropped, never charged
    RbReady r;
    r.height = 1;
    r.digest = sha256(Bytes{0xaa});
    s.send(ib, make_msg(std::move(r)));
  };
  CHECK(sim.run(1'000'000, 1'000'000).idle);

  REQUIRE(b.recs.size() == 1);
  CHECK(b.recs[0].chan == Chan::RbDigest);
  b.recs.clear();
  CHECK(sim.chan_traffic(Chan::RbDigest).msgs == 1);  // the drop left no trace

  // inject: delivered at the requested offset, nothing charged
  uint64_t bytes_before = sim.total_network_bytes();
  sim.inject(ib, echo_msg(), 250);
  CHECK(sim.run(2'000'000, 1'000'000).idle);
  REQUIRE(b.recs.size() == 1);
  CHECK(sim.total_network_bytes() == bytes_before);
  (void)ia;
}

TEST_CASE("deadline stops the run and the queue dump names what is pending") {
  LatencyMatrix m = LatencyMatrix::uniform(2, 1000, 100.0);
  Simulator sim(m, NetConfig{});
  Probe a, b;
  sim.add_actor(&a, 0);
  ActorId ib = sim.add_actor(&b, 1);
  a.start = [&](Simulator& s) {
    s.set_timer(900000, TimerFire{42, 0, 0, 0});
    s.send(ib, echo_msg());
  };
  auto st = sim.run(500, 1'000'000);
  CHECK(st.deadline);
  CHECK_FALSE(st.idle);
  std::string dump = sim.queue_dump(4);
  CHECK(dump.find("queued") != std::string::npos);
  CHECK(dump.find("timer@0 kind=42") != std::string::npos);

  // stop requests end the run from inside a handler
  Simulator sim2(m, NetConfig{});
  Probe c, d;
  sim2.add_actor(&c, 0);
  ActorId id2 = sim2.add_actor(&d, 1);
  c.start = [&](Simulator& s) {
    s.send(id2, echo_msg());
    s.send(id2, echo_msg());
  };
  d.handler = [&](Simulator& s, ActorId, const Message&) { s.request_stop(); };
  auto st2 = sim2.run(1'000'000, 1'000'000);
  CHECK(st2.stopped);
  CHECK(d.recs.size() == 1);
}

TEST_CASE("every wire message survives an encode-decode roundtrip") {
  auto roundtrip = [](const Message& m) {
    Bytes b = encode_message(m);
    CHECK(b.size() == wire_size(m));
    return decode_message(ByteSpan{b.data(), b.size()});
  };

  RbInit init;
  init.height = 9;
  init.proposer = 3;
  init.payload = std::make_shared<const Bytes>(Bytes{1, 2, 3, 4, 5});
  Message m = roundtrip(init);
  CHECK(std::get<RbInit>(m).height == 9);
  CHECK(*std::get<RbInit>(m).payload == Bytes{1, 2, 3, 4, 5});

  RbEcho echo;
  echo.height = 2;
  echo.proposer = 7;
  echo.digest = sha256(Bytes{9});
  CHECK(std::get<RbEcho>(roundtrip(echo)).digest == echo.digest);

  RbReady ready;
  ready.proposer = 1;
  ready.digest = sha256(Bytes{8});
  CHECK(std::get<RbReady>(roundtrip(ready)).digest == ready.digest);

  RbFetchReq freq;
  freq.height = 5;
  freq.digest = sha256(Bytes{7});
  CHECK(std::get<RbFetchReq>(roundtrip(freq)).height == 5);

  RbFetchResp fresp;
  fresp.height = 5;
  fresp.payload = std::make_shared<const Bytes>(Bytes{});
  CHECK(std::get<RbFetchResp>(roundtrip(fresp)).payload->empty());

  BinEst est{4, 2, 3, 1};
  CHECK(std::get<BinEst>(roundtrip(est)).round == 3);
  BinAux aux{4, 2, 3, 0};
  CHECK(std::get<BinAux>(roundtrip(aux)).value == 0);
  BinCoord coord{4, 2, 3, 1};
  CHECK(std::get<BinCoord>(roundtrip(coord)).inst == 2);

  Attest at;
  at.height = 6;
  at.verifier = 2;
  at.verdicts = {{0, 0}, {3, 2}, {9, 1}};
  KeyPair kp = keygen(ByteSpan{sha256(Bytes{1}).data(), Digest::kSize});
  at.sig = sign(kp.sk, attest_signing_hash(at));
  Message am = roundtrip(at);
  CHECK(std::get<Attest>(am).verdicts == at.verdicts);
  CHECK(verify(kp.pk, attest_signing_hash(std::get<Attest>(am)), std::get<Attest>(am).sig));

  C1Preprepare pp;
  pp.height = 3;
  pp.attempt = 1;
  pp.payload = std::make_shared<const Bytes>(Bytes{6});
  CHECK(std::get<C1Preprepare>(roundtrip(pp)).attempt == 1);
  C1Prepare prep;
  prep.digest = sha256(Bytes{5});
  CHECK(std::get<C1Prepare>(roundtrip(prep)).digest == prep.digest);
  C1Commit com;
  com.attempt = 4;
  CHECK(std::get<C1Commit>(roundtrip(com)).attempt == 4);

  Transaction tx;
  tx.nonce = 77;
  tx.inputs.push_back({sha256(Bytes{1}), 0, kp.pk, Signature{}});
  tx.outputs.push_back({10, account_of(kp.pk)});
  TxSubmit sub;
  sub.tx = std::make_shared<const Transaction>(tx);
  CHECK(std::get<TxSubmit>(roundtrip(sub)).tx->id() == tx.id());

  UtxoQuery q;
  q.account = account_of(kp.pk);
  q.rid = 12;
  CHECK(std::get<UtxoQuery>(roundtrip(q)).rid == 12);

  UtxoReply rep;
  rep.account = q.account;
  rep.rid = 12;
  rep.utxos = {{sha256(Bytes{2}), 1, 500}};
  Message rm = roundtrip(rep);
  CHECK(std::get<UtxoReply>(rm).utxos == rep.utxos);

  Bytes empty;
  CHECK_THROWS_AS(decode_message(ByteSpan{empty.data(), 0}), DecodeError);
  Bytes junk{0xff, 1, 2};
  CHECK_THROWS_AS(decode_message(ByteSpan{junk.data(), junk.size()}), DecodeError);
}
