#include "rbb/binconsensus.hpp"

#include <algorithm>

namespace rbb {

BinaryInstance::BinaryInstance(const Params& p, NodeId self, uint64_t height, uint16_t inst,
                               BinTimeouts to, Hooks hooks)
    : p_(p), self_(self), height_(height), inst_(inst), to_(to), hooks_(std::move(hooks)) {}

void BinaryInstance::propose(uint8_t v) {
  if (proposed_ || halted_) return;
  proposed_ = true;
  est_ = static_cast<uint8_t>(v & 1);
  enter_round(1);
  step();
}

void BinaryInstance::enter_round(uint32_t r) {
  if (r > to_.round_max) {
    halted_ = true;
    if (hooks_.round_overflow) hooks_.round_overflow();
    return;
  }
  round_ = r;
  RoundState& s = rs(r);
  if (!s.est_sent[est_]) {
    s.est_sent[est_] = true;
    hooks_.broadcast(make_msg(BinEst{height_, inst_, r, est_}), Chan::Bin);
  }
  uint32_t shift = std::min(r - 1, 16u);
  hooks_.arm_round_timer(r, to_.round_base_us << shift);
}

void BinaryInstance::conclude_round(uint8_t next_est, std::optional<uint8_t> decide_value) {
  est_ = next_est;
  if (decide_value && !decided_) {
    decided_ = true;
    decision_ = *decide_value;
    decided_round_ = round_;
    hooks_.decide(decision_);
  }
  // Participation continues briefly after deciding so that nodes still in
  // earlier rounds gather the quorums they need, then the instance quiesces.
  if (decided_ && round_ + 1 > decided_round_ + 2) {
    halted_ = true;
    return;
  }
  enter_round(round_ + 1);
}

void BinaryInstance::step() {
  while (proposed_ && !halted_) {
    uint32_t r = round_;
    RoundState& s = rs(r);

    for (uint8_t v = 0; v < 2; ++v) {
      if (!s.est_sent[v] && s.est_from[v].size() >= p_.witness()) {
        s.est_sent[v] = true;
        hooks_.broadcast(make_msg(BinEst{height_, inst_, r, v}), Chan::Bin);
      }
      if (!s.bin_values[v] && s.est_from[v].size() >= p_.quorum()) {
        s.bin_values[v] = true;
        if (s.first_bin_value == 2) s.first_bin_value = v;
      }
    }

    if (coordinator(r) == self_ && !s.coord_sent && s.first_bin_value != 2) {
      s.coord_sent = true;
      hooks_.broadcast(make_msg(BinCoord{height_, inst_, r, s.first_bin_value}), Chan::Bin);
    }

    if (!s.aux_sent && s.first_bin_value != 2) {
      uint8_t av = 2;
      if (s.coord_value != 2 && s.bin_values[s.coord_value])
        av = s.coord_value;  // adopt the coordinator's (locally justified) suggestion
      else if (s.timer_expired)
        av = s.first_bin_value;  // coordinator silent or unjustified: fall back
      if (av != 2) {
        s.aux_sent = true;
        hooks_.broadcast(make_msg(BinAux{height_, inst_, r, av}), Chan::Bin);
      }
    }

    // A node may not leave round r before its own AUX is out: every correct
    // node that passed r contributed to the n-t AUX quorum laggards need.
    if (!s.aux_sent) return;

    // Decision predicate: n-t distinct AUX senders whose values are all in
    // bin_values. Prefer the singleton matching the round parity (decides),
    // then the other singleton, then the pair.
    uint8_t par = parity(r);
    size_t c[2] = {s.bin_values[0] ? s.aux_from[0].size() : 0,
                   s.bin_values[1] ? s.aux_from[1].size() : 0};
    size_t need = p_.n_minus_t();
    if (c[par] >= need) {
      conclude_round(par, par);
      continue;
    }
    uint8_t other = static_cast<uint8_t>(1 - par);
    if (c[other] >= need) {
      conclude_round(other, std::nullopt);
      continue;
    }
    if (c[0] >= 1 && c[1] >= 1 && c[0] + c[1] >= need) {
      conclude_round(par, std::nullopt);
      continue;
    }
    return;
  }
}

void BinaryInstance::on_est(NodeId src, const BinEst& m) {
  if (halted_ || m.round == 0 || m.round > to_.round_max) return;
  RoundState& s = rs(m.round);
  s.est_from[m.value & 1].insert(src);
  if (!proposed_) return;
  if (m.round == round_) {
    step();
  } else if (m.round < round_) {
    // Keep amplifying for rounds we already left so laggards catch up.
    for (uint8_t v = 0; v < 2; ++v) {
      if (!s.est_sent[v] && s.est_from[v].size() >= p_.witness()) {
        s.est_sent[v] = true;
        hooks_.broadcast(make_msg(BinEst{height_, inst_, m.round, v}), Chan::Bin);
      }
    }
  }
}

void BinaryInstance::on_aux(NodeId src, const BinAux& m) {
  if (halted_ || m.round == 0 || m.round > to_.round_max) return;
  RoundState& s = rs(m.round);
  if (!s.aux_seen.insert(src).second) return;  // one AUX per sender per round
  s.aux_from[m.value & 1].insert(src);
  if (proposed_ && m.round == round_) step();
}

void BinaryInstance::on_coord(NodeId src, const BinCoord& m) {
  if (halted_ || m.round == 0 || m.round > to_.round_max) return;
  if (src != coordinator(m.round)) return;
  RoundState& s = rs(m.round);
  if (s.coord_value == 2) s.coord_value = static_cast<uint8_t>(m.value & 1);
  if (proposed_ && m.round == round_) step();
}

void BinaryInstance::on_round_timer(uint32_t round) {
  if (halted_ || !proposed_ || round != round_) return;
  rs(round).timer_expired = true;
  step();
}

}  // namespace rbb
