#include "rbb/adversary.hpp"

#include <algorithm>

#include "rbb/rng.hpp"
#include "rbb/serialize.hpp"

namespace rbb {

const char* adversary_name(AdversaryKind k) {
  switch (k) {
    case AdversaryKind::None: return "none";
    case AdversaryKind::Byz1: return "byz1";
    case AdversaryKind::Byz2: return "byz2";
    case AdversaryKind::Silent: return "silent";
  }
  return "none";
}

std::optional<AdversaryKind> adversary_from_name(const std::string& s) {
  if (s == "none") return AdversaryKind::None;
  if (s == "byz1") return AdversaryKind::Byz1;
  if (s == "byz2") return AdversaryKind::Byz2;
  if (s == "silent") return AdversaryKind::Silent;
  return std::nullopt;
}

std::vector<bool> Adversary::top_ids(uint16_t n, uint16_t count) {
  std::vector<bool> byz(n, false);
  for (uint16_t i = 0; i < count && i < n; ++i) byz[n - 1 - i] = true;
  return byz;
}

Adversary::Adversary(AdversaryKind kind, const Params& p, std::vector<bool> byz)
    : kind_(kind), p_(p), byz_(std::move(byz)) {
  byz_.resize(p_.n, false);
  for (bool b : byz_)
    if (b) ++count_;
  for (NodeId id = 0; id < p_.n && targets_.size() < static_cast<size_t>(p_.witness()); ++id)
    if (!byz_[id]) targets_.push_back(id);
}

namespace {

// Deterministic garbage of a given size, distinct per destination.
BytesPtr junk_payload(size_t len, uint64_t height, uint16_t proposer, ActorId dst) {
  ByteWriter w;
  w.u64(height);
  w.u16(proposer);
  w.u32(dst);
  Rng rng(sha256(w.take()).prefix_u64());
  Bytes out(len);
  for (auto& b : out) b = static_cast<uint8_t>(rng.next());
  return make_bytes(std::move(out));
}

uint8_t flip(uint8_t v) { return v ? 0 : 1; }

}  // namespace

MsgPtr Adversary::transform(ActorId src, ActorId dst, const MsgPtr& m) const {
  if (kind_ == AdversaryKind::None) return m;
  if (src >= p_.n) return m;  // clients are never faulty
  if (!byz_[src]) return m;

  if (kind_ == AdversaryKind::Silent) return nullptr;

  if (kind_ == AdversaryKind::Byz1) {
    if (const auto* init = std::get_if<RbInit>(m.get())) {
      if (init->proposer != src || !init->payload) return m;
      RbInit fake = *init;
      fake.payload = junk_payload(init->payload->size(), init->height, init->proposer, dst);
      return make_msg(std::move(fake));
    }
    if (const auto* est = std::get_if<BinEst>(m.get())) {
      BinEst f = *est;
      f.value = flip(f.value);
      return make_msg(std::move(f));
    }
    if (const auto* aux = std::get_if<BinAux>(m.get())) {
      BinAux f = *aux;
      f.value = flip(f.value);
      return make_msg(std::move(f));
    }
    if (const auto* co = std::get_if<BinCoord>(m.get())) {
      BinCoord f = *co;
      f.value = flip(f.value);
      return make_msg(std::move(f));
    }
    return m;
  }

  // Byz2
  if (const auto* init = std::get_if<RbInit>(m.get())) {
    if (init->proposer != src) return m;
    if (dst < p_.n && byz_[dst]) return m;  // coalition members keep the payload
    bool target = std::find(targets_.begin(), targets_.end(), static_cast<NodeId>(dst)) !=
                  targets_.end();
    return target ? m : nullptr;
  }
  if (std::holds_alternative<RbFetchResp>(*m)) return nullptr;
  return m;
}

SendFilter Adversary::filter() const {
  if (kind_ == AdversaryKind::None) return {};
  // The adversary outlives the simulator; capturing `this` is safe.
  return [this](ActorId src, ActorId dst, const MsgPtr& m) { return transform(src, dst, m); };
}

}  // namespace rbb
