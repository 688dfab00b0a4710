#pragma once

#include <array>
#include <compare>
#include <cstring>
#include <functional>

#include "rbb/bytes.hpp"

namespace rbb {

// SHA-256 output. Used for message digests, transaction ids and account ids.
class Digest {
 public:
  static constexpr size_t kSize = 32;

  Digest() { bytes_.fill(0); }
  explicit Digest(const std::array<uint8_t, kSize>& b) : bytes_(b) {}

  const std::array<uint8_t, kSize>& bytes() const { return bytes_; }
  uint8_t* data() { return bytes_.data(); }
  const uint8_t* data() const { return bytes_.data(); }

  std::string hex() const { return to_hex(ByteSpan{bytes_.data(), kSize}); }
  static Digest from_hex_str(const std::string& h);

  // First 8 bytes interpreted as a little-endian integer. Deterministic
  // source of pseudo-randomness for assignment windows and tie-breaking.
  uint64_t prefix_u64() const;

  auto operator<=>(const Digest& o) const { return bytes_ <=> o.bytes_; }
  bool operator==(const Digest& o) const = default;

 private:
  std::array<uint8_t, kSize> bytes_;
};

Digest sha256(ByteSpan data);
Digest sha256(const Bytes& data);

struct DigestHash {
  size_t operator()(const Digest& d) const {
    size_t v;
    std::memcpy(&v, d.data(), sizeof(v));
    return v;
  }
};

}  // namespace rbb
