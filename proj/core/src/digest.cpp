#include "rbb/digest.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <stdexcept>

namespace rbb {

std::string to_hex(ByteSpan data) {
  static const char* kHex = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (uint8_t b : data) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0x0f]);
  }
  return out;
}

static int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

Bytes from_hex(const std::string& hex) {
  if (hex.size() % 2 != 0) throw std::invalid_argument("odd hex length");
  Bytes out(hex.size() / 2);
  for (size_t i = 0; i < out.size(); ++i) {
    int hi = hex_nibble(hex[2 * i]);
    int lo = hex_nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("bad hex digit");
    out[i] = static_cast<uint8_t>((hi << 4) | lo);
  }
  return out;
}

Digest Digest::from_hex_str(const std::string& h) {
  Bytes raw = from_hex(h);
  if (raw.size() != kSize) throw std::invalid_argument("digest hex must be 64 chars");
  std::array<uint8_t, kSize> a;
  std::memcpy(a.data(), raw.data(), kSize);
  return Digest(a);
}

uint64_t Digest::prefix_u64() const {
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes_[i];
  return v;
}

Digest sha256(ByteSpan data) {
  std::array<uint8_t, Digest::kSize> out;
  size_t len = 0;
  // EVP_Q_digest is OpenSSL 3.0; one-shot, no explicit ctx management.
  if (!EVP_Q_digest(nullptr, "SHA256", nullptr, data.data(), data.size(), out.data(), &len) ||
      len != Digest::kSize) {
    throw std::runtime_error("SHA256 failed");
  }
  return Digest(out);
}

Digest sha256(const Bytes& data) { return sha256(ByteSpan{data.data(), data.size()}); }

}  // namespace rbb
