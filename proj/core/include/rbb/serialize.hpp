#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "rbb/bytes.hpp"
#include "rbb/digest.hpp"

namespace rbb {

// Thrown on malformed input: truncation, bad tags, oversized lengths,
// trailing bytes. Decoders never crash on arbitrary input.
class DecodeError : public std::runtime_error {
 public:
  explicit DecodeError(const std::string& what) : std::runtime_error(what) {}
};

// Canonical encoding: fixed-width little-endian integers, u32 length
// prefixes for variable-size fields. Every value has exactly one encoding.
class ByteWriter {
 public:
  void u8(uint8_t v) { out_.push_back(v); }
  void u16(uint16_t v);
  void u32(uint32_t v);
  void u64(uint64_t v);
  void raw(ByteSpan data);                    // no length prefix
  void var_bytes(ByteSpan data);              // u32 length prefix
  void digest(const Digest& d) { raw(ByteSpan{d.data(), Digest::kSize}); }

  const Bytes& bytes() const { return out_; }
  Bytes take() { return std::move(out_); }
  size_t size() const { return out_.size(); }

 private:
  Bytes out_;
};

class ByteReader {
 public:
  explicit ByteReader(ByteSpan data) : data_(data) {}

  uint8_t u8();
  uint16_t u16();
  uint32_t u32();
  uint64_t u64();
  ByteSpan raw(size_t len);
  ByteSpan var_bytes(size_t max_len);
  Digest digest();

  size_t remaining() const { return data_.size() - pos_; }
  // Canonical decoders call this last; trailing bytes are an error.
  void expect_done() const {
    if (pos_ != data_.size()) throw DecodeError("trailing bytes");
  }

 private:
  void need(size_t n) const {
    if (data_.size() - pos_ < n) throw DecodeError("truncated input");
  }
  ByteSpan data_;
  size_t pos_ = 0;
};

}  // namespace rbb
