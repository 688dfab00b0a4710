#include "rbb/serialize.hpp"

namespace rbb {

void ByteWriter::u16(uint16_t v) {
  out_.push_back(static_cast<uint8_t>(v));
  out_.push_back(static_cast<uint8_t>(v >> 8));
}

void ByteWriter::u32(uint32_t v) {
  for (int i = 0; i < 4; ++i) out_.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(uint64_t v) {
  for (int i = 0; i < 8; ++i) out_.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void ByteWriter::raw(ByteSpan data) { out_.insert(out_.end(), data.begin(), data.end()); }

void ByteWriter::var_bytes(ByteSpan data) {
  u32(static_cast<uint32_t>(data.size()));
  raw(data);
}

uint8_t ByteReader::u8() {
  need(1);
  return data_[pos_++];
}

uint16_t ByteReader::u16() {
  need(2);
  uint16_t v = static_cast<uint16_t>(data_[pos_] | (data_[pos_ + 1] << 8));
  pos_ += 2;
  return v;
}

uint32_t ByteReader::u32() {
  need(4);
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | data_[pos_ + static_cast<size_t>(i)];
  pos_ += 4;
  return v;
}

uint64_t ByteReader::u64() {
  need(8);
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | data_[pos_ + static_cast<size_t>(i)];
  pos_ += 8;
  return v;
}

ByteSpan ByteReader::raw(size_t len) {
  need(len);
  ByteSpan s = data_.subspan(pos_, len);
  pos_ += len;
  return s;
}

ByteSpan ByteReader::var_bytes(size_t max_len) {
  uint32_t len = u32();
  if (len > max_len) throw DecodeError("length field exceeds bound");
  return raw(len);
}

Digest ByteReader::digest() {
  ByteSpan s = raw(Digest::kSize);
  std::array<uint8_t, Digest::kSize> a;
  std::copy(s.begin(), s.end(), a.begin());
  return Digest(a);
}

}  // namespace rbb
