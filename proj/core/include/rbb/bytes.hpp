#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace rbb {

using Bytes = std::vector<uint8_t>;
using ByteSpan = std::span<const uint8_t>;

// Immutable shared payload. Broadcast fan-out shares one allocation.
using BytesPtr = std::shared_ptr<const Bytes>;

inline BytesPtr make_bytes(Bytes b) { return std::make_shared<const Bytes>(std::move(b)); }

std::string to_hex(ByteSpan data);
Bytes from_hex(const std::string& hex);  // throws std::invalid_argument on bad input

}  // namespace rbb
