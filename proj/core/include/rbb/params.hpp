#pragma once

#include <cstdint>
#include <stdexcept>

namespace rbb {

using NodeId = uint16_t;

// Virtual time in integer microseconds, shared by the simulator and all
// protocol timeouts.
using Time = int64_t;

enum class ProposerMode : uint8_t {
  AllN,    // every replica proposes each round
  TPlus1,  // only t+1 designated proposers
};

// Core consensus sizing. n replicas tolerate t Byzantine ones; all quorum
// arithmetic (t+1, 2t+1, n-t) derives from these two numbers.
struct Params {
  uint16_t n = 4;
  uint16_t t = 1;
  uint32_t beta = 100;  // max transactions per proposal
  ProposerMode proposer_mode = ProposerMode::AllN;

  // Largest t that keeps t strictly below n/3, i.e. the classic n >= 3t+1.
  static uint16_t max_faulty(uint16_t n) {
    if (n < 3) throw std::invalid_argument("need at least 3 replicas");
    return static_cast<uint16_t>((n - 1) / 3);
  }

  uint16_t quorum() const { return static_cast<uint16_t>(2 * t + 1); }       // intersection quorum
  uint16_t witness() const { return static_cast<uint16_t>(t + 1); }          // one-correct quorum
  uint16_t n_minus_t() const { return static_cast<uint16_t>(n - t); }

  uint16_t proposer_count() const {
    return proposer_mode == ProposerMode::AllN ? n : witness();
  }

  void validate() const {
    if (n < 3) throw std::invalid_argument("n < 3");
    if (n > 64) throw std::invalid_argument("n > 64 (proposal bitmaps are 64-bit)");
    if (3 * t + 1 > n) throw std::invalid_argument("n < 3t+1");
    if (beta == 0) throw std::invalid_argument("beta == 0");
  }
};

}  // namespace rbb
