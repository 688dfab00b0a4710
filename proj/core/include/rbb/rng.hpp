#pragma once

#include <cstdint>

namespace rbb {

// splitmix64: tiny, fast, identical output on every platform. std::mt19937
// would also be portable but the distribution adapters are not; all random
// draws in the simulation go through these helpers instead.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound) without modulo bias (rejection sampling).
  uint64_t below(uint64_t bound) {
    if (bound <= 1) return 0;
    uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform in [lo, hi] inclusive.
  int64_t range(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo + 1)));
  }

  double unit() {  // [0, 1)
    return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0);
  }

  // Derive an independent stream; used to give each actor its own generator.
  Rng fork(uint64_t salt) {
    uint64_t s = next() ^ (salt * 0x9e3779b97f4a7c15ULL);
    return Rng(s);
  }

 private:
  uint64_t state_;
};

}  // namespace rbb
