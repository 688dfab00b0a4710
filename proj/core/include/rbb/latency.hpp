#pragma once

#include <string>
#include <vector>

#include "rbb/bytes.hpp"

namespace rbb {

// Pairwise link model between regions: one-way latency plus a bandwidth
// used for per-message serialization delay. Values are stored as integers
// (microseconds; millibit-per-microsecond, i.e. kbps) so the simulation
// stays exact across platforms.
class LatencyMatrix {
 public:
  LatencyMatrix() = default;

  size_t size() const { return regions_.size(); }
  const std::vector<std::string>& regions() const { return regions_; }
  const std::string& region(size_t i) const { return regions_[i]; }

  int64_t latency_us(size_t from, size_t to) const { return lat_us_[from * size() + to]; }
  // Bandwidth in thousandths of a Mbps (1 Mbps == 1 bit/us).
  int64_t mbps_x1000(size_t from, size_t to) const { return bw_kbps_[from * size() + to]; }

  // Time to push `bytes` through the link (ceil division, never negative).
  int64_t ser_delay_us(size_t from, size_t to, uint64_t bytes) const;

  // Row mean one-way latency to all other regions; the most central region
  // minimizes it (used for default leader placement).
  int64_t latency_sum_from(size_t i) const;
  size_t most_central() const;

  // Hard structural errors throw std::invalid_argument. Soft findings
  // (asymmetry, links faster than the nominal instance NIC) come back as
  // human-readable warnings.
  std::vector<std::string> validate() const;

  // CSV grid: header row/column carry region names, each cell is
  // "latency_ms/bandwidth_mbps" (decimals allowed).
  static LatencyMatrix parse_csv(const std::string& text);
  std::string to_csv() const;

  // Measured matrix across 14 AWS regions that ships with the library.
  static const LatencyMatrix& aws14();

  // Synthetic homogeneous matrix: every distinct pair the same one-way
  // latency and bandwidth, diagonal zero.
  static LatencyMatrix uniform(size_t regions, int64_t latency_us, double mbps);

  static LatencyMatrix from_grid(std::vector<std::string> regions, std::vector<int64_t> lat_us,
                                 std::vector<int64_t> bw_kbps);

 private:
  std::vector<std::string> regions_;
  std::vector<int64_t> lat_us_;    // row-major
  std::vector<int64_t> bw_kbps_;
};

// Links faster than this are suspicious for a single instance NIC and are
// reported (not corrected) by validate().
inline constexpr int64_t kNominalNicMbps = 750;

}  // namespace rbb
