#include "rbb/latency.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace rbb {

namespace {

// Measured between 14 AWS regions: one-way latency (ms) below the
// diagonal, bandwidth (Mbps) above it. Stored as two packed triangles.
const char* kAwsRegions[14] = {"tokyo",  "seoul",     "mumbai", "singapore", "sydney",
                               "canada", "frankfurt", "ireland", "london",   "saopaulo",
                               "nvirginia", "ohio",   "ncalifornia", "oregon"};

// lat[i][j] for i > j, milliseconds, row by row.
const int kAwsLatencyMs[] = {
    33,                                                                // seoul
    133, 164,                                                          // mumbai
    69, 100, 67,                                                       // singapore
    106, 135, 235, 170,                                                // sydney
    166, 185, 196, 220, 225,                                           // canada
    244, 275, 112, 178, 292, 102,                                      // frankfurt
    226, 246, 122, 188, 286, 78, 25,                                   // ireland
    255, 284, 111, 179, 281, 90, 15, 12,                               // london
    271, 293, 302, 328, 332, 125, 210, 184, 192,                       // saopaulo
    162, 209, 182, 238, 205, 15, 89, 85, 76, 122,                      // nvirginia
    169, 199, 193, 227, 196, 25, 99, 91, 87, 131, 13,                  // ohio
    120, 150, 262, 178, 148, 76, 148, 142, 138, 182, 64, 52,           // ncalifornia
    105, 135, 235, 163, 162, 66, 164, 141, 158, 183, 76, 71, 22,       // oregon
};

// bw[i][j] for i < j, tenths of Mbps, row by row.
const int kAwsBandwidthDeciMbps[] = {
    5510, 1290, 2400, 1610, 1060, 740, 664, 590, 554, 901, 962, 1290, 1320,  // tokyo
    1370, 1570, 1410, 915, 540, 608, 547, 566, 842, 1140, 842, 1160,         // seoul
    1210, 670, 909, 1760, 1780, 1450, 467, 819, 805, 691, 642,               // mumbai
    909, 832, 907, 861, 904, 408, 595, 649, 805, 773,                        // singapore
    771, 613, 538, 512, 402, 749, 997, 1350, 1190,                           // sydney
    1660, 2500, 1640, 1590, 8080, 7600, 2050, 1680,                          // canada
    4770, 8230, 929, 2220, 2200, 1440, 857,                                  // frankfurt
    8290, 1140, 1850, 1830, 1040, 1170,                                      // ireland
    1070, 1900, 1950, 1070, 855,                                             // london
    1310, 1240, 777, 817,                                                    // saopaulo
    8270, 2320, 1860,                                                        // nvirginia
    4280, 2190,                                                              // ohio
    6810,                                                                    // ncalifornia
};

// Bandwidth charged on the (free) diagonal: loopback, effectively 10 Gbps.
constexpr int64_t kDiagonalKbps = 10000 * 1000;

std::string format_ms_or_mbps(int64_t thousandths) {
  char buf[32];
  if (thousandths % 1000 == 0)
    snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(thousandths / 1000));
  else
    snprintf(buf, sizeof(buf), "%.3f", static_cast<double>(thousandths) / 1000.0);
  return buf;
}

}  // namespace

LatencyMatrix LatencyMatrix::from_grid(std::vector<std::string> regions,
                                       std::vector<int64_t> lat_us, std::vector<int64_t> bw_kbps) {
  size_t r = regions.size();
  if (lat_us.size() != r * r || bw_kbps.size() != r * r)
    throw std::invalid_argument("latency matrix: grid size mismatch");
  LatencyMatrix m;
  m.regions_ = std::move(regions);
  m.lat_us_ = std::move(lat_us);
  m.bw_kbps_ = std::move(bw_kbps);
  for (size_t i = 0; i < r; ++i) {
    if (m.lat_us_[i * r + i] != 0)
      throw std::invalid_argument("latency matrix: diagonal latency must be 0");
    for (size_t j = 0; j < r; ++j) {
      if (m.lat_us_[i * r + j] < 0) throw std::invalid_argument("latency matrix: negative latency");
      if (m.bw_kbps_[i * r + j] <= 0)
        throw std::invalid_argument("latency matrix: bandwidth must be positive");
    }
  }
  return m;
}

int64_t LatencyMatrix::ser_delay_us(size_t from, size_t to, uint64_t bytes) const {
  // 1 Mbps == 1 bit/us, bandwidth stored in kbps: us = bits * 1000 / kbps.
  int64_t kbps = mbps_x1000(from, to);
  uint64_t bits = bytes * 8;
  return static_cast<int64_t>((bits * 1000 + static_cast<uint64_t>(kbps) - 1) /
                              static_cast<uint64_t>(kbps));
}

int64_t LatencyMatrix::latency_sum_from(size_t i) const {
  int64_t sum = 0;
  for (size_t j = 0; j < size(); ++j)
    if (j != i) sum += latency_us(i, j);
  return sum;
}

size_t LatencyMatrix::most_central() const {
  size_t best = 0;
  int64_t best_sum = latency_sum_from(0);
  for (size_t i = 1; i < size(); ++i) {
    int64_t s = latency_sum_from(i);
    if (s < best_sum) {
      best = i;
      best_sum = s;
    }
  }
  return best;
}

std::vector<std::string> LatencyMatrix::validate() const {
  std::vector<std::string> warnings;
  size_t r = size();
  for (size_t i = 0; i < r; ++i) {
    for (size_t j = i + 1; j < r; ++j) {
      if (latency_us(i, j) != latency_us(j, i))
        warnings.push_back("asymmetric latency between " + regions_[i] + " and " + regions_[j]);
      if (mbps_x1000(i, j) != mbps_x1000(j, i))
        warnings.push_back("asymmetric bandwidth between " + regions_[i] + " and " + regions_[j]);
      if (mbps_x1000(i, j) > kNominalNicMbps * 1000)
        warnings.push_back("bandwidth " + regions_[i] + "-" + regions_[j] + " (" +
                           format_ms_or_mbps(mbps_x1000(i, j)) +
                           " Mbps) exceeds nominal instance NIC of " +
                           std::to_string(kNominalNicMbps) + " Mbps");
    }
  }
  return warnings;
}

LatencyMatrix LatencyMatrix::parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    rows.push_back(std::move(cells));
  }
  if (rows.size() < 2) throw std::invalid_argument("latency csv: need header and data rows");
  size_t r = rows.size() - 1;
  std::vector<std::string> regions;
  for (size_t j = 1; j < rows[0].size(); ++j) regions.push_back(rows[0][j]);
  if (regions.size() != r) throw std::invalid_argument("latency csv: header/rows mismatch");

  std::vector<int64_t> lat(r * r), bw(r * r);
  for (size_t i = 0; i < r; ++i) {
    const auto& row = rows[i + 1];
    if (row.size() != r + 1)
      throw std::invalid_argument("latency csv: row " + std::to_string(i + 1) + " has wrong arity");
    if (row[0] != regions[i])
      throw std::invalid_argument("latency csv: row label '" + row[0] + "' does not match header");
    for (size_t j = 0; j < r; ++j) {
      const std::string& c = row[j + 1];
      size_t slash = c.find('/');
      if (slash == std::string::npos)
        throw std::invalid_argument("latency csv: cell missing '/': " + c);
      double ms = 0, mbps = 0;
      try {
        ms = std::stod(c.substr(0, slash));
        mbps = std::stod(c.substr(slash + 1));
      } catch (const std::exception&) {
        throw std::invalid_argument("latency csv: bad cell: " + c);
      }
      lat[i * r + j] = llround(ms * 1000.0);
      bw[i * r + j] = llround(mbps * 1000.0);
    }
  }
  return from_grid(std::move(regions), std::move(lat), std::move(bw));
}

std::string LatencyMatrix::to_csv() const {
  std::ostringstream out;
  size_t r = size();
  out << "region";
  for (size_t j = 0; j < r; ++j) out << "," << regions_[j];
  out << "\n";
  for (size_t i = 0; i < r; ++i) {
    out << regions_[i];
    for (size_t j = 0; j < r; ++j)
      out << "," << format_ms_or_mbps(lat_us_[i * r + j]) << "/"
          << format_ms_or_mbps(bw_kbps_[i * r + j]);
    out << "\n";
  }
  return out.str();
}

const LatencyMatrix& LatencyMatrix::aws14() {
  static const LatencyMatrix m = [] {
    constexpr size_t r = 14;
    std::vector<std::string> regions(kAwsRegions, kAwsRegions + r);
    std::vector<int64_t> lat(r * r, 0), bw(r * r, 0);
    size_t li = 0, bi = 0;
    for (size_t i = 1; i < r; ++i)
      for (size_t j = 0; j < i; ++j) {
        int64_t us = int64_t{1000} * kAwsLatencyMs[li++];
        lat[i * r + j] = us;
        lat[j * r + i] = us;
      }
    for (size_t i = 0; i + 1 < r; ++i)
      for (size_t j = i + 1; j < r; ++j) {
        int64_t kbps = int64_t{100} * kAwsBandwidthDeciMbps[bi++];
        bw[i * r + j] = kbps;
        bw[j * r + i] = kbps;
      }
    for (size_t i = 0; i < r; ++i) bw[i * r + i] = kDiagonalKbps;
    return from_grid(std::move(regions), std::move(lat), std::move(bw));
  }();
  return m;
}

LatencyMatrix LatencyMatrix::uniform(size_t regions, int64_t latency_us, double mbps) {
  std::vector<std::string> names;
  for (size_t i = 0; i < regions; ++i) names.push_back("r" + std::to_string(i));
  std::vector<int64_t> lat(regions * regions, latency_us);
  std::vector<int64_t> bw(regions * regions, llround(mbps * 1000.0));
  for (size_t i = 0; i < regions; ++i) {
    lat[i * regions + i] = 0;
    bw[i * regions + i] = kDiagonalKbps;
  }
  return from_grid(std::move(names), std::move(lat), std::move(bw));
}

}  // namespace rbb
