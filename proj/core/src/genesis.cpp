#include "rbb/genesis.hpp"

#include <sstream>

#include "rbb/serialize.hpp"

namespace rbb {

UtxoKey genesis_key(uint64_t tag, uint64_t seq) {
  ByteWriter w;
  const char* domain = "rbb-genesis";
  w.raw(ByteSpan{reinterpret_cast<const uint8_t*>(domain), 11});
  w.u64(tag);
  w.u64(seq);
  return UtxoKey{sha256(w.bytes()), 0};
}

UtxoTable GenesisSpec::build() const {
  UtxoTable table;
  uint64_t seq = 0;
  for (const Grant& g : grants) {
    for (uint32_t i = 0; i < g.count; ++i)
      table.insert(genesis_key(tag, seq++), UtxoEntry{g.amount, g.owner});
  }
  return table;
}

Amount GenesisSpec::total() const {
  Amount sum = 0;
  for (const Grant& g : grants) sum += g.amount * g.count;
  return sum;
}

std::string GenesisSpec::serialize() const {
  std::ostringstream out;
  out << "# genesis ledger\n";
  out << "tag " << tag << "\n";
  for (const Grant& g : grants)
    out << "utxo " << g.owner.hex() << " " << g.amount << " " << g.count << "\n";
  return out.str();
}

GenesisSpec GenesisSpec::parse(const std::string& text) {
  GenesisSpec spec;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    if (word == "tag") {
      if (!(ls >> spec.tag)) throw std::invalid_argument("genesis: bad tag line " + std::to_string(lineno));
    } else if (word == "utxo") {
      std::string owner_hex;
      Grant g;
      if (!(ls >> owner_hex >> g.amount >> g.count))
        throw std::invalid_argument("genesis: bad utxo line " + std::to_string(lineno));
      g.owner = Digest::from_hex_str(owner_hex);
      spec.grants.push_back(g);
    } else {
      throw std::invalid_argument("genesis: unknown directive '" + word + "' line " +
                                  std::to_string(lineno));
    }
    std::string trailing;
    if (ls >> trailing)
      throw std::invalid_argument("genesis: trailing tokens line " + std::to_string(lineno));
  }
  return spec;
}

}  // namespace rbb
