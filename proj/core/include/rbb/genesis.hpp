#pragma once

#include <string>

#include "rbb/utxo.hpp"

namespace rbb {

// Deterministic ledger bootstrap. Genesis UTXO ids are synthesized from a
// tag and a running counter, so the same spec always builds the same table.
struct GenesisSpec {
  struct Grant {
    Account owner;
    Amount amount = 0;   // per UTXO
    uint32_t count = 1;  // number of identical UTXOs
  };
  uint64_t tag = 0;
  std::vector<Grant> grants;

  UtxoTable build() const;
  Amount total() const;

  // Text form, one directive per line:
  //   tag <u64>
  //   utxo <owner-hex> <amount> <count>
  // '#' starts a comment. parse() rejects anything else.
  std::string serialize() const;
  static GenesisSpec parse(const std::string& text);
};

// Key of the i-th genesis UTXO under a tag.
UtxoKey genesis_key(uint64_t tag, uint64_t seq);

}  // namespace rbb
