#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "rbb/tx.hpp"
#include "rbb/verify_cache.hpp"

namespace rbb {

struct UtxoKey {
  Digest txid;
  uint32_t index = 0;
  auto operator<=>(const UtxoKey&) const = default;
};

struct UtxoEntry {
  Amount amount = 0;
  Account owner;
  bool operator==(const UtxoEntry&) const = default;
};

// Verdict a verifier attaches to a transaction. Check precedence when
// several rules fail at once (fixed so every replica reports the same
// verdict): Malformed, then MissingInput, then DoubleSpendWithinBlock,
// then BadSignature, then OverSpend.
enum class Verdict : uint8_t {
  Valid = 0,
  BadSignature = 1,           // spender key does not match owner, or bad sig
  MissingInput = 2,           // referenced UTXO not visible in the validation view
  DoubleSpendWithinBlock = 3, // input already consumed by an earlier tx of the block
  OverSpend = 4,              // output sum differs from input sum (value must be conserved)
  Malformed = 5,              // structural: empty sides, bounds, duplicate inputs in one tx
};

const char* verdict_name(Verdict v);

enum class SigPolicy : uint8_t {
  Check,        // verify every input signature
  AssumeValid,  // signatures already attested by a quorum; skip the EC math
};

class UtxoTable {
 public:
  bool contains(const UtxoKey& k) const { return entries_.count(k) != 0; }
  const UtxoEntry* find(const UtxoKey& k) const;
  void insert(const UtxoKey& k, const UtxoEntry& e);  // throws on duplicate key
  void erase(const UtxoKey& k);                       // throws on missing key

  size_t size() const { return entries_.size(); }
  Amount total_supply() const { return supply_; }

  Amount balance(const Account& a) const;
  // All UTXOs owned by an account in key order: the canonical read result.
  std::vector<std::pair<UtxoKey, UtxoEntry>> utxos_of(const Account& a) const;

  // Hash of the canonical table serialization; equal tables hash equal.
  Digest digest() const;

  const std::map<UtxoKey, UtxoEntry>& entries() const { return entries_; }

 private:
  std::map<UtxoKey, UtxoEntry> entries_;
  std::map<Account, std::map<UtxoKey, Amount>> by_owner_;
  Amount supply_ = 0;
};

// Verdict for one transaction against a stable table snapshot.
Verdict validate_tx(const UtxoTable& table, const Transaction& tx, SigPolicy sig,
                    const SigVerifier& verifier);

struct FilterResult {
  std::vector<uint32_t> accepted;                       // indices, original order
  std::vector<std::pair<uint32_t, Verdict>> rejected;   // indices + reason
};

// Greedy first-spender-wins pass over an ordered candidate list: a
// transaction is accepted iff it validates against the table as modified
// by the earlier accepted ones. With allow_chains an output created by an
// earlier accepted tx is spendable within the same block; without it such
// inputs are not visible and fail as MissingInput.
FilterResult filter_conflicts(const UtxoTable& table, const std::vector<Transaction>& txs,
                              SigPolicy sig, bool allow_chains, const SigVerifier& verifier);

// Thrown when a block that should have been pre-filtered cannot be applied.
class LedgerFault : public std::runtime_error {
 public:
  explicit LedgerFault(const std::string& w) : std::runtime_error(w) {}
};

// Applies a filtered block: consumes every input, creates every output.
// Pure in the move-and-return style; total supply is preserved or it throws.
UtxoTable apply_block(UtxoTable table, const Block& b);

}  // namespace rbb
