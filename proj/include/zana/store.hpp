#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "zana/chain.hpp"

namespace zana {

// Per-address usage index. as_input holds transactions spending from the
// address (filled by the resolve pass), as_output transactions paying to it.
struct AddressUse {
    std::vector<const Transaction*> as_input;
    std::vector<const Transaction*> as_output;
    std::uint64_t first_height = UINT64_MAX;
};

// Indexed chain storage. On disk a store is a directory holding
// `chain.jsonl` (one block per line in the dump format) from which all
// indices are rebuilt at open. Blocks are append-only and heights are
// contiguous from 0; after ingest completes the store is used read-only, so
// analyses over a loaded store see a fixed tip with repeatable reads.
class ChainStore {
  public:
    ChainStore() = default; // in-memory store, no persistence
    ChainStore(ChainStore&&) = default;
    ChainStore& operator=(ChainStore&&) = default;

    static ChainStore open(const std::filesystem::path& dir);

    // Appends the next block (height must be tip+1, or 0 on an empty store).
    // Re-appending a block identical to a stored one is a no-op returning
    // false; a conflicting block at a stored height throws IntegrityError.
    bool append_block(Block b);

    bool empty() const { return blocks_.empty(); }
    std::uint64_t block_count() const { return blocks_.size(); }
    std::uint64_t tx_count() const { return tx_count_; }
    std::uint64_t tip_height() const;
    const Block& block_at(std::uint64_t height) const;
    const std::deque<Block>& blocks() const { return blocks_; }

    const Transaction* find_tx(const std::string& txid) const;
    const Transaction& tx_by_id(const std::string& txid) const;

    const AddressUse* address_use(const Address& a) const;
    const std::unordered_map<Address, AddressUse>& address_index() const { return addr_index_; }

    // Pool transactions keyed by exact vpub sum; ordered by value for
    // deterministic scans. Entries appear in chain order.
    const std::map<std::uint64_t, std::vector<const Transaction*>>& deposit_value_index() const {
        return deposit_index_;
    }
    const std::map<std::uint64_t, std::vector<const Transaction*>>& withdrawal_value_index() const {
        return withdrawal_index_;
    }

    // Spender of a given output, or nullptr while unspent / before resolve.
    const Transaction* spender_of(const std::string& txid, std::uint32_t index) const;

    struct ResolveStats {
        std::uint64_t inputs_resolved = 0;
        std::uint64_t inputs_unresolvable = 0;
    };

    // Fills resolved_address/resolved_value on every input whose funding
    // output is stored, builds the input-side address index and the spent
    // index, and enforces each output being spent at most once. Idempotent.
    ResolveStats resolve_inputs();
    bool resolved() const { return resolved_; }

    // Canonical chain digest: block headers in height order plus every
    // transaction's raw fields in sorted-txid order, SHA-256 over a fixed
    // text serialization. Resolve state does not affect it.
    std::string digest() const;

  private:
    void index_block(Block& b);

    std::filesystem::path dir_;
    std::unique_ptr<std::ofstream> appender_;
    std::deque<Block> blocks_;
    std::uint64_t tx_count_ = 0;
    bool resolved_ = false;
    ResolveStats resolve_stats_;
    std::unordered_map<std::string, Transaction*> tx_index_;
    std::unordered_map<Address, AddressUse> addr_index_;
    std::map<std::uint64_t, std::vector<const Transaction*>> deposit_index_;
    std::map<std::uint64_t, std::vector<const Transaction*>> withdrawal_index_;
    std::unordered_map<std::string, const Transaction*> spent_index_; // "txid:n" -> spender
    std::unordered_set<std::string> nullifiers_;
};

// Exclusive writer lock over a store directory (lock file, O_EXCL).
class StoreLock {
  public:
    explicit StoreLock(const std::filesystem::path& store_dir);
    ~StoreLock();
    StoreLock(const StoreLock&) = delete;
    StoreLock& operator=(const StoreLock&) = delete;

  private:
    std::filesystem::path lock_path_;
};

// Digest over externally assembled blocks (used by the generator so manifest
// digests and store digests agree).
std::string chain_digest(const std::vector<const Block*>& blocks_in_height_order);

} // namespace zana
