#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zana/amount.hpp"

namespace zana {

// Transparent address encoding. Shielded addresses never appear in ledger
// data, so the ledger model carries transparent addresses only.
using Address = std::string;

struct TxIn {
    std::string prev_txid;
    std::uint32_t prev_index = 0;
    // Filled by the resolve pass; both present or both absent.
    std::optional<Address> resolved_address;
    std::optional<Amount> resolved_value;

    bool resolved() const { return resolved_address.has_value(); }
};

struct TxOut {
    Address address;
    Amount value;
    std::uint32_t index = 0;
};

// Transparent/shielded boundary crossing. vpub_old enters the pool from the
// transparent side, vpub_new exits it; at most one is nonzero. Nullifiers
// are the double-spending tokens, globally unique across the chain.
struct JoinSplit {
    Amount vpub_old;
    Amount vpub_new;
    std::array<std::string, 2> nullifiers;
    std::array<std::string, 2> commitments;
};

struct Transaction {
    std::string txid;
    std::uint64_t block_height = 0;
    std::int64_t block_time = 0;
    bool is_coinbase = false;
    std::vector<TxIn> vin;
    std::vector<TxOut> vout;
    std::vector<JoinSplit> joinsplits;
};

struct Block {
    std::uint64_t height = 0;
    std::string hash;
    std::int64_t time = 0;
    std::vector<Transaction> txs;
};

// The six-way taxonomy. Classification is structural: transparent vin/vout
// presence and joinsplit presence, never values.
enum class TxKind : std::uint8_t {
    Coingen = 0,
    Transparent = 1,
    Shielded = 2,    // t-to-z
    Deshielded = 3,  // z-to-t
    Private = 4,     // z-to-z
    Mixed = 5,
};

inline constexpr std::size_t kTxKindCount = 6;

const char* to_string(TxKind k);
std::optional<TxKind> tx_kind_from_string(const std::string& s);

// Total over structurally valid transactions.
TxKind classify_tx(const Transaction& tx);

// Sum of vpub_old across joinsplits: value entering the shielded pool.
Amount pool_deposit(const Transaction& tx);

// Sum of vpub_new across joinsplits: value leaving the shielded pool.
Amount pool_withdrawal(const Transaction& tx);

// fee = sum(vin) + sum(vpub_new) - sum(vout) - sum(vpub_old).
// nullopt means violation (negative fee). Throws PreconditionError if any
// input is unresolved.
std::optional<Amount> conservation_check(const Transaction& tx);

// Structural validation per the type invariants. Throws IntegrityError.
void validate_transaction(const Transaction& tx);
void validate_block(const Block& b);

} // namespace zana
