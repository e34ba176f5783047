#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "zana/stats.hpp"
#include "zana/store.hpp"
#include "zana/tags.hpp"

namespace zana {

// 250.0001 ZEC: the founder withdrawal quantum.
inline constexpr Amount kFounderWithdrawQuantum{25'000'010'000ull};
// 249.9999 ZEC: the founder deposit quantum.
inline constexpr Amount kFounderDepositQuantum{24'999'990'000ull};
// Pool payouts carry strictly more than this many transparent outputs.
inline constexpr std::size_t kMinerPayoutFanout = 100;

enum class Party : std::uint8_t { Founder, Miner, Other };

const char* to_string(Party p);

struct Coverage {
    std::uint64_t tx_count = 0;
    Amount value;
};

struct AttributionResult {
    // Category per pool-interacting transaction (Shielded, Deshielded, Mixed).
    std::unordered_map<std::string, Party> category;
    // Round in which the transaction first left the `other` category
    // (0 = base tags, before any withdrawal heuristic fired).
    std::unordered_map<std::string, std::uint32_t> round_discovered;
    std::map<Party, Coverage> deposit_coverage;
    std::map<Party, Coverage> withdrawal_coverage;
    std::uint32_t rounds_run = 0;
    bool converged = false;
    std::uint64_t new_founder_addresses = 0;
    std::uint64_t new_miner_addresses = 0;
    std::vector<std::string> conflicts; // tag conflicts recorded, not fatal
    std::vector<std::string> anomalies; // e.g. payout naming two pools

    Party party_of(const std::string& txid) const {
        auto it = category.find(txid);
        return it == category.end() ? Party::Other : it->second;
    }
};

// Deposit-side attribution: founder if any input address is founder-tagged,
// else miner if any is miner-tagged, else other. Covers Shielded and Mixed
// transactions; requires a resolved store.
AttributionResult attribute_deposits(const ChainStore& store, const TagRegistry& registry);

struct HeuristicOutcome {
    std::uint64_t txs_tagged = 0;
    std::uint64_t addresses_tagged = 0;
    std::vector<std::string> conflicts;
    std::vector<std::string> anomalies;
};

// Deshielded transactions withdrawing exactly `quantum` are founder
// withdrawals; their output addresses become founder/source=heuristic3.
// Conflicting miner tags are recorded and the address tag skipped.
HeuristicOutcome apply_founder_withdrawal_heuristic(const ChainStore& store, TagRegistry& registry,
                                                    Amount quantum = kFounderWithdrawQuantum);

// Deshielded transactions with more than `fanout` transparent outputs, at
// least one of which is pool-tagged, are pool payouts; all non-pool outputs
// become miner/source=heuristic4. A payout naming two pools attributes to
// the first-listed one and records an anomaly.
HeuristicOutcome apply_miner_withdrawal_heuristic(const ChainStore& store, TagRegistry& registry,
                                                  std::size_t fanout = kMinerPayoutFanout);

// Repeats {deposit attribution, founder heuristic, miner heuristic} until no
// new address tag appears or max_rounds is reached, then computes coverage
// over deposits and withdrawals by count and value.
AttributionResult run_pipeline(const ChainStore& store, TagRegistry& registry,
                               std::uint32_t max_rounds = 10);

struct FounderAddressRow {
    Address address;
    std::uint64_t deposit_count = 0;
    Amount total_deposited;
    std::uint64_t quantum_deposit_count = 0;
};

struct FounderReport {
    std::vector<FounderAddressRow> rows; // active param addresses, by first deposit
    FounderAddressRow totals;
};

// Per-address deposit behavior of the params-sourced founder addresses that
// ever deposited into the pool.
FounderReport founder_report(const ChainStore& store, const TagRegistry& registry,
                             Amount quantum = kFounderDepositQuantum);

struct IntervalStats {
    std::uint64_t gaps_within = 0;
    std::uint64_t gaps_total = 0;
};

// Over transactions moving exactly `value` in the given direction (ordered
// by height), the consecutive height gaps falling inside [lo, hi]. Throws
// PreconditionError with fewer than two matching transactions.
IntervalStats interval_stats(const ChainStore& store, Amount value, FlowDirection direction,
                             std::uint64_t lo, std::uint64_t hi);

} // namespace zana
