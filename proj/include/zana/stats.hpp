#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "zana/store.hpp"

namespace zana {

struct KindBreakdown {
    std::array<std::uint64_t, kTxKindCount> counts{};
    std::uint64_t total = 0;

    std::uint64_t count(TxKind k) const { return counts[static_cast<std::size_t>(k)]; }
};

// Counts via classify_tx over blocks [from_height, to_height] (inclusive,
// clipped to the tip).
KindBreakdown kind_breakdown(const ChainStore& store, std::uint64_t from_height,
                             std::uint64_t to_height);
KindBreakdown kind_breakdown(const ChainStore& store);

struct PoolPoint {
    Amount deposited;  // into the pool at this height
    Amount withdrawn;  // out of the pool at this height
    Amount balance;    // cumulative
};

struct PoolSeries {
    std::vector<PoolPoint> per_height;
    Amount total_deposited;
    Amount total_withdrawn;
    Amount final_balance;
};

// Cumulative shielded-pool value per block. Throws IntegrityError if the
// balance would go negative (corrupt data).
PoolSeries pool_series(const ChainStore& store);

struct AddressStats {
    std::uint64_t distinct_t = 0;
    std::uint64_t ever_shielding_inputs = 0;    // input of a t-to-z (or mixed) tx
    std::uint64_t ever_deshielding_outputs = 0; // output of a z-to-t (or mixed) tx
};

AddressStats address_stats(const ChainStore& store);

struct WealthDistribution {
    std::uint64_t addresses_ever = 0;
    std::uint64_t nonzero_count = 0;
    Amount total_balance;
    Amount max_balance;
    std::vector<std::uint64_t> balances_desc; // nonzero, in zat

    // Share of total balance held by the top `percent` of nonzero addresses
    // (count rounded up). Returned as (numerator, denominator) in zat.
    std::pair<std::uint64_t, std::uint64_t> top_percent_share(unsigned percent) const;
};

// Transparent balances from unspent outputs as of `height`. Requires a
// resolved store.
WealthDistribution wealth_distribution(const ChainStore& store, std::uint64_t height);

struct ZzStats {
    std::uint64_t private_tx_count = 0;
    std::uint64_t joinsplit_count = 0;
    std::uint64_t single_joinsplit_txs = 0;
    // day index -> {private txs, joinsplits}
    std::map<std::int64_t, std::pair<std::uint64_t, std::uint64_t>> per_day;
};

ZzStats zz_joinsplit_stats(const ChainStore& store);

enum class FlowDirection : std::uint8_t { Deposit, Withdrawal };

const char* to_string(FlowDirection d);

struct Spike {
    std::uint64_t height = 0;
    FlowDirection direction = FlowDirection::Deposit;
    Amount amount;
};

// Per-block deposit/withdrawal totals strictly above `threshold`, by height.
std::vector<Spike> spike_report(const ChainStore& store, Amount threshold);

} // namespace zana
