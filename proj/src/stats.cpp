#include "zana/stats.hpp"

#include <algorithm>

#include "zana/errors.hpp"
#include "zana/timebucket.hpp"

namespace zana {

KindBreakdown kind_breakdown(const ChainStore& store, std::uint64_t from_height,
                             std::uint64_t to_height) {
    KindBreakdown kb;
    if (store.empty()) return kb;
    to_height = std::min(to_height, store.tip_height());
    for (std::uint64_t h = from_height; h <= to_height; ++h) {
        for (const auto& tx : store.block_at(h).txs) {
            ++kb.counts[static_cast<std::size_t>(classify_tx(tx))];
            ++kb.total;
        }
    }
    return kb;
}

KindBreakdown kind_breakdown(const ChainStore& store) {
    if (store.empty()) return {};
    return kind_breakdown(store, 0, store.tip_height());
}

PoolSeries pool_series(const ChainStore& store) {
    PoolSeries series;
    series.per_height.reserve(store.block_count());
    Amount balance;
    for (const auto& block : store.blocks()) {
        PoolPoint point;
        for (const auto& tx : block.txs) {
            point.deposited = checked_add(point.deposited, pool_deposit(tx));
            point.withdrawn = checked_add(point.withdrawn, pool_withdrawal(tx));
        }
        balance = checked_add(balance, point.deposited);
        if (point.withdrawn > balance)
            throw IntegrityError("shielded pool balance negative at height " +
                                 std::to_string(block.height));
        balance = checked_sub(balance, point.withdrawn);
        point.balance = balance;
        series.total_deposited = checked_add(series.total_deposited, point.deposited);
        series.total_withdrawn = checked_add(series.total_withdrawn, point.withdrawn);
        series.per_height.push_back(point);
    }
    series.final_balance = balance;
    return series;
}

AddressStats address_stats(const ChainStore& store) {
    AddressStats stats;
    stats.distinct_t = store.address_index().size();
    for (const auto& [addr, use] : store.address_index()) {
        bool shielding_input = false;
        for (const Transaction* tx : use.as_input) {
            if (!tx->joinsplits.empty() && !pool_deposit(*tx).is_zero()) {
                shielding_input = true;
                break;
            }
        }
        bool deshielding_output = false;
        for (const Transaction* tx : use.as_output) {
            if (!tx->joinsplits.empty() && !pool_withdrawal(*tx).is_zero()) {
                deshielding_output = true;
                break;
            }
        }
        if (shielding_input) ++stats.ever_shielding_inputs;
        if (deshielding_output) ++stats.ever_deshielding_outputs;
    }
    return stats;
}

WealthDistribution wealth_distribution(const ChainStore& store, std::uint64_t height) {
    if (!store.resolved())
        throw PreconditionError("wealth_distribution requires a resolved store");
    std::unordered_map<Address, std::uint64_t> balances;
    if (!store.empty()) {
        const std::uint64_t top = std::min(height, store.tip_height());
        for (std::uint64_t h = 0; h <= top; ++h) {
            for (const auto& tx : store.block_at(h).txs) {
                for (const auto& out : tx.vout) {
                    const Transaction* spender = store.spender_of(tx.txid, out.index);
                    if (spender && spender->block_height <= top) continue;
                    balances[out.address] += out.value.zat;
                }
            }
        }
    }
    WealthDistribution w;
    w.addresses_ever = store.address_index().size();
    for (const auto& [addr, zat] : balances) {
        if (zat == 0) continue;
        ++w.nonzero_count;
        w.total_balance = checked_add(w.total_balance, Amount{zat});
        w.max_balance = std::max(w.max_balance, Amount{zat});
        w.balances_desc.push_back(zat);
    }
    std::sort(w.balances_desc.begin(), w.balances_desc.end(), std::greater<>());
    return w;
}

std::pair<std::uint64_t, std::uint64_t> WealthDistribution::top_percent_share(
    unsigned percent) const {
    if (balances_desc.empty() || total_balance.is_zero()) return {0, 1};
    const std::uint64_t n = balances_desc.size();
    std::uint64_t take = (n * percent + 99) / 100; // ceil
    take = std::max<std::uint64_t>(1, std::min(take, n));
    std::uint64_t sum = 0;
    for (std::uint64_t i = 0; i < take; ++i) sum += balances_desc[i];
    return {sum, total_balance.zat};
}

ZzStats zz_joinsplit_stats(const ChainStore& store) {
    ZzStats stats;
    for (const auto& block : store.blocks()) {
        for (const auto& tx : block.txs) {
            if (classify_tx(tx) != TxKind::Private) continue;
            ++stats.private_tx_count;
            stats.joinsplit_count += tx.joinsplits.size();
            if (tx.joinsplits.size() == 1) ++stats.single_joinsplit_txs;
            auto& day = stats.per_day[utc_day_index(tx.block_time)];
            ++day.first;
            day.second += tx.joinsplits.size();
        }
    }
    return stats;
}

const char* to_string(FlowDirection d) {
    return d == FlowDirection::Deposit ? "deposit" : "withdrawal";
}

std::vector<Spike> spike_report(const ChainStore& store, Amount threshold) {
    std::vector<Spike> spikes;
    for (const auto& block : store.blocks()) {
        Amount dep, wd;
        for (const auto& tx : block.txs) {
            dep = checked_add(dep, pool_deposit(tx));
            wd = checked_add(wd, pool_withdrawal(tx));
        }
        if (dep > threshold) spikes.push_back({block.height, FlowDirection::Deposit, dep});
        if (wd > threshold) spikes.push_back({block.height, FlowDirection::Withdrawal, wd});
    }
    return spikes;
}

} // namespace zana
