#include "zana/link.hpp"

#include <algorithm>

#include "zana/errors.hpp"

namespace zana {

std::vector<RoundTrip> find_round_trips(const ChainStore& store, std::uint64_t max_gap) {
    std::vector<RoundTrip> trips;
    const auto& deposits = store.deposit_value_index();
    const auto& withdrawals = store.withdrawal_value_index();
    for (const auto& [zat, dep_txs] : deposits) {
        if (dep_txs.size() != 1) continue; // uniqueness is chain-wide
        auto wit = withdrawals.find(zat);
        if (wit == withdrawals.end() || wit->second.size() != 1) continue;
        const Transaction* dep = dep_txs.front();
        const Transaction* wd = wit->second.front();
        if (wd->block_height <= dep->block_height) continue;
        const std::uint64_t gap = wd->block_height - dep->block_height;
        if (gap > max_gap) continue;
        trips.push_back({Amount{zat}, dep->txid, dep->block_height, wd->txid, wd->block_height,
                         gap});
    }
    std::sort(trips.begin(), trips.end(), [](const RoundTrip& a, const RoundTrip& b) {
        if (a.deposit_height != b.deposit_height) return a.deposit_height < b.deposit_height;
        return a.value.zat < b.value.zat;
    });
    return trips;
}

std::vector<CurvePoint> linked_value_curve(const ChainStore& store,
                                           const std::vector<std::uint64_t>& gaps) {
    std::vector<CurvePoint> curve;
    curve.reserve(gaps.size());
    for (std::uint64_t gap : gaps) {
        CurvePoint point;
        point.gap = gap;
        for (const auto& trip : find_round_trips(store, gap)) {
            ++point.link_count;
            point.total_value = checked_add(point.total_value, trip.value);
        }
        curve.push_back(point);
    }
    return curve;
}

ValueUniquenessStats value_uniqueness_stats(const std::vector<RoundTrip>& round_trips) {
    ValueUniquenessStats stats;
    stats.unique_value_count = round_trips.size();
    for (const auto& trip : round_trips)
        ++stats.decimal_place_histogram[static_cast<std::size_t>(trip.value.decimal_places())];
    return stats;
}

AnonymityReduction anonymity_reduction(const ChainStore& store,
                                       const AttributionResult& attribution,
                                       const std::vector<RoundTrip>& round_trips) {
    AnonymityReduction reduction;
    for (const auto& block : store.blocks()) {
        for (const auto& tx : block.txs) {
            const Amount wd = pool_withdrawal(tx);
            if (wd.is_zero()) continue;
            reduction.total_withdrawn = checked_add(reduction.total_withdrawn, wd);
            switch (attribution.party_of(tx.txid)) {
                case Party::Founder:
                    reduction.founder_value = checked_add(reduction.founder_value, wd);
                    break;
                case Party::Miner:
                    reduction.miner_value = checked_add(reduction.miner_value, wd);
                    break;
                case Party::Other:
                    break;
            }
        }
    }
    if (reduction.total_withdrawn.is_zero())
        throw PreconditionError("anonymity_reduction: no withdrawn value");
    for (const auto& trip : round_trips) {
        const Transaction& wd_tx = store.tx_by_id(trip.withdrawal_txid);
        if (attribution.party_of(wd_tx.txid) != Party::Other) continue;
        // value linked but not categorized: count the withdrawal's pool exit
        reduction.roundtrip_only_value =
            checked_add(reduction.roundtrip_only_value, pool_withdrawal(wd_tx));
    }
    return reduction;
}

} // namespace zana
