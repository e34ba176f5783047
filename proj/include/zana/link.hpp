#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "zana/attribute.hpp"
#include "zana/store.hpp"

namespace zana {

// A deposit and a withdrawal of a chain-unique value, the withdrawal within
// max_gap blocks after the deposit.
struct RoundTrip {
    Amount value;
    std::string deposit_txid;
    std::uint64_t deposit_height = 0;
    std::string withdrawal_txid;
    std::uint64_t withdrawal_height = 0;
    std::uint64_t gap = 0; // withdrawal_height - deposit_height, >= 1
};

// Links every value that occurs exactly once as a pool deposit and exactly
// once as a pool withdrawal chain-wide, where the withdrawal follows the
// deposit by 1..max_gap blocks. Ordered by deposit height.
std::vector<RoundTrip> find_round_trips(const ChainStore& store, std::uint64_t max_gap);

struct CurvePoint {
    std::uint64_t gap = 0;
    std::uint64_t link_count = 0;
    Amount total_value;
};

// Total linked value per gap; monotone non-decreasing in gap.
std::vector<CurvePoint> linked_value_curve(const ChainStore& store,
                                           const std::vector<std::uint64_t>& gaps);

struct ValueUniquenessStats {
    std::uint64_t unique_value_count = 0;
    std::array<std::uint64_t, 9> decimal_place_histogram{}; // 0..8 places

    std::uint64_t more_than_three_decimals() const {
        std::uint64_t n = 0;
        for (int d = 4; d <= 8; ++d) n += decimal_place_histogram[d];
        return n;
    }
};

ValueUniquenessStats value_uniqueness_stats(const std::vector<RoundTrip>& round_trips);

// Anonymity-set reduction over withdrawn value: founder- plus
// miner-attributed value, plus round-trip-linked value not already covered.
// All shares are exact zat ratios against total_withdrawn.
struct AnonymityReduction {
    Amount total_withdrawn;
    Amount founder_value;
    Amount miner_value;
    Amount roundtrip_only_value;

    Amount covered_total() const {
        return Amount{founder_value.zat + miner_value.zat + roundtrip_only_value.zat};
    }
};

AnonymityReduction anonymity_reduction(const ChainStore& store,
                                       const AttributionResult& attribution,
                                       const std::vector<RoundTrip>& round_trips);

} // namespace zana
