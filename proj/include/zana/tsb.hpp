#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zana/cluster.hpp"
#include "zana/store.hpp"
#include "zana/tags.hpp"

namespace zana {

// Published monthly price schedule. Candidate matching uses the amount set;
// the month labels order the output table and document the announcements.
struct PriceSchedule {
    struct Entry {
        std::string month; // "YYYY-MM"
        Amount amount;
    };
    std::vector<Entry> entries;

    std::vector<Amount> distinct_amounts() const; // ascending
    bool empty() const { return entries.empty(); }
};

// CSV columns: month,amount_zec (header row required).
PriceSchedule load_schedule_csv(const std::filesystem::path& path);

struct TsbOptions {
    Amount deposit_tol = Amount::from_zec_int(5);
    Amount cluster_tol = Amount::from_zec_int(1);
    std::uint64_t activity_limit = 250;
    // When set, the month containing this time is reported as two buckets,
    // "YYYY-MM-before" and "YYYY-MM-after".
    std::optional<std::int64_t> split_time;
    // Condition 3 over a 30-day window centered on each deposit instead of
    // the deposit's calendar month.
    bool sliding_window = false;
};

struct TsbCandidate {
    std::uint32_t cluster_id = 0;
    std::string month;
    Amount matched_amount;
    std::vector<std::string> deposit_txids;
    bool prior_pool_receipt = false; // condition 1 witness, false by construction
    std::uint64_t max_activity = 0;  // condition 2 witness
};

struct TsbScanResult {
    std::vector<TsbCandidate> candidates;
    // month label -> amount (zat) -> distinct flagged clusters
    std::map<std::string, std::map<std::uint64_t, std::uint32_t>> monthly_counts;
    std::vector<std::string> month_order; // chronological labels covering the chain
};

// Flags cluster-months whose fresh, low-activity addresses deposited a
// schedule amount (+- deposit_tol per deposit, +- cluster_tol on the
// cluster's window total), with no founder/miner-tagged input. Clusters are
// expected to be built with the change heuristic enabled.
TsbScanResult scan(const ChainStore& store, const ClusterSet& clusters,
                   const TagRegistry& registry, const PriceSchedule& schedule,
                   const TsbOptions& options = {});

struct FundingSource {
    std::uint32_t cluster_id = 0;
    std::string label; // "exchange:Bitfinex", "miner", "coingen", "untagged"
    Amount total;
};

struct MonthlyDeposit {
    std::string month;
    Amount total;
    bool schedule_match = false;
};

struct CandidateDetail {
    std::uint32_t cluster_id = 0;
    std::vector<FundingSource> funding; // by descending value
    std::vector<MonthlyDeposit> monthly_deposits;
    bool repeat_pattern = false; // schedule-matched deposits in 2+ months
};

CandidateDetail candidate_detail(const TsbCandidate& candidate, const ChainStore& store,
                                 const ClusterSet& clusters, const TagRegistry& registry,
                                 const PriceSchedule& schedule, const TsbOptions& options = {});

} // namespace zana
