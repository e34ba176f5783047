#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <vector>

#include "zana/attribute.hpp"
#include "zana/store.hpp"
#include "zana/tsb.hpp"

namespace zana {

struct ReportOptions {
    std::filesystem::path out_dir;
    std::optional<std::filesystem::path> founders_path;
    std::vector<std::filesystem::path> tag_csvs;
    std::optional<std::filesystem::path> schedule_path;
    std::optional<std::filesystem::path> exclusions_path;
    bool use_change = false; // global clustering; the TSB pass always adds it
    bool stats_only = false; // stop after the chain-wide statistics files
    std::uint64_t max_gap = 100;
    std::uint64_t curve_max_gap = 100; // curve over gaps 1..curve_max_gap
    Amount spike_threshold = Amount::from_zec_int(5000);
    std::uint32_t max_rounds = 10;
    TsbOptions tsb;
};

// Emits the full CSV bundle (transaction taxonomy, pool series and totals,
// address/wealth stats, private-tx stats, spikes, clusters, tags per
// cluster, founder table, attribution and coverage, round trips, linked
// value curve, anonymity reduction, and the monthly candidate table when a
// schedule is given). Deterministic: identical store + options give
// byte-identical files. Requires a resolved store.
void write_report_bundle(const ChainStore& store, const ReportOptions& options);

// Stand-alone emitters reused by the per-module subcommands.
void write_attribution_csvs(const ChainStore& store, const AttributionResult& result,
                            const std::filesystem::path& dir);
void write_tsb_csvs(const TsbScanResult& result, const PriceSchedule& schedule,
                    const std::filesystem::path& dir);

std::set<Address> load_exclusions(const std::filesystem::path& path);

} // namespace zana
