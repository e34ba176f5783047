#include "zana/report.hpp"

#include <fstream>

#include "zana/attribute.hpp"
#include "zana/cluster.hpp"
#include "zana/csv.hpp"
#include "zana/errors.hpp"
#include "zana/link.hpp"
#include "zana/stats.hpp"
#include "zana/tags.hpp"
#include "zana/timebucket.hpp"

namespace zana {

namespace {

std::ofstream open_csv(const std::filesystem::path& dir, const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / name).string());
    return out;
}

void write_kinds(const ChainStore& store, const std::filesystem::path& dir) {
    auto out = open_csv(dir, "kinds.csv");
    out << "kind,count,percent\n";
    const KindBreakdown kb = kind_breakdown(store);
    for (std::size_t i = 0; i < kTxKindCount; ++i) {
        const auto kind = static_cast<TxKind>(i);
        out << to_string(kind) << ',' << kb.counts[i] << ','
            << pct_one_decimal(kb.counts[i], kb.total) << '\n';
    }
}

void write_pool(const ChainStore& store, const std::filesystem::path& dir) {
    const PoolSeries series = pool_series(store);
    {
        auto out = open_csv(dir, "pool_series.csv");
        out << "height,deposited_zat,deposited_zec,withdrawn_zat,withdrawn_zec,"
               "balance_zat,balance_zec\n";
        for (std::size_t h = 0; h < series.per_height.size(); ++h) {
            const auto& p = series.per_height[h];
            out << h << ',' << p.deposited.zat << ',' << p.deposited.to_zec_string() << ','
                << p.withdrawn.zat << ',' << p.withdrawn.to_zec_string() << ',' << p.balance.zat
                << ',' << p.balance.to_zec_string() << '\n';
        }
    }
    auto out = open_csv(dir, "pool_totals.csv");
    out << "metric,value_zat,value_zec\n";
    out << "deposited," << series.total_deposited.zat << ','
        << series.total_deposited.to_zec_string() << '\n';
    out << "withdrawn," << series.total_withdrawn.zat << ','
        << series.total_withdrawn.to_zec_string() << '\n';
    out << "final_balance," << series.final_balance.zat << ','
        << series.final_balance.to_zec_string() << '\n';
}

void write_address_and_wealth(const ChainStore& store, const std::filesystem::path& dir) {
    {
        const AddressStats a = address_stats(store);
        auto out = open_csv(dir, "address_stats.csv");
        out << "metric,value\n";
        out << "distinct_t_addresses," << a.distinct_t << '\n';
        out << "ever_shielding_inputs," << a.ever_shielding_inputs << '\n';
        out << "ever_deshielding_outputs," << a.ever_deshielding_outputs << '\n';
    }
    if (store.empty()) return;
    const WealthDistribution w = wealth_distribution(store, store.tip_height());
    auto out = open_csv(dir, "wealth.csv");
    out << "metric,value\n";
    out << "addresses_ever," << w.addresses_ever << '\n';
    out << "nonzero_addresses," << w.nonzero_count << '\n';
    out << "nonzero_fraction_pct," << pct_one_decimal(w.nonzero_count, w.addresses_ever) << '\n';
    const auto [top, total] = w.top_percent_share(1);
    out << "top_1pct_share_pct," << pct_one_decimal(top, total) << '\n';
    out << "total_balance_zat," << w.total_balance.zat << '\n';
    out << "max_balance_zat," << w.max_balance.zat << '\n';
    out << "max_balance_zec," << w.max_balance.to_zec_string() << '\n';
}

void write_zz(const ChainStore& store, const std::filesystem::path& dir) {
    const ZzStats zz = zz_joinsplit_stats(store);
    {
        auto out = open_csv(dir, "zz_stats.csv");
        out << "metric,value\n";
        out << "private_txs," << zz.private_tx_count << '\n';
        out << "joinsplits," << zz.joinsplit_count << '\n';
        out << "single_joinsplit_txs," << zz.single_joinsplit_txs << '\n';
        out << "single_joinsplit_pct,"
            << pct_one_decimal(zz.single_joinsplit_txs, zz.private_tx_count) << '\n';
    }
    auto out = open_csv(dir, "zz_daily.csv");
    out << "day,private_txs,joinsplits\n";
    for (const auto& [day, counts] : zz.per_day)
        out << utc_day_label(day) << ',' << counts.first << ',' << counts.second << '\n';
}

void write_spikes(const ChainStore& store, Amount threshold, const std::filesystem::path& dir) {
    auto out = open_csv(dir, "spikes.csv");
    out << "height,direction,amount_zat,amount_zec\n";
    for (const auto& s : spike_report(store, threshold))
        out << s.height << ',' << to_string(s.direction) << ',' << s.amount.zat << ','
            << s.amount.to_zec_string() << '\n';
}

void write_clusters(const ClusterSet& clusters, const TagRegistry& registry,
                    const std::filesystem::path& dir) {
    {
        auto out = open_csv(dir, "clusters.csv");
        out << "cluster_id,size,member_address\n";
        for (std::uint32_t id = 0; id < clusters.cluster_count(); ++id)
            for (const auto& addr : clusters.members_of(id))
                out << id << ',' << clusters.members_of(id).size() << ',' << addr << '\n';
    }
    auto out = open_csv(dir, "cluster_tags.csv");
    out << "cluster_id,category,tagged_members\n";
    for (const auto& [id, histogram] : cluster_tags(registry, clusters))
        for (const auto& [category, count] : histogram)
            out << id << ',' << to_string(category) << ',' << count << '\n';
}

void write_founders(const ChainStore& store, const TagRegistry& registry,
                    const std::filesystem::path& dir) {
    const FounderReport report = founder_report(store, registry);
    auto out = open_csv(dir, "founder_report.csv");
    out << "address,deposit_count,total_deposited_zat,total_deposited_zec,quantum_deposits\n";
    for (const auto& row : report.rows)
        out << row.address << ',' << row.deposit_count << ',' << row.total_deposited.zat << ','
            << row.total_deposited.to_zec_string() << ',' << row.quantum_deposit_count << '\n';
    out << "TOTAL," << report.totals.deposit_count << ',' << report.totals.total_deposited.zat
        << ',' << report.totals.total_deposited.to_zec_string() << ','
        << report.totals.quantum_deposit_count << '\n';
}

void write_attribution_impl(const ChainStore& store, const AttributionResult& result,
                            const std::filesystem::path& dir) {
    {
        auto out = open_csv(dir, "attribution.csv");
        out << "txid,kind,category,value_zat,round_discovered\n";
        for (const auto& block : store.blocks()) {
            for (const auto& tx : block.txs) {
                const TxKind kind = classify_tx(tx);
                if (kind != TxKind::Shielded && kind != TxKind::Deshielded &&
                    kind != TxKind::Mixed)
                    continue;
                const Amount value =
                    kind == TxKind::Deshielded ? pool_withdrawal(tx) : pool_deposit(tx);
                auto round_it = result.round_discovered.find(tx.txid);
                out << tx.txid << ',' << to_string(kind) << ','
                    << to_string(result.party_of(tx.txid)) << ',' << value.zat << ','
                    << (round_it == result.round_discovered.end()
                            ? std::string("-")
                            : std::to_string(round_it->second))
                    << '\n';
            }
        }
    }
    auto out = open_csv(dir, "coverage.csv");
    out << "direction,category,tx_count,value_zat,value_zec,value_pct\n";
    for (auto [label, coverage] :
         {std::pair{"deposit", &result.deposit_coverage},
          std::pair{"withdrawal", &result.withdrawal_coverage}}) {
        Amount total;
        for (const auto& [party, cov] : *coverage) total = checked_add(total, cov.value);
        for (const auto& [party, cov] : *coverage)
            out << label << ',' << to_string(party) << ',' << cov.tx_count << ',' << cov.value.zat
                << ',' << cov.value.to_zec_string() << ','
                << pct_one_decimal(cov.value.zat, total.zat) << '\n';
    }
}

void write_links(const ChainStore& store, const std::vector<RoundTrip>& trips,
                 const AttributionResult& attribution, std::uint64_t curve_max_gap,
                 const std::filesystem::path& dir) {
    {
        auto out = open_csv(dir, "round_trips.csv");
        out << "value_zat,deposit_txid,deposit_height,withdrawal_txid,withdrawal_height,gap\n";
        for (const auto& t : trips)
            out << t.value.zat << ',' << t.deposit_txid << ',' << t.deposit_height << ','
                << t.withdrawal_txid << ',' << t.withdrawal_height << ',' << t.gap << '\n';
    }
    {
        std::vector<std::uint64_t> gaps;
        for (std::uint64_t g = 1; g <= curve_max_gap; ++g) gaps.push_back(g);
        auto out = open_csv(dir, "linked_curve.csv");
        out << "gap,link_count,total_value_zat,total_value_zec\n";
        for (const auto& point : linked_value_curve(store, gaps))
            out << point.gap << ',' << point.link_count << ',' << point.total_value.zat << ','
                << point.total_value.to_zec_string() << '\n';
    }
    {
        const ValueUniquenessStats stats = value_uniqueness_stats(trips);
        auto out = open_csv(dir, "value_decimals.csv");
        out << "decimal_places,count\n";
        for (int d = 0; d <= 8; ++d) out << d << ',' << stats.decimal_place_histogram[d] << '\n';
    }
    auto out = open_csv(dir, "anonymity.csv");
    out << "metric,value_zat,value_zec,pct\n";
    const Amount withdrawn = [&] {
        Amount t;
        for (const auto& block : store.blocks())
            for (const auto& tx : block.txs) t = checked_add(t, pool_withdrawal(tx));
        return t;
    }();
    if (withdrawn.is_zero()) {
        out << "total_withdrawn,0,0.00000000,0.0\n";
        return;
    }
    const AnonymityReduction reduction = anonymity_reduction(store, attribution, trips);
    auto row = [&](const char* name, Amount v) {
        out << name << ',' << v.zat << ',' << v.to_zec_string() << ','
            << pct_one_decimal(v.zat, reduction.total_withdrawn.zat) << '\n';
    };
    row("total_withdrawn", reduction.total_withdrawn);
    row("founder_value", reduction.founder_value);
    row("miner_value", reduction.miner_value);
    row("roundtrip_only_value", reduction.roundtrip_only_value);
    row("covered_total", reduction.covered_total());
}

void write_tsb_impl(const TsbScanResult& result, const PriceSchedule& schedule,
                    const std::filesystem::path& dir) {
    {
        auto out = open_csv(dir, "tsb_candidates.csv");
        out << "cluster_id,month,matched_amount_zat,matched_amount_zec,max_activity,"
               "deposit_txids\n";
        for (const auto& c : result.candidates) {
            std::string txids;
            for (const auto& t : c.deposit_txids) {
                if (!txids.empty()) txids += '|';
                txids += t;
            }
            out << c.cluster_id << ',' << c.month << ',' << c.matched_amount.zat << ','
                << c.matched_amount.to_zec_string() << ',' << c.max_activity << ','
                << csv_escape(txids) << '\n';
        }
    }
    auto out = open_csv(dir, "tsb_monthly.csv");
    const auto amounts = schedule.distinct_amounts();
    out << "month";
    for (const auto& a : amounts) out << ',' << a.to_zec_string_trimmed();
    out << '\n';
    for (const auto& month : result.month_order) {
        out << month;
        auto row = result.monthly_counts.find(month);
        for (const auto& a : amounts) {
            std::uint32_t count = 0;
            if (row != result.monthly_counts.end()) {
                auto cell = row->second.find(a.zat);
                if (cell != row->second.end()) count = cell->second;
            }
            out << ',' << count;
        }
        out << '\n';
    }
}

} // namespace

void write_attribution_csvs(const ChainStore& store, const AttributionResult& result,
                            const std::filesystem::path& dir) {
    write_attribution_impl(store, result, dir);
}

void write_tsb_csvs(const TsbScanResult& result, const PriceSchedule& schedule,
                    const std::filesystem::path& dir) {
    write_tsb_impl(result, schedule, dir);
}

std::set<Address> load_exclusions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open exclusions " + path.string());
    std::set<Address> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) out.insert(line);
    }
    return out;
}

void write_report_bundle(const ChainStore& store, const ReportOptions& options) {
    if (store.empty()) throw PreconditionError("empty store");
    if (!store.resolved()) throw PreconditionError("report requires a resolved store");
    std::filesystem::create_directories(options.out_dir);

    write_kinds(store, options.out_dir);
    write_pool(store, options.out_dir);
    write_address_and_wealth(store, options.out_dir);
    write_zz(store, options.out_dir);
    write_spikes(store, options.spike_threshold, options.out_dir);
    if (options.stats_only) return;

    std::set<Address> exclusions;
    if (options.exclusions_path) exclusions = load_exclusions(*options.exclusions_path);

    TagRegistry registry;
    if (options.founders_path) load_founder_params(registry, *options.founders_path);
    for (const auto& path : options.tag_csvs) import_tags_csv(registry, path);
    derive_miner_tags(store, registry);

    // the pipeline grows the founder/miner tag sets; cluster tag histograms
    // use the augmented registry
    AttributionResult attribution = run_pipeline(store, registry, options.max_rounds);
    const ClusterSet clusters = build_clusters(store, options.use_change, exclusions);
    write_clusters(clusters, registry, options.out_dir);
    write_founders(store, registry, options.out_dir);
    write_attribution_impl(store, attribution, options.out_dir);

    const auto trips = find_round_trips(store, options.max_gap);
    write_links(store, trips, attribution, options.curve_max_gap, options.out_dir);

    if (options.schedule_path) {
        const PriceSchedule schedule = load_schedule_csv(*options.schedule_path);
        const ClusterSet tsb_clusters = build_clusters(store, true, exclusions);
        const TsbScanResult result = scan(store, tsb_clusters, registry, schedule, options.tsb);
        write_tsb_impl(result, schedule, options.out_dir);
    }
}

} // namespace zana
