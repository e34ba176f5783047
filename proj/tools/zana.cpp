#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "zana/attribute.hpp"
#include "zana/cluster.hpp"
#include "zana/csv.hpp"
#include "zana/errors.hpp"
#include "zana/ingest.hpp"
#include "zana/link.hpp"
#include "zana/report.hpp"
#include "zana/stats.hpp"
#include "zana/synth.hpp"
#include "zana/tags.hpp"
#include "zana/tsb.hpp"

namespace {

using namespace zana;

ChainStore open_resolved(const std::string& store_dir) {
    ChainStore store = ChainStore::open(store_dir);
    store.resolve_inputs();
    return store;
}

TagRegistry load_registry(const ChainStore& store, const std::string& founders,
                          const std::vector<std::string>& tag_csvs, bool derive_miners = true) {
    TagRegistry registry;
    if (!founders.empty()) load_founder_params(registry, founders);
    for (const auto& path : tag_csvs) {
        auto report = import_tags_csv(registry, path);
        for (const auto& [line, reason] : report.rejected_rows)
            std::cerr << path << ":" << line << ": rejected: " << reason << "\n";
    }
    if (derive_miners) derive_miner_tags(store, registry);
    return registry;
}

std::set<Address> load_exclusion_set(const std::string& path) {
    if (path.empty()) return {};
    return load_exclusions(path);
}

int run(int argc, char** argv) {
    CLI::App app{"zana: Zcash chain analysis toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value config file");

    std::string store_dir = "store";
    app.add_option("--store", store_dir, "store directory")->capture_default_str();

    // --- synth ---------------------------------------------------------------
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic chain with ground truth");
    std::string synth_config, synth_out = "scenario";
    std::uint64_t synth_seed = 0;
    bool synth_seed_set = false;
    synth_cmd->add_option("--scenario,--config", synth_config, "scenario key=value file");
    synth_cmd->add_option("--out-dir", synth_out, "output directory")->capture_default_str();
    synth_cmd->add_option("--seed", synth_seed, "override scenario seed")
        ->each([&](const std::string&) { synth_seed_set = true; });
    synth_cmd->footer("Writes chain.jsonl (dump format), manifest.json (ground truth), "
                      "founders.txt, pool_tags.csv, tags.csv, exclusions.txt, schedule.csv");

    // --- import / ingest / resolve / check ------------------------------------
    auto* import_cmd = app.add_subcommand("import", "import a dump file into the store");
    std::string dump_path;
    import_cmd->add_option("--dump", dump_path, "newline-delimited dump file")->required();

    auto* ingest_cmd = app.add_subcommand("ingest", "pull blocks from a node RPC endpoint");
    std::string rpc_url;
    std::uint64_t from_height = 0, to_height = UINT64_MAX;
    ingest_cmd->add_option("--url", rpc_url, "node RPC url, e.g. http://127.0.0.1:8232")
        ->required();
    ingest_cmd->add_option("--from", from_height, "first height (default: resume)");
    ingest_cmd->add_option("--to", to_height, "last height (default: node tip)");

    auto* resolve_cmd = app.add_subcommand("resolve", "resolve transaction inputs");
    auto* check_cmd = app.add_subcommand("check", "verify chain integrity invariants");

    // --- analyses --------------------------------------------------------------
    std::string out_dir = "out";
    std::string founders_path;
    std::vector<std::string> tag_paths;
    std::string exclusions_path;

    auto add_common = [&](CLI::App* cmd, bool tags) {
        cmd->add_option("--out", out_dir, "output directory")->capture_default_str();
        if (tags) {
            cmd->add_option("--founders", founders_path, "founder address list");
            cmd->add_option("--tags", tag_paths, "tag CSV (repeatable)");
        }
    };

    auto* stats_cmd = app.add_subcommand("stats", "chain-wide statistics CSVs");
    add_common(stats_cmd, false);
    std::string spike_threshold_zec = "5000";
    stats_cmd->add_option("--spike-threshold", spike_threshold_zec, "ZEC per block")
        ->capture_default_str();
    stats_cmd->footer(
        "Writes: kinds.csv (kind,count,percent), pool_series.csv (height,deposited_zat,"
        "deposited_zec,withdrawn_zat,withdrawn_zec,balance_zat,balance_zec), pool_totals.csv,"
        " address_stats.csv, wealth.csv, zz_stats.csv, zz_daily.csv (day,private_txs,"
        "joinsplits), spikes.csv (height,direction,amount_zat,amount_zec)");

    auto* cluster_cmd = app.add_subcommand("cluster", "multi-input address clustering");
    add_common(cluster_cmd, false);
    bool use_change = false;
    cluster_cmd->add_flag("--use-change", use_change, "add single-output change linkage");
    cluster_cmd->add_option("--exclusions", exclusions_path, "change-link exclusion list");
    cluster_cmd->footer("Writes: clusters.csv (cluster_id,size,member_address)");

    auto* tag_cmd = app.add_subcommand("tag", "load tags and derive miner tags");
    add_common(tag_cmd, true);
    tag_cmd->footer("Reads founder list (one address per line) and tag CSVs "
                    "(address,category,name,source); writes tags.csv in the same format");

    auto* attribute_cmd = app.add_subcommand("attribute", "founder/miner attribution pipeline");
    add_common(attribute_cmd, true);
    std::uint32_t max_rounds = 10;
    attribute_cmd->add_option("--max-rounds", max_rounds)->capture_default_str();
    attribute_cmd->footer("Report bundle columns: attribution.csv "
                          "(txid,kind,category,value_zat,round_discovered), coverage.csv "
                          "(direction,category,tx_count,value_zat,value_zec,value_pct)");

    auto* link_cmd = app.add_subcommand("link", "unique-value round-trip linking");
    add_common(link_cmd, false);
    std::uint64_t max_gap = 100;
    link_cmd->add_option("--max-gap", max_gap, "block interval")->capture_default_str();
    link_cmd->footer("Writes: round_trips.csv (value_zat,deposit_txid,deposit_height,"
                     "withdrawal_txid,withdrawal_height,gap)");

    auto* tsb_cmd = app.add_subcommand("tsb", "scan for schedule-matching deposit clusters");
    add_common(tsb_cmd, true);
    std::string schedule_path;
    tsb_cmd->add_option("--schedule", schedule_path, "month,amount_zec CSV")->required();
    tsb_cmd->add_option("--exclusions", exclusions_path, "change-link exclusion list");
    std::string deposit_tol_zec = "5", cluster_tol_zec = "1";
    std::uint64_t activity_limit = 250;
    std::int64_t split_time = 0;
    bool sliding = false;
    tsb_cmd->add_option("--deposit-tol", deposit_tol_zec, "ZEC")->capture_default_str();
    tsb_cmd->add_option("--cluster-tol", cluster_tol_zec, "ZEC")->capture_default_str();
    tsb_cmd->add_option("--activity-limit", activity_limit)->capture_default_str();
    tsb_cmd->add_option("--split", split_time, "unix time splitting its month into before/after");
    tsb_cmd->add_flag("--sliding", sliding, "30-day window instead of calendar month");
    tsb_cmd->footer("Schedule CSV: month,amount_zec (multiple rows per month allowed). "
                    "Report bundle emits tsb_candidates.csv (cluster_id,month,"
                    "matched_amount_zat,matched_amount_zec,max_activity,deposit_txids) and "
                    "tsb_monthly.csv (month column, then one count column per amount)");

    auto* report_cmd = app.add_subcommand("report", "emit the full report bundle");
    add_common(report_cmd, true);
    report_cmd->add_option("--schedule", schedule_path, "month,amount_zec CSV");
    report_cmd->add_option("--exclusions", exclusions_path, "change-link exclusion list");
    report_cmd->add_flag("--use-change", use_change, "change linkage in global clustering");
    report_cmd->add_option("--max-gap", max_gap, "round-trip block interval")
        ->capture_default_str();
    report_cmd->add_option("--spike-threshold", spike_threshold_zec, "ZEC per block")
        ->capture_default_str();
    report_cmd->add_option("--max-rounds", max_rounds)->capture_default_str();
    report_cmd->add_option("--split", split_time, "unix time for the TSB month split");
    report_cmd->footer("Emits the full bundle: kinds, pool series/totals, address/wealth "
                       "stats, private-tx stats, spikes, clusters, cluster tags, founder "
                       "table, attribution, coverage, round trips, linked curve, value "
                       "decimals, anonymity, and the monthly candidate table when a "
                       "schedule is given. All amounts appear as zat integers plus "
                       "8-decimal ZEC strings.");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1; // usage error
    }

    if (synth_cmd->parsed()) {
        ScenarioConfig config;
        if (!synth_config.empty()) config = ScenarioConfig::from_file(synth_config);
        if (synth_seed_set) config.seed = synth_seed;
        SynthOutput output = generate(config);
        write_scenario(output, synth_out);
        std::cout << "blocks " << output.truth.blocks << "\n"
                  << "txs " << output.truth.txs << "\n"
                  << "digest " << output.truth.digest << "\n";
        return 0;
    }
    if (import_cmd->parsed()) {
        StoreLock lock(store_dir);
        ChainStore store = ChainStore::open(store_dir);
        IngestReport report = import_dump(store, dump_path);
        std::cout << "blocks_ingested " << report.blocks_ingested << "\n"
                  << "txs_ingested " << report.txs_ingested << "\n"
                  << "digest " << store.digest() << "\n";
        return 0;
    }
    if (ingest_cmd->parsed()) {
        StoreLock lock(store_dir);
        ChainStore store = ChainStore::open(store_dir);
        RpcEndpoint endpoint;
        endpoint.url = rpc_url;
        endpoint.fill_auth_from_env();
        std::uint64_t from = from_height;
        if (ingest_cmd->count("--from") == 0 && !store.empty()) from = store.tip_height() + 1;
        IngestReport report = sync_from_node(store, endpoint, from, to_height);
        std::cout << "blocks_ingested " << report.blocks_ingested << "\n"
                  << "txs_ingested " << report.txs_ingested << "\n"
                  << "outputs_unaddressed " << report.outputs_unaddressed << "\n"
                  << "digest " << store.digest() << "\n";
        return 0;
    }
    if (resolve_cmd->parsed()) {
        ChainStore store = ChainStore::open(store_dir);
        IngestReport report = resolve_inputs(store);
        std::cout << "inputs_resolved " << report.inputs_resolved << "\n"
                  << "inputs_unresolvable " << report.inputs_unresolvable << "\n";
        return report.inputs_unresolvable == 0 ? 0 : 2;
    }
    if (check_cmd->parsed()) {
        ChainStore store = ChainStore::open(store_dir);
        if (store.empty()) throw PreconditionError("empty store");
        auto stats = store.resolve_inputs();
        std::uint64_t violations = 0;
        Amount fees, coingen_total, pool_balance;
        for (const auto& block : store.blocks()) {
            for (const auto& tx : block.txs) {
                auto fee = conservation_check(tx);
                if (!fee) {
                    ++violations;
                    std::cerr << "conservation violation in " << tx.txid << "\n";
                    continue;
                }
                fees = checked_add(fees, *fee);
                if (tx.is_coinbase)
                    for (const auto& out : tx.vout)
                        coingen_total = checked_add(coingen_total, out.value);
            }
        }
        const PoolSeries series = pool_series(store); // throws if balance dips below zero
        pool_balance = series.final_balance;
        Amount unspent;
        for (const auto& block : store.blocks())
            for (const auto& tx : block.txs)
                for (const auto& out : tx.vout)
                    if (!store.spender_of(tx.txid, out.index))
                        unspent = checked_add(unspent, out.value);
        const Amount supply_lhs = checked_add(checked_add(unspent, fees), pool_balance);
        std::cout << "txs " << store.tx_count() << "\n"
                  << "inputs_unresolvable " << stats.inputs_unresolvable << "\n"
                  << "conservation_violations " << violations << "\n"
                  << "unspent_zat " << unspent.zat << "\n"
                  << "fees_zat " << fees.zat << "\n"
                  << "pool_balance_zat " << pool_balance.zat << "\n"
                  << "coingen_zat " << coingen_total.zat << "\n"
                  << "supply_equation "
                  << (supply_lhs == coingen_total ? "balanced" : "UNBALANCED") << "\n";
        return (violations == 0 && stats.inputs_unresolvable == 0 && supply_lhs == coingen_total)
                   ? 0
                   : 2;
    }

    // analysis subcommands share the resolved read-only store
    ChainStore store = open_resolved(store_dir);
    if (store.empty()) throw PreconditionError("empty store");
    std::filesystem::create_directories(out_dir);

    if (stats_cmd->parsed()) {
        ReportOptions options;
        options.out_dir = out_dir;
        options.spike_threshold = Amount::from_zec_string(spike_threshold_zec);
        options.stats_only = true;
        const KindBreakdown kb = kind_breakdown(store);
        std::cout << "total_txs " << kb.total << "\n";
        for (std::size_t i = 0; i < kTxKindCount; ++i)
            std::cout << to_string(static_cast<TxKind>(i)) << " " << kb.counts[i] << "\n";
        const PoolSeries series = pool_series(store);
        std::cout << "deposited_zec " << series.total_deposited.to_zec_string() << "\n"
                  << "withdrawn_zec " << series.total_withdrawn.to_zec_string() << "\n"
                  << "pool_balance_zec " << series.final_balance.to_zec_string() << "\n";
        write_report_bundle(store, options);
        return 0;
    }
    if (cluster_cmd->parsed()) {
        const ClusterSet clusters =
            build_clusters(store, use_change, load_exclusion_set(exclusions_path));
        std::cout << "clusters " << clusters.cluster_count() << "\n"
                  << "multi_address_clusters " << clusters.multi_address_clusters << "\n";
        std::ofstream out(std::filesystem::path(out_dir) / "clusters.csv", std::ios::binary);
        out << "cluster_id,size,member_address\n";
        for (std::uint32_t id = 0; id < clusters.cluster_count(); ++id)
            for (const auto& addr : clusters.members_of(id))
                out << id << ',' << clusters.members_of(id).size() << ',' << addr << '\n';
        return 0;
    }
    if (tag_cmd->parsed()) {
        TagRegistry registry = load_registry(store, founders_path, {tag_paths.begin(), tag_paths.end()});
        std::cout << "founder_addresses " << registry.count_in(TagCategory::Founder) << "\n"
                  << "pool_addresses " << registry.count_in(TagCategory::Pool) << "\n"
                  << "miner_addresses " << registry.count_in(TagCategory::Miner) << "\n"
                  << "exchange_addresses " << registry.count_in(TagCategory::Exchange) << "\n"
                  << "service_addresses " << registry.count_in(TagCategory::Service) << "\n";
        std::ofstream out(std::filesystem::path(out_dir) / "tags.csv", std::ios::binary);
        out << "address,category,name,source\n";
        for (auto c : {TagCategory::Founder, TagCategory::Pool, TagCategory::Miner,
                       TagCategory::Exchange, TagCategory::Service, TagCategory::User}) {
            for (const auto& addr : registry.addresses_in(c)) {
                for (const auto& tag : *registry.tags_of(addr)) {
                    if (tag.category != c) continue;
                    out << addr << ',' << to_string(c) << ',' << csv_escape(tag.name) << ','
                        << to_string(tag.source) << '\n';
                }
            }
        }
        return 0;
    }
    if (attribute_cmd->parsed()) {
        TagRegistry registry = load_registry(store, founders_path, {tag_paths.begin(), tag_paths.end()});
        AttributionResult result = run_pipeline(store, registry, max_rounds);
        std::cout << "rounds " << result.rounds_run << "\n"
                  << "converged " << (result.converged ? "true" : "false") << "\n"
                  << "new_founder_addresses " << result.new_founder_addresses << "\n"
                  << "new_miner_addresses " << result.new_miner_addresses << "\n";
        for (const auto& [party, cov] : result.withdrawal_coverage)
            std::cout << "withdrawal_" << to_string(party) << " " << cov.tx_count << " "
                      << cov.value.to_zec_string() << "\n";
        write_attribution_csvs(store, result, out_dir);
        return 0;
    }
    if (link_cmd->parsed()) {
        const auto trips = find_round_trips(store, max_gap);
        Amount total;
        for (const auto& t : trips) total = checked_add(total, t.value);
        std::cout << "round_trips " << trips.size() << "\n"
                  << "linked_value_zec " << total.to_zec_string() << "\n";
        std::ofstream out(std::filesystem::path(out_dir) / "round_trips.csv", std::ios::binary);
        out << "value_zat,deposit_txid,deposit_height,withdrawal_txid,withdrawal_height,gap\n";
        for (const auto& t : trips)
            out << t.value.zat << ',' << t.deposit_txid << ',' << t.deposit_height << ','
                << t.withdrawal_txid << ',' << t.withdrawal_height << ',' << t.gap << '\n';
        return 0;
    }
    if (tsb_cmd->parsed()) {
        TagRegistry registry = load_registry(store, founders_path, {tag_paths.begin(), tag_paths.end()});
        run_pipeline(store, registry, max_rounds);
        const PriceSchedule schedule = load_schedule_csv(schedule_path);
        const ClusterSet clusters = build_clusters(store, true, load_exclusion_set(exclusions_path));
        TsbOptions options;
        options.deposit_tol = Amount::from_zec_string(deposit_tol_zec);
        options.cluster_tol = Amount::from_zec_string(cluster_tol_zec);
        options.activity_limit = activity_limit;
        if (split_time != 0) options.split_time = split_time;
        options.sliding_window = sliding;
        const TsbScanResult result = scan(store, clusters, registry, schedule, options);
        std::cout << "flagged_clusters " << result.candidates.size() << "\n";
        for (const auto& c : result.candidates)
            std::cout << "candidate " << c.cluster_id << " " << c.month << " "
                      << c.matched_amount.to_zec_string_trimmed() << "\n";
        write_tsb_csvs(result, schedule, out_dir);
        return 0;
    }
    if (report_cmd->parsed()) {
        ReportOptions options;
        options.out_dir = out_dir;
        if (!founders_path.empty()) options.founders_path = founders_path;
        for (const auto& p : tag_paths) options.tag_csvs.emplace_back(p);
        if (!schedule_path.empty()) options.schedule_path = schedule_path;
        if (!exclusions_path.empty()) options.exclusions_path = exclusions_path;
        options.use_change = use_change;
        options.max_gap = max_gap;
        options.spike_threshold = Amount::from_zec_string(spike_threshold_zec);
        options.max_rounds = max_rounds;
        if (split_time != 0) options.tsb.split_time = split_time;
        write_report_bundle(store, options);
        std::cout << "report_dir " << out_dir << "\n";
        return 0;
    }
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const zana::RpcError& e) {
        std::cerr << "error: " << e.what();
        if (e.resume_height) std::cerr << " (resume from height " << *e.resume_height << ")";
        std::cerr << "\n";
        return 2;
    } catch (const zana::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const zana::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
