#include <doctest.h>

#include <map>
#include <set>

#include "chain_builder.hpp"
#include "zana/errors.hpp"
#include "zana/stats.hpp"
#include "zana/synth.hpp"
#include "zana/timebucket.hpp"

using namespace zana;
using zana::test::Builder;
using zana::test::zats;

namespace {

SynthOutput scenario(std::uint64_t blocks, std::uint64_t seed) {
    ScenarioConfig cfg;
    cfg.blocks = blocks;
    cfg.seed = seed;
    cfg.users = 5;
    cfg.round_trips = 4;
    cfg.private_txs = 4;
    cfg.tsb_buyers = 0;
    cfg.tsb_decoys = false;
    return generate(cfg);
}

ChainStore store_of(const SynthOutput& s) {
    ChainStore store;
    for (const auto& b : s.chain) store.append_block(b);
    store.resolve_inputs();
    return store;
}

} // namespace

TEST_CASE("kind_breakdown: empty store, hand counts, range additivity") {
    ChainStore empty;
    auto kb = kind_breakdown(empty);
    CHECK(kb.total == 0);

    Builder b;
    b.add_block("t1m", zats(10));                       // coingen
    b.add_tx({{"cg0", 0}}, {{"t1a", zats(9)}});         // transparent
    b.add_tx({{"tx1", 0}}, {}, {{zats(8), 0}});         // shielded
    b.add_block("t1m");
    b.add_tx({}, {{"t1b", zats(3)}}, {{0, zats(4)}});   // deshielded
    b.add_tx({}, {}, {{0, 0}});                         // private
    auto store = b.store();
    auto all = kind_breakdown(store);
    CHECK(all.count(TxKind::Coingen) == 2);
    CHECK(all.count(TxKind::Transparent) == 1);
    CHECK(all.count(TxKind::Shielded) == 1);
    CHECK(all.count(TxKind::Deshielded) == 1);
    CHECK(all.count(TxKind::Private) == 1);
    CHECK(all.total == 6);

    auto first = kind_breakdown(store, 0, 0);
    auto second = kind_breakdown(store, 1, 1);
    for (std::size_t i = 0; i < kTxKindCount; ++i)
        CHECK(first.counts[i] + second.counts[i] == all.counts[i]);
}

TEST_CASE("kind_breakdown matches the generator manifest") {
    auto s = scenario(400, 31);
    auto store = store_of(s);
    auto kb = kind_breakdown(store);
    for (std::size_t i = 0; i < kTxKindCount; ++i) CHECK(kb.counts[i] == s.truth.kind_counts[i]);
    CHECK(kb.total == s.truth.txs);
}

TEST_CASE("pool_series: cumulative balance and corruption flag") {
    Builder b;
    b.add_block("t1m", zats(20));
    b.add_tx({{"cg0", 0}}, {}, {{zats(10), 0}});
    b.add_block("t1m");
    b.add_tx({}, {{"t1x", zats(3)}}, {{0, zats(4)}});
    auto store = b.store();
    auto series = pool_series(store);
    CHECK(series.per_height[0].balance == Amount{zats(10)});
    CHECK(series.per_height[1].balance == Amount{zats(6)});
    CHECK(series.total_deposited == Amount{zats(10)});
    CHECK(series.total_withdrawn == Amount{zats(4)});
    CHECK(series.final_balance == Amount{zats(6)});

    // withdrawing more than was ever deposited flags corruption
    Builder bad;
    bad.add_block("t1m", zats(20));
    bad.add_tx({}, {{"t1x", zats(3)}}, {{0, zats(4)}});
    auto bad_store = bad.store();
    CHECK_THROWS_AS(pool_series(bad_store), IntegrityError);
}

TEST_CASE("pool_series equals the generator's pool ledger") {
    auto s = scenario(350, 32);
    auto store = store_of(s);
    auto series = pool_series(store);
    REQUIRE(series.per_height.size() == s.truth.pool_per_block.size());
    Amount balance;
    for (std::size_t h = 0; h < series.per_height.size(); ++h) {
        CHECK(series.per_height[h].deposited == s.truth.pool_per_block[h].first);
        CHECK(series.per_height[h].withdrawn == s.truth.pool_per_block[h].second);
        balance = checked_add(balance, s.truth.pool_per_block[h].first);
        balance = checked_sub(balance, s.truth.pool_per_block[h].second);
        CHECK(series.per_height[h].balance == balance);
    }
}

TEST_CASE("address_stats counts each address once per category") {
    Builder b;
    b.add_block("t1m", zats(30));
    b.add_tx({{"cg0", 0}}, {{"t1a", zats(20)}, {"t1b", zats(9)}});
    b.add_tx({{"tx1", 0}}, {}, {{zats(19), 0}});          // t1a shields
    b.add_block("t1m");
    b.add_tx({}, {{"t1a", zats(2)}}, {{0, zats(3)}});     // t1a receives a withdrawal
    b.add_tx({}, {{"t1c", zats(4)}}, {{0, zats(5)}});
    auto store = b.store();
    auto stats = address_stats(store);
    CHECK(stats.distinct_t == 4); // t1m, t1a, t1b, t1c
    CHECK(stats.ever_shielding_inputs == 1);
    CHECK(stats.ever_deshielding_outputs == 2);

    ChainStore empty;
    auto zero = address_stats(empty);
    CHECK(zero.distinct_t == 0);
    CHECK(zero.ever_shielding_inputs == 0);
    CHECK(zero.ever_deshielding_outputs == 0);
}

TEST_CASE("wealth_distribution equals a brute-force UTXO walk") {
    auto s = scenario(300, 33);
    auto store = store_of(s);
    const std::uint64_t tip = store.tip_height();
    auto w = wealth_distribution(store, tip);

    // independent oracle: naive UTXO map over the raw chain
    std::map<std::pair<std::string, std::uint32_t>, std::pair<Address, std::uint64_t>> utxo;
    for (const auto& b : s.chain) {
        for (const auto& tx : b.txs) {
            for (const auto& in : tx.vin) utxo.erase({in.prev_txid, in.prev_index});
            for (const auto& out : tx.vout)
                utxo[{tx.txid, out.index}] = {out.address, out.value.zat};
        }
    }
    std::map<Address, std::uint64_t> balances;
    for (const auto& [key, val] : utxo) balances[val.first] += val.second;
    std::uint64_t nonzero = 0, total = 0, top = 0;
    std::vector<std::uint64_t> sorted;
    for (const auto& [addr, zat] : balances)
        if (zat > 0) {
            ++nonzero;
            total += zat;
            sorted.push_back(zat);
        }
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    for (std::uint64_t i = 0; i < (sorted.size() + 99) / 100 && i < sorted.size(); ++i)
        top += sorted[i];

    CHECK(w.nonzero_count == nonzero);
    CHECK(w.total_balance.zat == total);
    CHECK(w.max_balance.zat == (sorted.empty() ? 0 : sorted.front()));
    auto [share_top, share_total] = w.top_percent_share(1);
    CHECK(share_top == top);
    CHECK(share_total == total);
}

TEST_CASE("wealth_distribution: single holder owns the whole top share") {
    Builder b;
    b.add_block("t1only", zats(12));
    auto store = b.store();
    auto w = wealth_distribution(store, 0);
    CHECK(w.nonzero_count == 1);
    auto [top, total] = w.top_percent_share(1);
    CHECK(top == total);
}

TEST_CASE("zz_joinsplit_stats counts private transactions per day") {
    Builder b;
    b.add_block("t1m", zats(50));
    b.add_tx({{"cg0", 0}}, {}, {{zats(40), 0}});
    b.add_tx({}, {}, {{0, 0}});
    b.add_tx({}, {}, {{0, 0}, {0, 0}}); // two joinsplits
    auto store = b.store();
    auto zz = zz_joinsplit_stats(store);
    CHECK(zz.private_tx_count == 2);
    CHECK(zz.joinsplit_count == 3);
    CHECK(zz.single_joinsplit_txs == 1);
    REQUIRE(zz.per_day.size() == 1);
    CHECK(zz.per_day.begin()->second.first == 2);
    CHECK(zz.per_day.begin()->second.second == 3);
}

TEST_CASE("spike_report lists per-block totals above the threshold") {
    Builder b;
    b.add_block("t1m", zats(20000));
    b.add_tx({{"cg0", 0}}, {}, {{zats(7000), 0}});
    b.add_block("t1m");
    b.add_tx({}, {{"t1x", zats(5999)}}, {{0, zats(6000)}});
    b.add_block("t1m");
    auto store = b.store();

    auto spikes = spike_report(store, Amount{zats(5000)});
    REQUIRE(spikes.size() == 2);
    CHECK(spikes[0].height == 0);
    CHECK(spikes[0].direction == FlowDirection::Deposit);
    CHECK(spikes[0].amount == Amount{zats(7000)});
    CHECK(spikes[1].height == 1);
    CHECK(spikes[1].direction == FlowDirection::Withdrawal);

    CHECK(spike_report(store, Amount{zats(8000)}).empty());

    // exactly one planted spike above everything else on this chain
    auto only = spike_report(store, Amount{zats(6500)});
    REQUIRE(only.size() == 1);
    CHECK(only[0].height == 0);
}

TEST_CASE("spike_report on a generated chain equals a per-block recount") {
    auto s = scenario(250, 34);
    auto store = store_of(s);
    const Amount threshold{zats(300)};
    auto spikes = spike_report(store, threshold);
    std::vector<Spike> expected;
    for (std::size_t h = 0; h < s.truth.pool_per_block.size(); ++h) {
        const auto& [dep, wd] = s.truth.pool_per_block[h];
        if (dep > threshold) expected.push_back({h, FlowDirection::Deposit, dep});
        if (wd > threshold) expected.push_back({h, FlowDirection::Withdrawal, wd});
    }
    REQUIRE(spikes.size() == expected.size());
    for (std::size_t i = 0; i < spikes.size(); ++i) {
        CHECK(spikes[i].height == expected[i].height);
        CHECK(spikes[i].direction == expected[i].direction);
        CHECK(spikes[i].amount == expected[i].amount);
    }
}

TEST_CASE("address_stats equals an independent recount on a generated chain") {
    auto s = scenario(300, 35);
    auto store = store_of(s);
    auto stats = address_stats(store);

    std::set<Address> all, shielding, deshielding;
    std::map<std::pair<std::string, std::uint32_t>, Address> outputs;
    for (const auto& b : s.chain)
        for (const auto& tx : b.txs)
            for (const auto& out : tx.vout) outputs[{tx.txid, out.index}] = out.address;
    for (const auto& b : s.chain) {
        for (const auto& tx : b.txs) {
            const bool deposits = !pool_deposit(tx).is_zero();
            const bool withdraws = !pool_withdrawal(tx).is_zero();
            for (const auto& in : tx.vin) {
                const Address& a = outputs.at({in.prev_txid, in.prev_index});
                all.insert(a);
                if (deposits) shielding.insert(a);
            }
            for (const auto& out : tx.vout) {
                all.insert(out.address);
                if (withdraws) deshielding.insert(out.address);
            }
        }
    }
    CHECK(stats.distinct_t == all.size());
    CHECK(stats.ever_shielding_inputs == shielding.size());
    CHECK(stats.ever_deshielding_outputs == deshielding.size());
    CHECK(stats.ever_shielding_inputs > 0);
    CHECK(stats.ever_deshielding_outputs > 0);
}

TEST_CASE("utc bucketing handles day and month boundaries") {
    CHECK(utc_day_index(0) == 0);
    CHECK(utc_day_index(86399) == 0);
    CHECK(utc_day_index(86400) == 1);
    CHECK(utc_month_label(utc_month_index(1477600000)) == "2016-10");
    CHECK(utc_month_label(utc_month_index(1477958400)) == "2016-11"); // Nov 1 2016
    CHECK(utc_day_label(0) == "1970-01-01");
}
