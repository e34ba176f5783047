#include <doctest.h>

#include <map>
#include <queue>
#include <set>

#include "chain_builder.hpp"
#include "zana/cluster.hpp"
#include "zana/errors.hpp"
#include "zana/synth.hpp"

using namespace zana;
using zana::test::Builder;
using zana::test::zats;

namespace {

// Independent oracle: BFS connected components over the bipartite
// address-transaction graph (input addresses of one tx are mutually linked).
std::set<std::set<Address>> bfs_components(const ChainStore& store) {
    std::map<Address, std::vector<const Transaction*>> addr_txs;
    std::map<const Transaction*, std::vector<Address>> tx_addrs;
    std::set<Address> all;
    for (const auto& block : store.blocks()) {
        for (const auto& tx : block.txs) {
            for (const auto& in : tx.vin) {
                REQUIRE(in.resolved());
                addr_txs[*in.resolved_address].push_back(&tx);
                tx_addrs[&tx].push_back(*in.resolved_address);
                all.insert(*in.resolved_address);
            }
            for (const auto& out : tx.vout) all.insert(out.address);
        }
    }
    std::set<std::set<Address>> components;
    std::set<Address> visited;
    for (const auto& start : all) {
        if (visited.count(start)) continue;
        std::set<Address> component;
        std::queue<Address> frontier;
        frontier.push(start);
        visited.insert(start);
        while (!frontier.empty()) {
            Address a = frontier.front();
            frontier.pop();
            component.insert(a);
            auto it = addr_txs.find(a);
            if (it == addr_txs.end()) continue;
            for (const Transaction* tx : it->second)
                for (const auto& peer : tx_addrs[tx])
                    if (visited.insert(peer).second) frontier.push(peer);
        }
        components.insert(std::move(component));
    }
    return components;
}

std::set<std::set<Address>> as_partition(const ClusterSet& clusters) {
    std::set<std::set<Address>> out;
    for (std::uint32_t id = 0; id < clusters.cluster_count(); ++id)
        out.insert(std::set<Address>(clusters.members_of(id).begin(),
                                     clusters.members_of(id).end()));
    return out;
}

} // namespace

TEST_CASE("co-spent inputs merge transitively") {
    Builder b;
    b.add_block("t1m", zats(30));
    b.add_tx({{"cg0", 0}}, {{"t1a", zats(10)}, {"t1b", zats(10)}, {"t1c", zats(9)}});
    b.add_block("t1m");
    b.add_tx({{"tx1", 0}, {"tx1", 1}}, {{"t1d", zats(19)}});  // {a,b}
    b.add_block("t1m");
    b.add_tx({{"tx2", 0}, {"tx1", 2}}, {{"t1e", zats(27)}});  // {d,c}
    auto store = b.store();
    auto clusters = build_clusters(store, false, {});
    // a,b co-spent; then d,c co-spent; a-b and c-d are separate clusters
    CHECK(clusters.cluster_of("t1a") == clusters.cluster_of("t1b"));
    CHECK(clusters.cluster_of("t1c") == clusters.cluster_of("t1d"));
    CHECK(clusters.cluster_of("t1a") != clusters.cluster_of("t1c"));

    // the spec's transitivity case: inputs {a,b} and {b,c} give one {a,b,c}
    Builder c;
    c.add_block("t1m", zats(40));
    c.add_tx({{"cg0", 0}},
             {{"t1a", zats(10)}, {"t1b", zats(10)}, {"t1c", zats(10)}, {"t1b", zats(9)}});
    c.add_block("t1m");
    c.add_tx({{"tx1", 0}, {"tx1", 1}}, {{"t1d", zats(19)}});  // {a,b}
    c.add_block("t1m");
    c.add_tx({{"tx1", 3}, {"tx1", 2}}, {{"t1e", zats(18)}});  // {b,c}
    auto cstore = c.store();
    auto cc = build_clusters(cstore, false, {});
    CHECK(cc.cluster_of("t1a") == cc.cluster_of("t1b"));
    CHECK(cc.cluster_of("t1b") == cc.cluster_of("t1c"));
    CHECK(cc.members_of(cc.cluster_of("t1a")).size() == 3);
}

TEST_CASE("single-input transactions leave singleton clusters") {
    Builder b;
    b.add_block("t1m", zats(10));
    b.add_tx({{"cg0", 0}}, {{"t1a", zats(9)}});
    b.add_block("t1m");
    b.add_tx({{"tx1", 0}}, {{"t1b", zats(8)}});
    auto store = b.store();
    auto clusters = build_clusters(store, false, {});
    CHECK(clusters.cluster_count() == 3); // t1m, t1a, t1b
    for (std::uint32_t id = 0; id < clusters.cluster_count(); ++id)
        CHECK(clusters.members_of(id).size() == 1);
    CHECK(clusters.multi_address_clusters == 0);
}

TEST_CASE("cluster ids are ordered by size with deterministic tie-breaks") {
    Builder b;
    b.add_block("t1m", zats(100));
    b.add_tx({{"cg0", 0}},
             {{"t1a", zats(10)}, {"t1b", zats(10)}, {"t1x", zats(10)}, {"t1y", zats(10)},
              {"t1z", zats(10)}, {"t1q", zats(49)}});
    b.add_block("t1m");
    b.add_tx({{"tx1", 2}, {"tx1", 3}, {"tx1", 4}}, {{"t1big", zats(29)}});  // {x,y,z} size 3
    b.add_block("t1m");
    b.add_tx({{"tx1", 0}, {"tx1", 1}}, {{"t1c", zats(19)}});                // {a,b} size 2
    auto store = b.store();
    auto clusters = build_clusters(store, false, {});
    CHECK(clusters.cluster_of("t1x") == 0); // biggest cluster gets id 0
    CHECK(clusters.cluster_of("t1a") == 1);
    CHECK(clusters.members_of(0).size() == 3);
    CHECK(clusters.multi_address_clusters == 2);

    // singletons tie on size 1: earlier first appearance wins, then address
    const auto id_m = clusters.cluster_of("t1m");
    const auto id_q = clusters.cluster_of("t1q");
    CHECK(id_m < id_q); // t1m appears at height 0 before t1q's tx confirms

    CHECK_THROWS_AS(clusters.cluster_of("t1never"), NotFoundError);
}

TEST_CASE("change links require a boundary crossing with one transparent output") {
    Builder b;
    b.add_block("t1m", zats(100));
    b.add_tx({{"cg0", 0}},
             {{"t1a", zats(20)}, {"t1b", zats(20)}, {"t1c", zats(20)}, {"t1fee", zats(39)}});
    b.add_block("t1m");
    b.add_tx({{"tx1", 0}}, {{"t1chg", zats(9)}}, {{zats(10), 0}});     // mixed, 1 output: link
    b.add_tx({{"tx1", 1}}, {{"t1u", zats(5)}, {"t1v", zats(4)}},
             {{zats(10), 0}});                                          // 2 outputs: no link
    b.add_tx({{"tx1", 2}}, {{"t1fee", zats(9)}}, {{zats(10), 0}});     // excluded address
    b.add_tx({}, {{"t1w", zats(3)}}, {{0, zats(4)}});                  // no vin: no link
    auto store = b.store();
    auto links = find_change_links(store, {"t1fee"});
    REQUIRE(links.size() == 1);
    CHECK(links[0].input_address == "t1a");
    CHECK(links[0].output_address == "t1chg");

    auto without_exclusion = find_change_links(store, {});
    CHECK(without_exclusion.size() == 2);

    auto with_change = build_clusters(store, true, {"t1fee"});
    CHECK(with_change.cluster_of("t1a") == with_change.cluster_of("t1chg"));
    auto without_change = build_clusters(store, false, {"t1fee"});
    CHECK(without_change.cluster_of("t1a") != without_change.cluster_of("t1chg"));
}

TEST_CASE("partition equals BFS components on randomized scenarios") {
    for (std::uint64_t seed : {41u, 42u, 43u, 44u, 45u, 46u, 47u, 48u}) {
        ScenarioConfig cfg;
        cfg.blocks = 160 + (seed % 4) * 60;
        cfg.seed = seed;
        cfg.users = 3 + seed % 3;
        cfg.round_trips = 3;
        cfg.private_txs = 2;
        cfg.tsb_buyers = 0;
        cfg.tsb_decoys = false;
        auto scenario = generate(cfg);
        ChainStore store;
        for (const auto& blk : scenario.chain) store.append_block(blk);
        store.resolve_inputs();
        auto clusters = build_clusters(store, false, {});
        CHECK(as_partition(clusters) == bfs_components(store));
    }
}

TEST_CASE("extending the chain never splits clusters") {
    ScenarioConfig cfg;
    cfg.blocks = 240;
    cfg.seed = 55;
    cfg.users = 4;
    cfg.round_trips = 3;
    cfg.private_txs = 2;
    cfg.tsb_buyers = 0;
    cfg.tsb_decoys = false;
    auto scenario = generate(cfg);

    ChainStore prefix;
    for (std::size_t h = 0; h < 120; ++h) prefix.append_block(scenario.chain[h]);
    prefix.resolve_inputs();
    auto before = build_clusters(prefix, false, {});

    ChainStore full;
    for (const auto& blk : scenario.chain) full.append_block(blk);
    full.resolve_inputs();
    auto after = build_clusters(full, false, {});

    for (std::uint32_t id = 0; id < before.cluster_count(); ++id) {
        const auto& members = before.members_of(id);
        const std::uint32_t target = after.cluster_of(members.front());
        for (const auto& addr : members) CHECK(after.cluster_of(addr) == target);
    }
}

TEST_CASE("build_clusters is deterministic across runs") {
    ScenarioConfig cfg;
    cfg.blocks = 200;
    cfg.seed = 66;
    cfg.tsb_buyers = 0;
    cfg.tsb_decoys = false;
    auto scenario = generate(cfg);
    ChainStore store;
    for (const auto& blk : scenario.chain) store.append_block(blk);
    store.resolve_inputs();
    auto a = build_clusters(store, false, {});
    auto b = build_clusters(store, false, {});
    REQUIRE(a.cluster_count() == b.cluster_count());
    for (std::uint32_t id = 0; id < a.cluster_count(); ++id)
        CHECK(a.members_of(id) == b.members_of(id));
}

TEST_CASE("unresolved store is rejected") {
    Builder b;
    b.add_block("t1m", zats(10));
    b.add_tx({{"cg0", 0}}, {{"t1a", zats(9)}});
    auto store = b.store(false);
    CHECK_THROWS_AS(build_clusters(store, false, {}), PreconditionError);
}
