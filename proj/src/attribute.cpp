#include "zana/attribute.hpp"

#include <algorithm>

#include "zana/errors.hpp"

namespace zana {

const char* to_string(Party p) {
    switch (p) {
        case Party::Founder: return "founder";
        case Party::Miner: return "miner";
        case Party::Other: return "other";
    }
    return "?";
}

namespace {

Party deposit_party(const Transaction& tx, const TagRegistry& registry) {
    bool any_miner = false;
    for (const auto& in : tx.vin) {
        if (!in.resolved())
            throw PreconditionError("attribution requires a resolved store (tx " + tx.txid + ")");
        if (registry.is_founder(*in.resolved_address)) return Party::Founder;
        if (registry.is_miner(*in.resolved_address)) any_miner = true;
    }
    return any_miner ? Party::Miner : Party::Other;
}

Party withdrawal_party(const Transaction& tx, const TagRegistry& registry, Amount quantum,
                       std::size_t fanout, bool use_signatures = true) {
    if (use_signatures) {
        if (pool_withdrawal(tx) == quantum) return Party::Founder;
        if (tx.vout.size() > fanout) {
            for (const auto& out : tx.vout)
                if (registry.is_pool(out.address)) return Party::Miner;
        }
    }
    // naive linking: the withdrawal reuses an already-tagged address
    bool any_miner = false;
    for (const auto& out : tx.vout) {
        if (registry.is_founder(out.address)) return Party::Founder;
        if (registry.is_miner(out.address)) any_miner = true;
    }
    return any_miner ? Party::Miner : Party::Other;
}

} // namespace

AttributionResult attribute_deposits(const ChainStore& store, const TagRegistry& registry) {
    AttributionResult result;
    for (const auto& block : store.blocks()) {
        for (const auto& tx : block.txs) {
            const TxKind kind = classify_tx(tx);
            if (kind != TxKind::Shielded && kind != TxKind::Mixed) continue;
            const Party party = deposit_party(tx, registry);
            result.category[tx.txid] = party;
            auto& cov = result.deposit_coverage[party];
            ++cov.tx_count;
            cov.value = checked_add(cov.value, pool_deposit(tx));
        }
    }
    return result;
}

HeuristicOutcome apply_founder_withdrawal_heuristic(const ChainStore& store, TagRegistry& registry,
                                                    Amount quantum) {
    HeuristicOutcome outcome;
    for (const auto& block : store.blocks()) {
        for (const auto& tx : block.txs) {
            if (classify_tx(tx) != TxKind::Deshielded) continue;
            if (pool_withdrawal(tx) != quantum) continue;
            ++outcome.txs_tagged;
            for (const auto& out : tx.vout) {
                if (registry.is_founder(out.address)) continue;
                std::string reason;
                if (registry.try_insert(out.address, TagCategory::Founder, {},
                                        TagSource::Heuristic3, &reason))
                    ++outcome.addresses_tagged;
                else
                    outcome.conflicts.push_back(tx.txid + " output " + out.address + ": " + reason);
            }
        }
    }
    return outcome;
}

HeuristicOutcome apply_miner_withdrawal_heuristic(const ChainStore& store, TagRegistry& registry,
                                                  std::size_t fanout) {
    HeuristicOutcome outcome;
    for (const auto& block : store.blocks()) {
        for (const auto& tx : block.txs) {
            if (classify_tx(tx) != TxKind::Deshielded) continue;
            if (tx.vout.size() <= fanout) continue;
            std::string pool_name;
            bool has_pool = false;
            bool second_pool = false;
            for (const auto& out : tx.vout) {
                if (!registry.is_pool(out.address)) continue;
                const std::string name = registry.name_of(out.address, TagCategory::Pool);
                if (!has_pool) {
                    has_pool = true;
                    pool_name = name; // first-listed output wins
                } else if (name != pool_name) {
                    second_pool = true;
                }
            }
            if (!has_pool) continue;
            if (second_pool)
                outcome.anomalies.push_back(tx.txid + ": outputs name two pools, attributed to '" +
                                            pool_name + "'");
            ++outcome.txs_tagged;
            for (const auto& out : tx.vout) {
                if (registry.is_pool(out.address) || registry.is_miner(out.address)) continue;
                std::string reason;
                if (registry.try_insert(out.address, TagCategory::Miner, {},
                                        TagSource::Heuristic4, &reason))
                    ++outcome.addresses_tagged;
                else
                    outcome.conflicts.push_back(tx.txid + " output " + out.address + ": " + reason);
            }
        }
    }
    return outcome;
}

AttributionResult run_pipeline(const ChainStore& store, TagRegistry& registry,
                               std::uint32_t max_rounds) {
    AttributionResult result;

    // round in which each pool transaction first left `other`; round 0 is
    // base tags plus naive address reuse, before any value/fan-out signature
    auto record = [&](std::uint32_t round_no, bool use_signatures) {
        for (const auto& block : store.blocks()) {
            for (const auto& tx : block.txs) {
                const TxKind kind = classify_tx(tx);
                if (result.round_discovered.count(tx.txid)) continue;
                Party party = Party::Other;
                if (kind == TxKind::Shielded || kind == TxKind::Mixed)
                    party = deposit_party(tx, registry);
                else if (kind == TxKind::Deshielded)
                    party = withdrawal_party(tx, registry, kFounderWithdrawQuantum,
                                             kMinerPayoutFanout, use_signatures);
                else
                    continue;
                if (party != Party::Other) result.round_discovered[tx.txid] = round_no;
            }
        }
    };

    record(0, /*use_signatures=*/false);
    std::uint32_t round = 0;
    bool fixpoint = false;
    while (round < max_rounds) {
        ++round;
        auto h3 = apply_founder_withdrawal_heuristic(store, registry);
        auto h4 = apply_miner_withdrawal_heuristic(store, registry);
        result.new_founder_addresses += h3.addresses_tagged;
        result.new_miner_addresses += h4.addresses_tagged;
        for (auto& c : h3.conflicts) result.conflicts.push_back(std::move(c));
        for (auto& c : h4.conflicts) result.conflicts.push_back(std::move(c));
        for (auto& a : h4.anomalies) result.anomalies.push_back(std::move(a));
        record(round, /*use_signatures=*/true);
        if (h3.addresses_tagged + h4.addresses_tagged == 0) {
            fixpoint = true;
            break;
        }
    }
    result.rounds_run = round;
    result.converged = fixpoint;

    // final categorization with the settled tag set
    for (const auto& block : store.blocks()) {
        for (const auto& tx : block.txs) {
            const TxKind kind = classify_tx(tx);
            if (kind == TxKind::Shielded || kind == TxKind::Mixed) {
                const Party party = deposit_party(tx, registry);
                result.category[tx.txid] = party;
                if (party != Party::Other && !result.round_discovered.count(tx.txid))
                    result.round_discovered[tx.txid] = 0;
                auto& cov = result.deposit_coverage[party];
                ++cov.tx_count;
                cov.value = checked_add(cov.value, pool_deposit(tx));
            }
            if (kind == TxKind::Deshielded || kind == TxKind::Mixed) {
                Party party;
                if (kind == TxKind::Mixed) {
                    // a mixed tx is categorized once, by its deposit side
                    party = result.category.at(tx.txid);
                } else {
                    party = withdrawal_party(tx, registry, kFounderWithdrawQuantum,
                                             kMinerPayoutFanout);
                    result.category[tx.txid] = party;
                    if (party != Party::Other && !result.round_discovered.count(tx.txid))
                        result.round_discovered[tx.txid] = 0;
                }
                auto& cov = result.withdrawal_coverage[party];
                ++cov.tx_count;
                cov.value = checked_add(cov.value, pool_withdrawal(tx));
            }
        }
    }
    for (auto p : {Party::Founder, Party::Miner, Party::Other}) {
        result.deposit_coverage[p];
        result.withdrawal_coverage[p];
    }
    return result;
}

FounderReport founder_report(const ChainStore& store, const TagRegistry& registry,
                             Amount quantum) {
    // param founders only, ordered by first deposit
    std::unordered_map<Address, std::size_t> row_of;
    FounderReport report;
    for (const auto& block : store.blocks()) {
        for (const auto& tx : block.txs) {
            const TxKind kind = classify_tx(tx);
            if (kind != TxKind::Shielded && kind != TxKind::Mixed) continue;
            const Amount deposited = pool_deposit(tx);
            if (deposited.is_zero()) continue;
            // one founder address per deposit in practice; attribute the
            // full deposit to the first founder input
            for (const auto& in : tx.vin) {
                if (!in.resolved())
                    throw PreconditionError("founder_report requires a resolved store");
                const Address& a = *in.resolved_address;
                const auto* tags = registry.tags_of(a);
                bool is_param_founder = false;
                if (tags)
                    for (const auto& t : *tags)
                        is_param_founder |= t.category == TagCategory::Founder &&
                                            t.source == TagSource::Params;
                if (!is_param_founder) continue;
                auto [it, inserted] = row_of.emplace(a, report.rows.size());
                if (inserted) report.rows.push_back(FounderAddressRow{a, 0, Amount{}, 0});
                auto& row = report.rows[it->second];
                ++row.deposit_count;
                row.total_deposited = checked_add(row.total_deposited, deposited);
                if (deposited == quantum) ++row.quantum_deposit_count;
                break;
            }
        }
    }
    for (const auto& row : report.rows) {
        report.totals.deposit_count += row.deposit_count;
        report.totals.total_deposited = checked_add(report.totals.total_deposited,
                                                    row.total_deposited);
        report.totals.quantum_deposit_count += row.quantum_deposit_count;
    }
    return report;
}

IntervalStats interval_stats(const ChainStore& store, Amount value, FlowDirection direction,
                             std::uint64_t lo, std::uint64_t hi) {
    const auto& index = direction == FlowDirection::Deposit ? store.deposit_value_index()
                                                            : store.withdrawal_value_index();
    auto it = index.find(value.zat);
    if (it == index.end() || it->second.size() < 2)
        throw PreconditionError("fewer than two transactions of value " +
                                value.to_zec_string_trimmed());
    IntervalStats stats;
    const auto& txs = it->second; // chain order
    for (std::size_t i = 1; i < txs.size(); ++i) {
        const std::uint64_t gap = txs[i]->block_height - txs[i - 1]->block_height;
        ++stats.gaps_total;
        if (gap >= lo && gap <= hi) ++stats.gaps_within;
    }
    return stats;
}

} // namespace zana
