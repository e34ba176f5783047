#include "zana/tsb.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "zana/csv.hpp"
#include "zana/errors.hpp"
#include "zana/timebucket.hpp"

namespace zana {

std::vector<Amount> PriceSchedule::distinct_amounts() const {
    std::set<std::uint64_t> zats;
    for (const auto& e : entries) zats.insert(e.amount.zat);
    std::vector<Amount> out;
    out.reserve(zats.size());
    for (auto z : zats) out.push_back(Amount{z});
    return out;
}

PriceSchedule load_schedule_csv(const std::filesystem::path& path) {
    auto rows = read_csv(path);
    PriceSchedule schedule;
    std::size_t first = 0;
    if (!rows.empty() && !rows[0].empty() && rows[0][0] == "month") first = 1;
    for (std::size_t i = first; i < rows.size(); ++i) {
        if (rows[i].size() < 2) throw ParseError("expected month,amount_zec", i + 1);
        schedule.entries.push_back({rows[i][0], Amount::from_zec_string(rows[i][1])});
    }
    return schedule;
}

namespace {

// Bucket key ordering months chronologically, the split month in two halves.
struct MonthBucket {
    std::int64_t month_index;
    int half; // 0 = whole month (or before split), 1 = after split

    bool operator<(const MonthBucket& o) const {
        return std::tie(month_index, half) < std::tie(o.month_index, o.half);
    }
    bool operator==(const MonthBucket& o) const {
        return month_index == o.month_index && half == o.half;
    }
};

MonthBucket bucket_of(std::int64_t t, const TsbOptions& options) {
    MonthBucket b{utc_month_index(t), 0};
    if (options.split_time && utc_month_index(*options.split_time) == b.month_index)
        b.half = t < *options.split_time ? 0 : 1;
    return b;
}

std::string bucket_label(const MonthBucket& b, const TsbOptions& options) {
    std::string label = utc_month_label(b.month_index);
    if (options.split_time && utc_month_index(*options.split_time) == b.month_index)
        label += b.half == 0 ? "-before" : "-after";
    return label;
}

std::optional<Amount> nearest_within(Amount value, const std::vector<Amount>& amounts,
                                     Amount tol) {
    std::optional<Amount> best;
    std::uint64_t best_dist = 0;
    for (Amount a : amounts) {
        const std::uint64_t dist = a.zat > value.zat ? a.zat - value.zat : value.zat - a.zat;
        if (dist > tol.zat) continue;
        if (!best || dist < best_dist) {
            best = a;
            best_dist = dist;
        }
    }
    return best;
}

// Distinct transactions in which the address appears as resolved input or
// output, over the full chain.
std::uint64_t activity_count(const ChainStore& store, const Address& a) {
    const AddressUse* use = store.address_use(a);
    if (!use) return 0;
    std::unordered_set<const Transaction*> txs;
    for (const auto* tx : use->as_input) txs.insert(tx);
    for (const auto* tx : use->as_output) txs.insert(tx);
    return txs.size();
}

bool received_deshielded_before(const ChainStore& store, const Address& a,
                                std::uint64_t height) {
    const AddressUse* use = store.address_use(a);
    if (!use) return false;
    for (const Transaction* tx : use->as_output)
        if (tx->block_height < height && classify_tx(*tx) == TxKind::Deshielded) return true;
    return false;
}

} // namespace

TsbScanResult scan(const ChainStore& store, const ClusterSet& clusters,
                   const TagRegistry& registry, const PriceSchedule& schedule,
                   const TsbOptions& options) {
    if (schedule.empty()) throw PreconditionError("empty price schedule");
    const std::vector<Amount> amounts = schedule.distinct_amounts();

    struct DepositRef {
        const Transaction* tx;
        std::uint32_t cluster_id;
    };

    // candidate deposits with their cluster, plus per-cluster deposit streams
    // for the window totals of condition 3
    std::vector<DepositRef> candidates;
    std::map<std::uint32_t, std::vector<const Transaction*>> cluster_deposits;
    for (const auto& block : store.blocks()) {
        for (const auto& tx : block.txs) {
            const TxKind kind = classify_tx(tx);
            if (kind != TxKind::Shielded && kind != TxKind::Mixed) continue;
            const Amount dep = pool_deposit(tx);
            if (dep.is_zero()) continue;
            if (tx.vin.empty() || !tx.vin.front().resolved())
                throw PreconditionError("tsb scan requires a resolved store");
            const std::uint32_t cluster_id = clusters.cluster_of(*tx.vin.front().resolved_address);
            cluster_deposits[cluster_id].push_back(&tx);
            bool tagged_input = false;
            for (const auto& in : tx.vin)
                if (registry.is_founder(*in.resolved_address) ||
                    registry.is_miner(*in.resolved_address)) {
                    tagged_input = true;
                    break;
                }
            if (tagged_input) continue;
            if (!nearest_within(dep, amounts, options.deposit_tol)) continue;
            candidates.push_back({&tx, cluster_id});
        }
    }

    // window total of a cluster's deposits around one deposit
    auto window_total = [&](std::uint32_t cluster_id, const Transaction& at) {
        Amount total;
        for (const Transaction* tx : cluster_deposits[cluster_id]) {
            if (options.sliding_window) {
                constexpr std::int64_t kHalfWindow = 15ll * 86400;
                if (tx->block_time < at.block_time - kHalfWindow ||
                    tx->block_time > at.block_time + kHalfWindow)
                    continue;
            } else if (!(bucket_of(tx->block_time, options) ==
                         bucket_of(at.block_time, options))) {
                continue;
            }
            total = checked_add(total, pool_deposit(*tx));
        }
        return total;
    };

    // evaluate the three conditions per candidate deposit
    std::map<std::pair<std::uint32_t, MonthBucket>, TsbCandidate> flagged;
    for (const auto& ref : candidates) {
        const Transaction& tx = *ref.tx;
        bool ok = true;
        std::uint64_t max_activity = 0;
        std::set<Address> input_addrs;
        for (const auto& in : tx.vin) input_addrs.insert(*in.resolved_address);
        for (const auto& a : input_addrs) {
            if (received_deshielded_before(store, a, tx.block_height)) {
                ok = false;
                break;
            }
            const std::uint64_t activity = activity_count(store, a);
            if (activity > options.activity_limit) {
                ok = false;
                break;
            }
            max_activity = std::max(max_activity, activity);
        }
        if (!ok) continue;
        const Amount total = window_total(ref.cluster_id, tx);
        const auto matched = nearest_within(total, amounts, options.cluster_tol);
        if (!matched) continue;
        const MonthBucket bucket = bucket_of(tx.block_time, options);
        auto& cand = flagged[{ref.cluster_id, bucket}];
        if (cand.deposit_txids.empty()) {
            cand.cluster_id = ref.cluster_id;
            cand.month = bucket_label(bucket, options);
            cand.matched_amount = *matched;
            cand.prior_pool_receipt = false;
        }
        cand.deposit_txids.push_back(tx.txid);
        cand.max_activity = std::max(cand.max_activity, max_activity);
    }

    TsbScanResult result;
    for (auto& [key, cand] : flagged) {
        result.monthly_counts[cand.month][cand.matched_amount.zat] += 1;
        result.candidates.push_back(std::move(cand));
    }

    // chronological month labels spanning the chain, for the output table
    if (!store.empty()) {
        std::set<MonthBucket> buckets;
        for (const auto& block : store.blocks()) buckets.insert(bucket_of(block.time, options));
        if (options.split_time) {
            // show both halves of the split month even if one is empty
            const std::int64_t split_month = utc_month_index(*options.split_time);
            if (buckets.count({split_month, 0}) || buckets.count({split_month, 1})) {
                buckets.insert({split_month, 0});
                buckets.insert({split_month, 1});
            }
        }
        for (const auto& b : buckets) result.month_order.push_back(bucket_label(b, options));
    }
    return result;
}

CandidateDetail candidate_detail(const TsbCandidate& candidate, const ChainStore& store,
                                 const ClusterSet& clusters, const TagRegistry& registry,
                                 const PriceSchedule& schedule, const TsbOptions& options) {
    CandidateDetail detail;
    detail.cluster_id = candidate.cluster_id;
    const auto& members = clusters.members_of(candidate.cluster_id);
    std::set<Address> member_set(members.begin(), members.end());

    // label for a funding cluster, by tag precedence
    auto cluster_label = [&](std::uint32_t id) -> std::string {
        std::map<TagCategory, std::string> found;
        for (const auto& addr : clusters.members_of(id)) {
            const auto* tags = registry.tags_of(addr);
            if (!tags) continue;
            for (const auto& t : *tags)
                if (!found.count(t.category)) found[t.category] = t.name;
        }
        for (auto c : {TagCategory::Exchange, TagCategory::Service, TagCategory::Pool}) {
            auto it = found.find(c);
            if (it != found.end())
                return std::string(to_string(c)) + (it->second.empty() ? "" : ":" + it->second);
        }
        if (found.count(TagCategory::Founder)) return "founder";
        if (found.count(TagCategory::Miner)) return "miner";
        return "untagged";
    };

    // inbound transparent funding, grouped by source cluster
    std::map<std::uint32_t, Amount> by_source;
    Amount from_coingen;
    for (const auto& addr : members) {
        const AddressUse* use = store.address_use(addr);
        if (!use) continue;
        for (const Transaction* tx : use->as_output) {
            if (!pool_withdrawal(*tx).is_zero()) continue; // pool exits are not funding
            Amount paid;
            for (const auto& out : tx->vout)
                if (member_set.count(out.address)) paid = checked_add(paid, out.value);
            if (tx->is_coinbase) {
                from_coingen = checked_add(from_coingen, paid);
                continue;
            }
            if (tx->vin.empty() || !tx->vin.front().resolved()) continue;
            const Address& src = *tx->vin.front().resolved_address;
            if (member_set.count(src)) continue; // internal move
            by_source[clusters.cluster_of(src)] =
                checked_add(by_source[clusters.cluster_of(src)], paid);
        }
    }
    for (const auto& [id, total] : by_source)
        detail.funding.push_back({id, cluster_label(id), total});
    if (!from_coingen.is_zero())
        detail.funding.push_back({UINT32_MAX, "coingen", from_coingen});
    std::sort(detail.funding.begin(), detail.funding.end(),
              [](const FundingSource& a, const FundingSource& b) {
                  if (a.total.zat != b.total.zat) return a.total.zat > b.total.zat;
                  return a.cluster_id < b.cluster_id;
              });

    // monthly pool deposits of the cluster
    const auto amounts = schedule.distinct_amounts();
    std::map<MonthBucket, Amount> monthly;
    for (const auto& addr : members) {
        const AddressUse* use = store.address_use(addr);
        if (!use) continue;
        for (const Transaction* tx : use->as_input) {
            const Amount dep = pool_deposit(*tx);
            if (dep.is_zero()) continue;
            // count each depositing tx once, via its first input address
            if (*tx->vin.front().resolved_address != addr) continue;
            auto& slot = monthly[bucket_of(tx->block_time, options)];
            slot = checked_add(slot, dep);
        }
    }
    std::uint32_t matched_months = 0;
    for (const auto& [bucket, total] : monthly) {
        const bool match = nearest_within(total, amounts, options.cluster_tol).has_value();
        if (match) ++matched_months;
        detail.monthly_deposits.push_back({bucket_label(bucket, options), total, match});
    }
    detail.repeat_pattern = matched_months >= 2;
    return detail;
}

} // namespace zana
