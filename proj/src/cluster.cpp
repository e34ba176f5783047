#include "zana/cluster.hpp"

#include <algorithm>

#include "zana/errors.hpp"

namespace zana {

std::uint32_t DisjointSet::find(std::uint32_t x) {
    std::uint32_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
        std::uint32_t next = parent_[x];
        parent_[x] = root;
        x = next;
    }
    return root;
}

void DisjointSet::unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
}

std::uint32_t ClusterSet::cluster_of(const Address& a) const {
    auto it = cluster_by_address.find(a);
    if (it == cluster_by_address.end()) throw NotFoundError("address not observed: " + a);
    return it->second;
}

std::vector<ChangeLink> find_change_links(const ChainStore& store,
                                          const std::set<Address>& exclusions) {
    std::vector<ChangeLink> links;
    for (const auto& block : store.blocks()) {
        for (const auto& tx : block.txs) {
            if (tx.joinsplits.empty() || tx.vin.empty() || tx.vout.size() != 1) continue;
            const Address& out = tx.vout.front().address;
            if (exclusions.count(out)) continue;
            if (!tx.vin.front().resolved())
                throw PreconditionError("find_change_links requires a resolved store");
            links.push_back({tx.txid, *tx.vin.front().resolved_address, out});
        }
    }
    return links;
}

ClusterSet build_clusters(const ChainStore& store, bool use_change,
                          const std::set<Address>& exclusions) {
    // Dense ids in first-appearance order: chain order is deterministic, so
    // the numbering (and every tie-break below) is too.
    std::vector<Address> addresses;
    std::unordered_map<Address, std::uint32_t> id_of;
    std::vector<std::uint64_t> first_height;
    auto intern = [&](const Address& a, std::uint64_t height) {
        auto [it, inserted] = id_of.emplace(a, static_cast<std::uint32_t>(addresses.size()));
        if (inserted) {
            addresses.push_back(a);
            first_height.push_back(height);
        }
        return it->second;
    };

    for (const auto& block : store.blocks()) {
        for (const auto& tx : block.txs) {
            for (const auto& in : tx.vin) {
                if (!in.resolved())
                    throw PreconditionError("build_clusters requires a resolved store (tx " +
                                            tx.txid + ")");
                intern(*in.resolved_address, tx.block_height);
            }
            for (const auto& out : tx.vout) intern(out.address, tx.block_height);
        }
    }

    DisjointSet dsu(static_cast<std::uint32_t>(addresses.size()));
    for (const auto& block : store.blocks()) {
        for (const auto& tx : block.txs) {
            if (tx.vin.size() < 2) continue;
            const std::uint32_t anchor = id_of.at(*tx.vin.front().resolved_address);
            for (std::size_t i = 1; i < tx.vin.size(); ++i)
                dsu.unite(anchor, id_of.at(*tx.vin[i].resolved_address));
        }
    }
    if (use_change) {
        for (const auto& link : find_change_links(store, exclusions))
            dsu.unite(id_of.at(link.input_address), id_of.at(link.output_address));
    }

    // Group members per root.
    std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> groups;
    for (std::uint32_t i = 0; i < dsu.element_count(); ++i) groups[dsu.find(i)].push_back(i);

    struct Keyed {
        std::uint64_t size;
        std::uint64_t first_height;
        const Address* smallest;
        std::vector<std::uint32_t>* ids;
    };
    std::vector<Keyed> keyed;
    keyed.reserve(groups.size());
    for (auto& [root, ids] : groups) {
        std::uint64_t fh = UINT64_MAX;
        const Address* smallest = nullptr;
        for (std::uint32_t id : ids) {
            fh = std::min(fh, first_height[id]);
            if (!smallest || addresses[id] < *smallest) smallest = &addresses[id];
        }
        keyed.push_back({ids.size(), fh, smallest, &ids});
    }
    std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
        if (a.size != b.size) return a.size > b.size;
        if (a.first_height != b.first_height) return a.first_height < b.first_height;
        return *a.smallest < *b.smallest;
    });

    ClusterSet cs;
    cs.members.reserve(keyed.size());
    for (std::uint32_t cluster_id = 0; cluster_id < keyed.size(); ++cluster_id) {
        auto& k = keyed[cluster_id];
        std::vector<Address> member_addrs;
        member_addrs.reserve(k.ids->size());
        for (std::uint32_t id : *k.ids) member_addrs.push_back(addresses[id]);
        std::sort(member_addrs.begin(), member_addrs.end());
        for (const auto& a : member_addrs) cs.cluster_by_address.emplace(a, cluster_id);
        if (member_addrs.size() > 1) ++cs.multi_address_clusters;
        cs.members.push_back(std::move(member_addrs));
    }
    return cs;
}

} // namespace zana
