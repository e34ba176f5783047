#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "zana/store.hpp"

namespace zana {

// Union-find with path compression and union by size.
class DisjointSet {
  public:
    explicit DisjointSet(std::uint32_t n) : parent_(n), size_(n, 1) {
        for (std::uint32_t i = 0; i < n; ++i) parent_[i] = i;
    }

    std::uint32_t find(std::uint32_t x);
    void unite(std::uint32_t a, std::uint32_t b);
    std::uint32_t size_of(std::uint32_t x) { return size_[find(x)]; }
    std::uint32_t element_count() const { return static_cast<std::uint32_t>(parent_.size()); }

  private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> size_;
};

// Partition of all observed transparent addresses. Cluster ids are assigned
// by descending member count; ties break on the cluster's earliest
// first-appearance height, then on its lexicographically smallest member, so
// the numbering is reproducible run to run.
struct ClusterSet {
    std::unordered_map<Address, std::uint32_t> cluster_by_address;
    std::vector<std::vector<Address>> members; // cluster id -> sorted members
    std::uint64_t multi_address_clusters = 0;

    std::size_t cluster_count() const { return members.size(); }
    std::uint32_t cluster_of(const Address& a) const; // throws NotFoundError
    const std::vector<Address>& members_of(std::uint32_t id) const { return members.at(id); }
};

// Co-spend linkage applied when a transaction crosses the shielded boundary
// with exactly one transparent output: the output is treated as change
// belonging to the input owner. Known service-fee addresses are excluded.
struct ChangeLink {
    std::string txid;
    Address input_address;  // representative input
    Address output_address; // the single transparent output
};

std::vector<ChangeLink> find_change_links(const ChainStore& store,
                                          const std::set<Address>& exclusions);

// Multi-input clustering: unions every transaction's distinct resolved input
// addresses (any transaction kind with inputs), plus change links when
// use_change is set. Requires a resolved store.
ClusterSet build_clusters(const ChainStore& store, bool use_change,
                          const std::set<Address>& exclusions);

} // namespace zana
