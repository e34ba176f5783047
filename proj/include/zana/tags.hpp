#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "zana/cluster.hpp"
#include "zana/store.hpp"

namespace zana {

enum class TagCategory : std::uint8_t { Founder, Pool, Miner, Exchange, Service, User };
enum class TagSource : std::uint8_t { Params, Csv, Heuristic3, Heuristic4, Coingen };

const char* to_string(TagCategory c);
const char* to_string(TagSource s);
std::optional<TagCategory> tag_category_from_string(const std::string& s);

struct Tag {
    Address address;
    TagCategory category = TagCategory::User;
    std::string name;   // pool/exchange/service name, empty otherwise
    TagSource source = TagSource::Csv;
    std::uint32_t seq = 0; // insertion sequence within this registry
};

// Address label registry. founder and miner are mutually exclusive; a pool
// tag is a refinement of miner (a pool address is also a miner address), so
// pool and miner coexist. Queries are a pure function of the accepted set,
// independent of insertion order.
class TagRegistry {
  public:
    // Returns false and fills `reason` on a category conflict. Duplicate
    // (address, category, source) inserts are accepted no-ops.
    bool try_insert(Address address, TagCategory category, std::string name, TagSource source,
                    std::string* reason = nullptr);

    bool has(const Address& a, TagCategory c) const;
    bool is_founder(const Address& a) const { return has(a, TagCategory::Founder); }
    // pool ⊆ miner
    bool is_miner(const Address& a) const {
        return has(a, TagCategory::Miner) || has(a, TagCategory::Pool);
    }
    bool is_pool(const Address& a) const { return has(a, TagCategory::Pool); }

    // Name of the pool(/exchange/service) tag on the address, empty if none.
    std::string name_of(const Address& a, TagCategory c) const;

    const std::vector<Tag>* tags_of(const Address& a) const;
    std::vector<Address> addresses_in(TagCategory c) const; // sorted
    std::uint64_t count_in(TagCategory c) const;
    std::size_t tagged_address_count() const { return by_address_.size(); }

  private:
    std::unordered_map<Address, std::vector<Tag>> by_address_;
    std::map<TagCategory, std::uint64_t> category_counts_;
    std::uint32_t next_seq_ = 0;
};

// One address per line; blank lines ignored. Every address is tagged
// founder/source=params; duplicates are deduplicated.
std::size_t load_founder_params(TagRegistry& registry, const std::filesystem::path& path);

struct CsvImportReport {
    std::size_t accepted = 0;
    std::vector<std::pair<std::size_t, std::string>> rejected_rows; // (line, reason)
};

// CSV columns: address,category,name,source (header row required). Rows that
// conflict with existing tags are reported, not fatal.
CsvImportReport import_tags_csv(TagRegistry& registry, const std::filesystem::path& path);

// Tags every coingen output address without a founder tag as
// miner/source=coingen. Returns the number of newly tagged addresses.
std::size_t derive_miner_tags(const ChainStore& store, TagRegistry& registry);

// Per-cluster histogram of member tag categories. Clusters without any
// tagged member are omitted.
std::map<std::uint32_t, std::map<TagCategory, std::uint64_t>> cluster_tags(
    const TagRegistry& registry, const ClusterSet& clusters);

} // namespace zana
