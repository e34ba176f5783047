#include "zana/tags.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "zana/csv.hpp"
#include "zana/errors.hpp"

namespace zana {

const char* to_string(TagCategory c) {
    switch (c) {
        case TagCategory::Founder: return "founder";
        case TagCategory::Pool: return "pool";
        case TagCategory::Miner: return "miner";
        case TagCategory::Exchange: return "exchange";
        case TagCategory::Service: return "service";
        case TagCategory::User: return "user";
    }
    return "?";
}

const char* to_string(TagSource s) {
    switch (s) {
        case TagSource::Params: return "params";
        case TagSource::Csv: return "csv";
        case TagSource::Heuristic3: return "heuristic3";
        case TagSource::Heuristic4: return "heuristic4";
        case TagSource::Coingen: return "coingen";
    }
    return "?";
}

std::optional<TagCategory> tag_category_from_string(const std::string& s) {
    for (auto c : {TagCategory::Founder, TagCategory::Pool, TagCategory::Miner,
                   TagCategory::Exchange, TagCategory::Service, TagCategory::User})
        if (s == to_string(c)) return c;
    return std::nullopt;
}

namespace {

bool categories_conflict(TagCategory a, TagCategory b) {
    auto founder_vs_miner = [](TagCategory x, TagCategory y) {
        return x == TagCategory::Founder && (y == TagCategory::Miner || y == TagCategory::Pool);
    };
    return founder_vs_miner(a, b) || founder_vs_miner(b, a);
}

} // namespace

bool TagRegistry::try_insert(Address address, TagCategory category, std::string name,
                             TagSource source, std::string* reason) {
    if (address.empty()) {
        if (reason) *reason = "empty address";
        return false;
    }
    auto& tags = by_address_[address];
    for (const auto& existing : tags) {
        if (categories_conflict(existing.category, category)) {
            if (reason)
                *reason = std::string(to_string(category)) + " conflicts with existing " +
                          to_string(existing.category) + " tag";
            return false;
        }
        if (existing.category == category && existing.source == source &&
            existing.name == name)
            return true; // duplicate insert, no-op
    }
    tags.push_back(Tag{std::move(address), category, std::move(name), source, next_seq_++});
    ++category_counts_[category];
    return true;
}

bool TagRegistry::has(const Address& a, TagCategory c) const {
    auto it = by_address_.find(a);
    if (it == by_address_.end()) return false;
    for (const auto& t : it->second)
        if (t.category == c) return true;
    return false;
}

std::string TagRegistry::name_of(const Address& a, TagCategory c) const {
    auto it = by_address_.find(a);
    if (it == by_address_.end()) return {};
    for (const auto& t : it->second)
        if (t.category == c) return t.name;
    return {};
}

const std::vector<Tag>* TagRegistry::tags_of(const Address& a) const {
    auto it = by_address_.find(a);
    return it == by_address_.end() ? nullptr : &it->second;
}

std::vector<Address> TagRegistry::addresses_in(TagCategory c) const {
    std::vector<Address> out;
    for (const auto& [addr, tags] : by_address_)
        for (const auto& t : tags)
            if (t.category == c) {
                out.push_back(addr);
                break;
            }
    std::sort(out.begin(), out.end());
    return out;
}

std::uint64_t TagRegistry::count_in(TagCategory c) const {
    auto it = category_counts_.find(c);
    return it == category_counts_.end() ? 0 : it->second;
}

std::size_t load_founder_params(TagRegistry& registry, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open founder params " + path.string());
    std::set<Address> distinct;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.find_first_of(" \t,") != std::string::npos)
            throw ParseError("malformed address '" + line + "'", line_no);
        std::string reason;
        if (!registry.try_insert(line, TagCategory::Founder, {}, TagSource::Params, &reason))
            throw ParseError("cannot tag founder: " + reason, line_no);
        distinct.insert(line);
    }
    return distinct.size();
}

CsvImportReport import_tags_csv(TagRegistry& registry, const std::filesystem::path& path) {
    auto rows = read_csv(path);
    CsvImportReport report;
    if (rows.empty()) return report;
    std::size_t first = 0;
    if (!rows[0].empty() && rows[0][0] == "address") first = 1; // header
    for (std::size_t i = first; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const std::size_t line_no = i + 1;
        if (row.size() < 2) {
            report.rejected_rows.emplace_back(line_no, "expected address,category[,name[,source]]");
            continue;
        }
        auto category = tag_category_from_string(row[1]);
        if (!category) {
            report.rejected_rows.emplace_back(line_no, "unknown category '" + row[1] + "'");
            continue;
        }
        std::string name = row.size() > 2 ? row[2] : "";
        std::string reason;
        if (registry.try_insert(row[0], *category, std::move(name), TagSource::Csv, &reason))
            ++report.accepted;
        else
            report.rejected_rows.emplace_back(line_no, reason);
    }
    return report;
}

std::size_t derive_miner_tags(const ChainStore& store, TagRegistry& registry) {
    std::size_t tagged = 0;
    for (const auto& block : store.blocks()) {
        for (const auto& tx : block.txs) {
            if (!tx.is_coinbase) continue;
            for (const auto& out : tx.vout) {
                if (registry.is_founder(out.address)) continue;
                if (registry.has(out.address, TagCategory::Miner)) continue;
                std::string reason;
                if (registry.try_insert(out.address, TagCategory::Miner, {}, TagSource::Coingen,
                                        &reason))
                    ++tagged;
            }
        }
    }
    return tagged;
}

std::map<std::uint32_t, std::map<TagCategory, std::uint64_t>> cluster_tags(
    const TagRegistry& registry, const ClusterSet& clusters) {
    std::map<std::uint32_t, std::map<TagCategory, std::uint64_t>> histograms;
    for (std::uint32_t id = 0; id < clusters.cluster_count(); ++id) {
        for (const auto& addr : clusters.members_of(id)) {
            const auto* tags = registry.tags_of(addr);
            if (!tags) continue;
            std::set<TagCategory> cats;
            for (const auto& t : *tags) cats.insert(t.category);
            for (auto c : cats) ++histograms[id][c];
        }
    }
    return histograms;
}

} // namespace zana
