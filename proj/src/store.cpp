#include "zana/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>

#include "zana/dumpio.hpp"
#include "zana/errors.hpp"
#include "zana/sha256.hpp"

namespace zana {

ChainStore ChainStore::open(const std::filesystem::path& dir) {
    ChainStore store;
    store.dir_ = dir;
    std::filesystem::create_directories(dir);
    const auto chain_path = dir / "chain.jsonl";
    if (std::filesystem::exists(chain_path)) {
        std::ifstream in(chain_path, std::ios::binary);
        if (!in) throw Error("cannot read " + chain_path.string());
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::exception& e) {
                throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
            }
            Block b = block_from_dump_json(j, line_no);
            store.append_block(std::move(b));
        }
    }
    store.appender_ = std::make_unique<std::ofstream>(chain_path, std::ios::binary | std::ios::app);
    if (!*store.appender_) throw Error("cannot append to " + chain_path.string());
    return store;
}

bool ChainStore::append_block(Block b) {
    if (!blocks_.empty() && b.height <= tip_height()) {
        const Block& stored = block_at(b.height);
        if (stored.hash == b.hash) return false; // idempotent re-ingest
        throw IntegrityError("conflicting block at height " + std::to_string(b.height) +
                             ": stored " + stored.hash + ", got " + b.hash);
    }
    const std::uint64_t expected = blocks_.empty() ? 0 : tip_height() + 1;
    if (b.height != expected)
        throw IntegrityError("non-contiguous block height " + std::to_string(b.height) +
                             " (expected " + std::to_string(expected) + ")");
    validate_block(b);
    // reject duplicate txids and nullifiers before mutating any index
    for (const auto& tx : b.txs) {
        if (tx_index_.count(tx.txid))
            throw IntegrityError("duplicate txid " + tx.txid);
        for (const auto& js : tx.joinsplits)
            for (const auto& n : js.nullifiers)
                if (nullifiers_.count(n))
                    throw IntegrityError("duplicate nullifier in tx " + tx.txid);
    }
    blocks_.push_back(std::move(b));
    index_block(blocks_.back());
    if (appender_) {
        *appender_ << block_to_dump_line(blocks_.back()) << '\n';
        appender_->flush();
        if (!*appender_) throw Error("write to store failed");
    }
    resolved_ = false;
    return true;
}

void ChainStore::index_block(Block& b) {
    for (auto& tx : b.txs) {
        tx_index_.emplace(tx.txid, &tx);
        ++tx_count_;
        std::unordered_set<std::string> seen; // one index entry per tx per address
        for (const auto& out : tx.vout) {
            if (!seen.insert(out.address).second) continue;
            auto& use = addr_index_[out.address];
            use.as_output.push_back(&tx);
            use.first_height = std::min(use.first_height, tx.block_height);
        }
        for (const auto& js : tx.joinsplits)
            for (const auto& n : js.nullifiers) nullifiers_.insert(n);
        Amount dep = pool_deposit(tx);
        Amount wd = pool_withdrawal(tx);
        if (!dep.is_zero()) deposit_index_[dep.zat].push_back(&tx);
        if (!wd.is_zero()) withdrawal_index_[wd.zat].push_back(&tx);
    }
}

std::uint64_t ChainStore::tip_height() const {
    if (blocks_.empty()) throw PreconditionError("empty store has no tip");
    return blocks_.back().height;
}

const Block& ChainStore::block_at(std::uint64_t height) const {
    if (height >= blocks_.size())
        throw NotFoundError("no block at height " + std::to_string(height));
    return blocks_[height];
}

const Transaction* ChainStore::find_tx(const std::string& txid) const {
    auto it = tx_index_.find(txid);
    return it == tx_index_.end() ? nullptr : it->second;
}

const Transaction& ChainStore::tx_by_id(const std::string& txid) const {
    const Transaction* tx = find_tx(txid);
    if (!tx) throw NotFoundError("unknown txid " + txid);
    return *tx;
}

const AddressUse* ChainStore::address_use(const Address& a) const {
    auto it = addr_index_.find(a);
    return it == addr_index_.end() ? nullptr : &it->second;
}

const Transaction* ChainStore::spender_of(const std::string& txid, std::uint32_t index) const {
    auto it = spent_index_.find(txid + ":" + std::to_string(index));
    return it == spent_index_.end() ? nullptr : it->second;
}

ChainStore::ResolveStats ChainStore::resolve_inputs() {
    if (resolved_) return resolve_stats_;
    ResolveStats stats;
    for (auto& block : blocks_) {
        for (auto& tx : block.txs) {
            std::unordered_set<std::string> seen;
            for (auto& in : tx.vin) {
                if (in.resolved()) { // from an earlier pass over a shorter chain
                    ++stats.inputs_resolved;
                    continue;
                }
                const Transaction* prev = find_tx(in.prev_txid);
                if (!prev) {
                    ++stats.inputs_unresolvable;
                    continue;
                }
                if (in.prev_index >= prev->vout.size())
                    throw IntegrityError("tx " + tx.txid + " spends missing output " +
                                         in.prev_txid + ":" + std::to_string(in.prev_index));
                const std::string key = in.prev_txid + ":" + std::to_string(in.prev_index);
                auto [it, inserted] = spent_index_.emplace(key, &tx);
                if (!inserted)
                    throw IntegrityError("double spend of " + key + " by " + tx.txid + " and " +
                                         it->second->txid);
                const TxOut& funding = prev->vout[in.prev_index];
                in.resolved_address = funding.address;
                in.resolved_value = funding.value;
                ++stats.inputs_resolved;
                auto& use = addr_index_[funding.address];
                if (seen.insert(funding.address).second) use.as_input.push_back(&tx);
                use.first_height = std::min(use.first_height, tx.block_height);
            }
        }
    }
    resolved_ = true;
    resolve_stats_ = stats;
    return stats;
}

namespace {

void digest_tx(Sha256& h, const Transaction& tx) {
    std::string line = "T|" + tx.txid + "|" + std::to_string(tx.block_height) + "|" +
                       (tx.is_coinbase ? "1" : "0");
    for (const auto& in : tx.vin)
        line += "|i:" + in.prev_txid + ":" + std::to_string(in.prev_index);
    for (const auto& out : tx.vout)
        line += "|o:" + out.address + ":" + std::to_string(out.value.zat);
    for (const auto& js : tx.joinsplits)
        line += "|j:" + std::to_string(js.vpub_old.zat) + ":" + std::to_string(js.vpub_new.zat) +
                ":" + js.nullifiers[0] + ":" + js.nullifiers[1] + ":" + js.commitments[0] + ":" +
                js.commitments[1];
    line += "\n";
    h.update(line);
}

std::string digest_blocks(const std::vector<const Block*>& blocks) {
    Sha256 h;
    std::vector<const Transaction*> txs;
    for (const Block* b : blocks) {
        h.update("B|" + std::to_string(b->height) + "|" + b->hash + "|" +
                 std::to_string(b->time) + "\n");
        for (const auto& tx : b->txs) txs.push_back(&tx);
    }
    std::sort(txs.begin(), txs.end(),
              [](const Transaction* a, const Transaction* b) { return a->txid < b->txid; });
    for (const Transaction* tx : txs) digest_tx(h, *tx);
    auto digest = h.finish();
    static const char* hexd = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (std::uint8_t byte : digest) {
        out.push_back(hexd[byte >> 4]);
        out.push_back(hexd[byte & 0xf]);
    }
    return out;
}

} // namespace

std::string ChainStore::digest() const {
    std::vector<const Block*> ptrs;
    ptrs.reserve(blocks_.size());
    for (const auto& b : blocks_) ptrs.push_back(&b);
    return digest_blocks(ptrs);
}

std::string chain_digest(const std::vector<const Block*>& blocks_in_height_order) {
    return digest_blocks(blocks_in_height_order);
}

StoreLock::StoreLock(const std::filesystem::path& store_dir) {
    std::filesystem::create_directories(store_dir);
    lock_path_ = store_dir / "write.lock";
    int fd = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0)
        throw Error("store is locked by another writer (remove " + lock_path_.string() +
                    " if stale)");
    ::close(fd);
}

StoreLock::~StoreLock() {
    std::error_code ec;
    std::filesystem::remove(lock_path_, ec);
}

} // namespace zana
