#pragma once

#include <string>
#include <utility>
#include <vector>

#include "zana/chain.hpp"
#include "zana/store.hpp"

namespace zana::test {

// Hand-built chains for unit tests: every block gets a coingen first, txids
// default to tx<N>, nullifiers are made unique automatically.
struct Builder {
    std::vector<Block> chain;
    int tx_seq = 0;
    int nf_seq = 0;
    std::int64_t genesis_time = 1500000000;
    std::int64_t spacing = 150;

    Block& add_block(const Address& miner = "t1miner",
                     std::uint64_t miner_zat = 1'000'000'000ull) {
        Block b;
        b.height = chain.size();
        b.hash = "blk" + std::to_string(b.height);
        b.time = genesis_time + static_cast<std::int64_t>(b.height) * spacing;
        Transaction cg;
        cg.txid = "cg" + std::to_string(b.height);
        cg.block_height = b.height;
        cg.block_time = b.time;
        cg.is_coinbase = true;
        cg.vout.push_back(TxOut{miner, Amount{miner_zat}, 0});
        b.txs.push_back(std::move(cg));
        chain.push_back(std::move(b));
        return chain.back();
    }

    Transaction& add_tx(std::vector<std::pair<std::string, std::uint32_t>> vin,
                        std::vector<std::pair<Address, std::uint64_t>> vout,
                        std::vector<std::pair<std::uint64_t, std::uint64_t>> joinsplits = {},
                        std::string txid = {}) {
        Block& b = chain.back();
        Transaction tx;
        tx.txid = txid.empty() ? "tx" + std::to_string(++tx_seq) : std::move(txid);
        tx.block_height = b.height;
        tx.block_time = b.time;
        for (auto& [prev, index] : vin) tx.vin.push_back(TxIn{prev, index, {}, {}});
        std::uint32_t out_index = 0;
        for (auto& [addr, zat] : vout) tx.vout.push_back(TxOut{addr, Amount{zat}, out_index++});
        for (auto& [vpub_old, vpub_new] : joinsplits) {
            JoinSplit js;
            js.vpub_old = Amount{vpub_old};
            js.vpub_new = Amount{vpub_new};
            js.nullifiers = {"nf" + std::to_string(++nf_seq), "nf" + std::to_string(++nf_seq)};
            js.commitments = {"cm" + std::to_string(nf_seq) + "a",
                              "cm" + std::to_string(nf_seq) + "b"};
            tx.joinsplits.push_back(std::move(js));
        }
        b.txs.push_back(std::move(tx));
        return b.txs.back();
    }

    ChainStore store(bool resolve = true) {
        ChainStore s;
        for (auto& b : chain) s.append_block(b);
        if (resolve) s.resolve_inputs();
        return s;
    }
};

inline constexpr std::uint64_t zec(double) = delete; // integers only in tests
inline constexpr std::uint64_t zats(std::uint64_t whole, std::uint64_t frac8 = 0) {
    return whole * 100'000'000ull + frac8;
}

} // namespace zana::test
