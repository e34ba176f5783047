#include "zana/chain.hpp"

#include "zana/errors.hpp"

namespace zana {

const char* to_string(TxKind k) {
    switch (k) {
        case TxKind::Coingen: return "coingen";
        case TxKind::Transparent: return "transparent";
        case TxKind::Shielded: return "shielded";
        case TxKind::Deshielded: return "deshielded";
        case TxKind::Private: return "private";
        case TxKind::Mixed: return "mixed";
    }
    return "?";
}

std::optional<TxKind> tx_kind_from_string(const std::string& s) {
    for (std::size_t i = 0; i < kTxKindCount; ++i) {
        auto k = static_cast<TxKind>(i);
        if (s == to_string(k)) return k;
    }
    return std::nullopt;
}

TxKind classify_tx(const Transaction& tx) {
    if (tx.is_coinbase) return TxKind::Coingen;
    if (tx.joinsplits.empty()) return TxKind::Transparent;
    const bool has_vin = !tx.vin.empty();
    const bool has_vout = !tx.vout.empty();
    if (has_vin && !has_vout) return TxKind::Shielded;
    if (!has_vin && has_vout) return TxKind::Deshielded;
    if (!has_vin && !has_vout) return TxKind::Private;
    return TxKind::Mixed;
}

Amount pool_deposit(const Transaction& tx) {
    Amount sum;
    for (const auto& js : tx.joinsplits) sum = checked_add(sum, js.vpub_old);
    return sum;
}

Amount pool_withdrawal(const Transaction& tx) {
    Amount sum;
    for (const auto& js : tx.joinsplits) sum = checked_add(sum, js.vpub_new);
    return sum;
}

std::optional<Amount> conservation_check(const Transaction& tx) {
    // Coin generation mints value; conservation governs transfers only, so a
    // coingen carries no fee by definition.
    if (tx.is_coinbase) return Amount{};
    Amount in;
    for (const auto& txin : tx.vin) {
        if (!txin.resolved())
            throw PreconditionError("conservation_check: unresolved input in " + tx.txid);
        in = checked_add(in, *txin.resolved_value);
    }
    in = checked_add(in, pool_withdrawal(tx));
    Amount out = pool_deposit(tx);
    for (const auto& txout : tx.vout) out = checked_add(out, txout.value);
    if (out > in) return std::nullopt;
    return Amount{in.zat - out.zat};
}

void validate_transaction(const Transaction& tx) {
    if (tx.txid.empty()) throw IntegrityError("transaction with empty txid");
    if (tx.is_coinbase && (!tx.vin.empty() || !tx.joinsplits.empty()))
        throw IntegrityError("coingen with inputs or joinsplits: " + tx.txid);
    for (std::size_t i = 0; i < tx.vout.size(); ++i) {
        if (tx.vout[i].index != i)
            throw IntegrityError("non-dense output indices in " + tx.txid);
        if (tx.vout[i].address.empty())
            throw IntegrityError("output without address in " + tx.txid);
    }
    for (const auto& txin : tx.vin) {
        if (txin.prev_txid.empty())
            throw IntegrityError("input without prev_txid in " + tx.txid);
        if (txin.resolved_address.has_value() != txin.resolved_value.has_value())
            throw IntegrityError("half-resolved input in " + tx.txid);
    }
    for (const auto& js : tx.joinsplits) {
        if (!js.vpub_old.is_zero() && !js.vpub_new.is_zero())
            throw IntegrityError("joinsplit with both vpub_old and vpub_new nonzero in " + tx.txid);
        for (const auto& n : js.nullifiers)
            if (n.empty()) throw IntegrityError("empty nullifier in " + tx.txid);
        for (const auto& c : js.commitments)
            if (c.empty()) throw IntegrityError("empty commitment in " + tx.txid);
    }
}

void validate_block(const Block& b) {
    if (b.hash.empty()) throw IntegrityError("block without hash at height " + std::to_string(b.height));
    if (b.txs.empty() || !b.txs.front().is_coinbase)
        throw IntegrityError("first tx of block " + std::to_string(b.height) + " is not a coingen");
    for (std::size_t i = 1; i < b.txs.size(); ++i)
        if (b.txs[i].is_coinbase)
            throw IntegrityError("coingen past position 0 in block " + std::to_string(b.height));
    for (const auto& tx : b.txs) {
        validate_transaction(tx);
        if (tx.block_height != b.height)
            throw IntegrityError("tx " + tx.txid + " carries wrong block height");
    }
}

} // namespace zana
