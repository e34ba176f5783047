#include <doctest.h>

#include "chain_builder.hpp"
#include "zana/chain.hpp"
#include "zana/errors.hpp"

using namespace zana;
using zana::test::Builder;
using zana::test::zats;

namespace {

Transaction make_tx(bool coinbase, int vins, int vouts, int joinsplits) {
    Transaction tx;
    tx.txid = "t";
    tx.is_coinbase = coinbase;
    for (int i = 0; i < vins; ++i) tx.vin.push_back(TxIn{"p", 0, {}, {}});
    for (int i = 0; i < vouts; ++i)
        tx.vout.push_back(TxOut{"a", Amount{1}, static_cast<std::uint32_t>(i)});
    for (int i = 0; i < joinsplits; ++i) {
        JoinSplit js;
        js.nullifiers = {"n" + std::to_string(i) + "a", "n" + std::to_string(i) + "b"};
        js.commitments = {"c", "c"};
        tx.joinsplits.push_back(js);
    }
    return tx;
}

} // namespace

TEST_CASE("classification covers the six kinds") {
    CHECK(classify_tx(make_tx(true, 0, 2, 0)) == TxKind::Coingen);
    CHECK(classify_tx(make_tx(false, 1, 1, 0)) == TxKind::Transparent);
    CHECK(classify_tx(make_tx(false, 1, 0, 1)) == TxKind::Shielded);
    CHECK(classify_tx(make_tx(false, 0, 1, 1)) == TxKind::Deshielded);
    CHECK(classify_tx(make_tx(false, 0, 0, 1)) == TxKind::Private);
    CHECK(classify_tx(make_tx(false, 1, 1, 1)) == TxKind::Mixed);
}

TEST_CASE("classification is total and disjoint over shapes") {
    for (int coinbase = 0; coinbase <= 1; ++coinbase)
        for (int vins = 0; vins <= 2; ++vins)
            for (int vouts = 0; vouts <= 2; ++vouts)
                for (int js = 0; js <= 2; ++js) {
                    if (coinbase && (vins || js)) continue; // invalid shape
                    auto tx = make_tx(coinbase, vins, vouts, js);
                    int matches = 0;
                    const TxKind kind = classify_tx(tx);
                    for (std::size_t k = 0; k < kTxKindCount; ++k)
                        if (static_cast<TxKind>(k) == kind) ++matches;
                    CHECK(matches == 1);
                }
}

TEST_CASE("pool flows sum vpub fields") {
    auto tx = make_tx(false, 1, 0, 2);
    tx.joinsplits[0].vpub_old = Amount{zats(100)};
    tx.joinsplits[1].vpub_old = Amount{zats(50)};
    CHECK(pool_deposit(tx) == Amount{zats(150)});
    CHECK(pool_withdrawal(tx) == Amount{});

    auto wd = make_tx(false, 0, 1, 2);
    wd.joinsplits[0].vpub_new = Amount{zats(7)};
    wd.joinsplits[1].vpub_new = Amount{zats(3)};
    CHECK(pool_withdrawal(wd) == Amount{zats(10)});

    // the founder quanta in base units
    CHECK(Amount::from_zec_string("249.9999") == Amount{24'999'990'000ull});
    CHECK(Amount::from_zec_string("250.0001") == Amount{25'000'010'000ull});

    auto transparent = make_tx(false, 1, 1, 0);
    CHECK(pool_deposit(transparent) == Amount{});
    CHECK(pool_withdrawal(transparent) == Amount{});
}

TEST_CASE("conservation_check computes fees and flags violations") {
    Builder b;
    b.add_block("t1m");
    b.add_tx({{"cg0", 0}}, {{"t1x", zats(9)}});                  // fee 1
    b.add_tx({{"tx1", 0}}, {}, {{zats(9), 0}});                  // deposit-all, fee 0
    auto store = b.store();

    CHECK(conservation_check(store.tx_by_id("tx1")) == Amount{zats(1)});
    CHECK(conservation_check(store.tx_by_id("tx2")) == Amount{});
    CHECK(conservation_check(store.tx_by_id("cg0")) == Amount{});

    // violation: outputs exceed inputs
    Builder v;
    v.add_block("t1m", 5);
    auto& bad = v.add_tx({{"cg0", 0}}, {{"t1y", 10}});
    auto vstore = v.store();
    CHECK_FALSE(conservation_check(vstore.tx_by_id(bad.txid)).has_value());

    // unresolved inputs are a precondition error
    Transaction unresolved = make_tx(false, 1, 1, 0);
    CHECK_THROWS_AS(conservation_check(unresolved), PreconditionError);
}

TEST_CASE("amount parsing and formatting round-trip exactly") {
    CHECK(Amount::from_zec_string("0.00000001").zat == 1);
    CHECK(Amount::from_zec_string("1").zat == 100'000'000ull);
    CHECK(Amount::from_zec_string("118257.75").zat == 11'825'775'000'000ull);
    CHECK(Amount{25'000'010'000ull}.to_zec_string() == "250.00010000");
    CHECK(Amount{25'000'010'000ull}.to_zec_string_trimmed() == "250.0001");
    CHECK_THROWS_AS(Amount::from_zec_string("1.000000001"), ParseError);
    CHECK_THROWS_AS(Amount::from_zec_string("-1"), ParseError);
    CHECK_THROWS_AS(Amount::from_zec_string(""), ParseError);
    CHECK_THROWS_AS(Amount::from_zec_string("1."), ParseError);

    // parse(format(x)) == x over a spread of values
    for (std::uint64_t zat : {0ull, 1ull, 99'999'999ull, 100'000'000ull, 24'999'990'000ull,
                              310'000'000'000'000ull}) {
        CHECK(Amount::from_zec_string(Amount{zat}.to_zec_string()).zat == zat);
        CHECK(Amount::from_zec_string(Amount{zat}.to_zec_string_trimmed()).zat == zat);
    }
}

TEST_CASE("decimal places of the ZEC representation") {
    CHECK(Amount::from_zec_string("250.0001").decimal_places() == 4);
    CHECK(Amount::from_zec_string("1.00000000").decimal_places() == 0);
    CHECK(Amount::from_zec_string("0.12345678").decimal_places() == 8);
    CHECK(Amount::from_zec_string("10").decimal_places() == 0);
}

TEST_CASE("structural validation rejects malformed transactions") {
    auto tx = make_tx(false, 1, 2, 1);
    tx.vout[1].index = 5;
    CHECK_THROWS_AS(validate_transaction(tx), IntegrityError);

    auto both = make_tx(false, 1, 0, 1);
    both.joinsplits[0].vpub_old = Amount{1};
    both.joinsplits[0].vpub_new = Amount{1};
    CHECK_THROWS_AS(validate_transaction(both), IntegrityError);

    auto cb = make_tx(true, 1, 1, 0);
    CHECK_THROWS_AS(validate_transaction(cb), IntegrityError);
}
