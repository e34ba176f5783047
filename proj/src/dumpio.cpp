#include "zana/dumpio.hpp"

#include <fstream>

#include "zana/errors.hpp"

namespace zana {

using nlohmann::json;

json block_to_json(const Block& b) {
    json jtxs = json::array();
    for (const auto& tx : b.txs) {
        json jvin = json::array();
        for (const auto& in : tx.vin)
            jvin.push_back({{"prev_txid", in.prev_txid}, {"prev_index", in.prev_index}});
        json jvout = json::array();
        for (const auto& out : tx.vout)
            jvout.push_back({{"address", out.address}, {"value_zat", out.value.zat}});
        json jjs = json::array();
        for (const auto& js : tx.joinsplits)
            jjs.push_back({{"vpub_old_zat", js.vpub_old.zat},
                           {"vpub_new_zat", js.vpub_new.zat},
                           {"nullifiers", {js.nullifiers[0], js.nullifiers[1]}},
                           {"commitments", {js.commitments[0], js.commitments[1]}}});
        jtxs.push_back({{"txid", tx.txid},
                        {"coinbase", tx.is_coinbase},
                        {"vin", std::move(jvin)},
                        {"vout", std::move(jvout)},
                        {"joinsplits", std::move(jjs)}});
    }
    return json{{"height", b.height}, {"hash", b.hash}, {"time", b.time}, {"txs", std::move(jtxs)}};
}

std::string block_to_dump_line(const Block& b) { return block_to_json(b).dump(); }

namespace {

std::uint64_t require_uint(const json& j, const char* key, std::size_t line_no) {
    if (!j.contains(key)) throw ParseError(std::string("missing key '") + key + "'", line_no);
    const auto& v = j.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
        auto s = v.get<std::int64_t>();
        if (s < 0)
            throw ParseError(std::string("key '") + key + "' is negative", line_no);
        return static_cast<std::uint64_t>(s);
    }
    throw ParseError(std::string("key '") + key + "' is not an integer", line_no);
}

std::string require_string(const json& j, const char* key, std::size_t line_no) {
    if (!j.contains(key) || !j.at(key).is_string())
        throw ParseError(std::string("missing string key '") + key + "'", line_no);
    return j.at(key).get<std::string>();
}

} // namespace

Block block_from_dump_json(const json& j, std::size_t line_no) {
    Block b;
    b.height = require_uint(j, "height", line_no);
    b.hash = require_string(j, "hash", line_no);
    if (!j.contains("time") || !j.at("time").is_number_integer())
        throw ParseError("missing integer key 'time'", line_no);
    b.time = j.at("time").get<std::int64_t>();
    if (!j.contains("txs") || !j.at("txs").is_array())
        throw ParseError("missing array key 'txs'", line_no);
    for (const auto& jt : j.at("txs")) {
        Transaction tx;
        tx.txid = require_string(jt, "txid", line_no);
        tx.block_height = b.height;
        tx.block_time = b.time;
        if (!jt.contains("coinbase") || !jt.at("coinbase").is_boolean())
            throw ParseError("missing boolean key 'coinbase' in tx " + tx.txid, line_no);
        tx.is_coinbase = jt.at("coinbase").get<bool>();
        if (jt.contains("vin")) {
            for (const auto& ji : jt.at("vin")) {
                TxIn in;
                in.prev_txid = require_string(ji, "prev_txid", line_no);
                in.prev_index = static_cast<std::uint32_t>(require_uint(ji, "prev_index", line_no));
                tx.vin.push_back(std::move(in));
            }
        }
        if (jt.contains("vout")) {
            std::uint32_t idx = 0;
            for (const auto& jo : jt.at("vout")) {
                TxOut out;
                out.address = require_string(jo, "address", line_no);
                out.value = Amount{require_uint(jo, "value_zat", line_no)};
                out.index = idx++;
                tx.vout.push_back(std::move(out));
            }
        }
        if (jt.contains("joinsplits")) {
            for (const auto& jj : jt.at("joinsplits")) {
                JoinSplit js;
                js.vpub_old = Amount{require_uint(jj, "vpub_old_zat", line_no)};
                js.vpub_new = Amount{require_uint(jj, "vpub_new_zat", line_no)};
                for (auto [key, arr] : {std::pair{"nullifiers", &js.nullifiers},
                                        std::pair{"commitments", &js.commitments}}) {
                    if (!jj.contains(key) || !jj.at(key).is_array() || jj.at(key).size() != 2)
                        throw ParseError(std::string("joinsplit key '") + key +
                                             "' must be an array of 2 in tx " + tx.txid,
                                         line_no);
                    (*arr)[0] = jj.at(key).at(0).get<std::string>();
                    (*arr)[1] = jj.at(key).at(1).get<std::string>();
                }
                tx.joinsplits.push_back(std::move(js));
            }
        }
        b.txs.push_back(std::move(tx));
    }
    try {
        validate_block(b);
    } catch (const IntegrityError& e) {
        throw ParseError(e.what(), line_no);
    }
    return b;
}

namespace {

// Integer-zat amount from a verbose-RPC value object. Float ZEC values are
// rejected: ledger arithmetic is exact or not at all.
Amount rpc_amount(const json& j, const char* zat_key_a, const char* zat_key_b) {
    for (const char* key : {zat_key_a, zat_key_b}) {
        if (j.contains(key)) {
            const auto& v = j.at(key);
            if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
                return Amount{v.get<std::uint64_t>()};
            if (v.is_string()) return Amount::from_zec_string(v.get<std::string>());
            throw ParseError(std::string("amount field '") + key + "' is not an integer");
        }
    }
    throw ParseError(std::string("no integer amount field ('") + zat_key_a + "' or '" +
                     zat_key_b + "'); float ZEC values are not accepted");
}

} // namespace

Block block_from_rpc_json(const json& j, RpcParseCounters& counters) {
    Block b;
    b.height = j.at("height").get<std::uint64_t>();
    b.hash = j.at("hash").get<std::string>();
    b.time = j.at("time").get<std::int64_t>();
    for (const auto& jt : j.at("tx")) {
        Transaction tx;
        tx.txid = jt.at("txid").get<std::string>();
        tx.block_height = b.height;
        tx.block_time = b.time;
        if (jt.contains("vin")) {
            for (const auto& ji : jt.at("vin")) {
                if (ji.contains("coinbase")) {
                    tx.is_coinbase = true;
                    continue;
                }
                TxIn in;
                in.prev_txid = ji.at("txid").get<std::string>();
                in.prev_index = ji.at("vout").get<std::uint32_t>();
                tx.vin.push_back(std::move(in));
            }
        }
        if (jt.contains("vout")) {
            std::uint32_t idx = 0;
            for (const auto& jo : jt.at("vout")) {
                std::string address;
                if (jo.contains("address") && jo.at("address").is_string()) {
                    address = jo.at("address").get<std::string>();
                } else if (jo.contains("scriptPubKey") && jo.at("scriptPubKey").contains("addresses") &&
                           jo.at("scriptPubKey").at("addresses").is_array() &&
                           !jo.at("scriptPubKey").at("addresses").empty()) {
                    address = jo.at("scriptPubKey").at("addresses").at(0).get<std::string>();
                }
                if (address.empty()) {
                    ++counters.outputs_unaddressed;
                    continue;
                }
                TxOut out;
                out.address = std::move(address);
                out.value = rpc_amount(jo, "valueZat", "value_zat");
                out.index = idx++;
                tx.vout.push_back(std::move(out));
            }
        }
        const char* js_key = jt.contains("vjoinsplit") ? "vjoinsplit"
                             : jt.contains("joinsplits") ? "joinsplits"
                                                         : nullptr;
        if (js_key) {
            for (const auto& jj : jt.at(js_key)) {
                JoinSplit js;
                js.vpub_old = rpc_amount(jj, "vpub_oldZat", "vpub_old_zat");
                js.vpub_new = rpc_amount(jj, "vpub_newZat", "vpub_new_zat");
                const auto& nf = jj.at("nullifiers");
                const auto& cm = jj.at("commitments");
                js.nullifiers = {nf.at(0).get<std::string>(), nf.at(1).get<std::string>()};
                js.commitments = {cm.at(0).get<std::string>(), cm.at(1).get<std::string>()};
                tx.joinsplits.push_back(std::move(js));
            }
        }
        b.txs.push_back(std::move(tx));
    }
    validate_block(b);
    return b;
}

void write_dump(const std::vector<Block>& blocks, std::ostream& os) {
    for (const auto& b : blocks) os << block_to_dump_line(b) << '\n';
}

void write_dump_file(const std::vector<Block>& blocks, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    write_dump(blocks, out);
}

} // namespace zana
