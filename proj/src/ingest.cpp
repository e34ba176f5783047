#include "zana/ingest.hpp"

#include <cstdlib>
#include <fstream>

#include <httplib.h>
#include <json.hpp>

#include "zana/dumpio.hpp"
#include "zana/errors.hpp"

namespace zana {

using nlohmann::json;

IngestReport import_dump(ChainStore& store, const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open dump " + path.string());
    IngestReport report;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
        }
        Block b = block_from_dump_json(j, line_no);
        const std::uint64_t txs = b.txs.size();
        try {
            if (store.append_block(std::move(b))) {
                ++report.blocks_ingested;
                report.txs_ingested += txs;
            }
        } catch (const IntegrityError& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    return report;
}

void RpcEndpoint::fill_auth_from_env() {
    if (user.empty())
        if (const char* u = std::getenv("ZANA_RPC_USER")) user = u;
    if (password.empty())
        if (const char* p = std::getenv("ZANA_RPC_PASS")) password = p;
}

namespace {

class RpcClient {
  public:
    explicit RpcClient(const RpcEndpoint& ep) : client_(ep.url) {
        if (!ep.user.empty()) client_.set_basic_auth(ep.user, ep.password);
        client_.set_read_timeout(30, 0);
        client_.set_connection_timeout(10, 0);
    }

    json call(const std::string& method, const json& params, std::uint64_t resume_height) {
        json body{{"jsonrpc", "1.0"}, {"id", "zana"}, {"method", method}, {"params", params}};
        auto res = client_.Post("/", body.dump(), "application/json");
        if (!res)
            throw RpcError("node unreachable calling " + method + " (" +
                               httplib::to_string(res.error()) + ")",
                           resume_height);
        if (res->status != 200)
            throw RpcError("node returned HTTP " + std::to_string(res->status) + " for " + method,
                           resume_height);
        json parsed;
        try {
            parsed = json::parse(res->body);
        } catch (const json::exception& e) {
            throw RpcError(std::string("bad RPC response: ") + e.what(), resume_height);
        }
        if (parsed.contains("error") && !parsed.at("error").is_null())
            throw RpcError("RPC error from " + method + ": " + parsed.at("error").dump(),
                           resume_height);
        return parsed.at("result");
    }

  private:
    httplib::Client client_;
};

} // namespace

IngestReport sync_from_node(ChainStore& store, const RpcEndpoint& endpoint,
                            std::uint64_t from_height, std::uint64_t to_height) {
    IngestReport report;
    if (from_height > to_height) return report;
    RpcClient rpc(endpoint);

    const auto count = rpc.call("getblockcount", json::array(), from_height);
    const std::uint64_t node_tip = count.get<std::uint64_t>();
    if (to_height == UINT64_MAX) to_height = node_tip; // "up to the tip"
    if (to_height > node_tip)
        throw RpcError("requested height " + std::to_string(to_height) + " beyond node tip " +
                           std::to_string(node_tip),
                       from_height);
    if (from_height > to_height) return report;

    RpcParseCounters counters;
    for (std::uint64_t h = from_height; h <= to_height; ++h) {
        const auto hash = rpc.call("getblockhash", json::array({h}), h).get<std::string>();
        const auto jblock = rpc.call("getblock", json::array({hash, 2}), h);
        Block b;
        try {
            b = block_from_rpc_json(jblock, counters);
        } catch (const json::exception& e) {
            throw RpcError("malformed block " + std::to_string(h) + ": " + e.what(), h);
        }
        if (b.height != h)
            throw RpcError("node returned height " + std::to_string(b.height) + " for " +
                               std::to_string(h),
                           h);
        if (jblock.contains("previousblockhash") && h > 0 && !store.empty() &&
            store.tip_height() >= h - 1) {
            const std::string parent = jblock.at("previousblockhash").get<std::string>();
            if (store.block_at(h - 1).hash != parent)
                throw ReorgError("parent hash mismatch at height " + std::to_string(h) +
                                 ": stored " + store.block_at(h - 1).hash + ", node says " +
                                 parent);
        }
        const std::uint64_t txs = b.txs.size();
        if (store.append_block(std::move(b))) {
            ++report.blocks_ingested;
            report.txs_ingested += txs;
        }
    }
    report.outputs_unaddressed = counters.outputs_unaddressed;
    return report;
}

IngestReport resolve_inputs(ChainStore& store) {
    auto stats = store.resolve_inputs();
    IngestReport report;
    report.blocks_ingested = store.block_count();
    report.txs_ingested = store.tx_count();
    report.inputs_resolved = stats.inputs_resolved;
    report.inputs_unresolvable = stats.inputs_unresolvable;
    return report;
}

} // namespace zana
