#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "zana/store.hpp"

namespace zana {

struct IngestReport {
    std::uint64_t blocks_ingested = 0;
    std::uint64_t txs_ingested = 0;
    std::uint64_t inputs_resolved = 0;
    std::uint64_t inputs_unresolvable = 0;
    std::uint64_t outputs_unaddressed = 0;
};

// Streaming import of a newline-delimited dump file. Malformed lines and
// duplicate txids raise errors naming the line; re-importing blocks already
// stored (same height and hash) is a no-op.
IngestReport import_dump(ChainStore& store, const std::filesystem::path& path);

struct RpcEndpoint {
    std::string url; // http://host:port
    std::string user;
    std::string password;

    // Credentials from ZANA_RPC_USER / ZANA_RPC_PASS unless already set.
    void fill_auth_from_env();
};

// Pulls [from_height, to_height] from a node speaking getblockcount /
// getblockhash / getblock(hash, verbosity=2). Blocks commit in order, one at
// a time, so a failed run resumes from the reported height. A parent-hash
// mismatch against the stored chain aborts with ReorgError.
IngestReport sync_from_node(ChainStore& store, const RpcEndpoint& endpoint,
                            std::uint64_t from_height, std::uint64_t to_height);

// Resolve pass over the whole store; see ChainStore::resolve_inputs.
IngestReport resolve_inputs(ChainStore& store);

} // namespace zana
