#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>

#include <json.hpp>

#include "zana/chain.hpp"

namespace zana {

// Newline-delimited dump format, one block object per line:
//   {"height":..,"hash":"..","time":..,"txs":[{"txid":"..","coinbase":bool,
//    "vin":[{"prev_txid":"..","prev_index":..}],
//    "vout":[{"address":"..","value_zat":..}],
//    "joinsplits":[{"vpub_old_zat":..,"vpub_new_zat":..,
//                   "nullifiers":[..,..],"commitments":[..,..]}]}]}
// Amounts are integers (zat); anything else is a parse error.

nlohmann::json block_to_json(const Block& b);
std::string block_to_dump_line(const Block& b);

// Strict parse of one dump line; line_no is used in error messages.
Block block_from_dump_json(const nlohmann::json& j, std::size_t line_no);

struct RpcParseCounters {
    std::uint64_t outputs_unaddressed = 0;
};

// Maps a node's verbose block JSON (decoded transactions) onto the model.
// Requires integer-zat amount fields (valueZat/value_zat, vpub_oldZat/...);
// outputs without an address string are dropped and counted, their value
// folding into the fee residual.
Block block_from_rpc_json(const nlohmann::json& j, RpcParseCounters& counters);

void write_dump(const std::vector<Block>& blocks, std::ostream& os);
void write_dump_file(const std::vector<Block>& blocks, const std::filesystem::path& path);

} // namespace zana
