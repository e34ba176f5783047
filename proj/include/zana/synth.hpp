#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "zana/attribute.hpp"
#include "zana/chain.hpp"
#include "zana/cluster.hpp"
#include "zana/link.hpp"
#include "zana/tsb.hpp"

namespace zana {

// Deterministic scenario parameters. Defaults emulate the observed mainnet
// behaviors (reward split, founder quanta and cap, 6-10 block cadence, >100
// output pool payouts) at desk scale; block spacing is stretched so a
// 5,000-block run spans several calendar months.
struct ScenarioConfig {
    std::uint64_t blocks = 5000;
    std::uint64_t seed = 1;

    std::uint32_t founder_addresses = 6;
    Amount founder_cap = Amount{4'427'250'000'000ull}; // 44,272.5 ZEC
    Amount founder_deposit_quantum = kFounderDepositQuantum;
    Amount founder_withdraw_quantum = kFounderWithdrawQuantum;
    std::uint32_t founder_interval_min = 6;
    std::uint32_t founder_interval_max = 10;
    std::uint32_t founder_burst_rewards = 400; // rewards accumulated per burst

    std::uint32_t pools = 2;
    std::uint32_t pool_fanout = 120; // member outputs per payout (+1 pool address)
    std::uint32_t pool_deposit_batch = 20;
    std::uint32_t pool_payout_period = 60;
    std::uint32_t pool_member_roster = 150;

    std::uint32_t solo_miners = 3;
    std::uint32_t users = 12;
    std::uint32_t round_trips = 25;
    std::uint32_t round_trip_max_gap = 10;
    std::uint32_t private_txs = 12;

    std::uint32_t tsb_buyers = 3; // first one is the repeat buyer
    bool tsb_decoys = true;
    bool founder_decoy = false; // a non-founder emits one quantum withdrawal

    Amount miner_reward = Amount{1'000'000'000ull};   // 10 ZEC
    Amount founder_reward = Amount{250'000'000ull};   // 2.5 ZEC
    Amount std_fee = Amount{10'000ull};               // 0.0001 ZEC
    std::int64_t genesis_time = 1477600000;
    std::int64_t block_spacing = 3000;

    // Flat key=value file; unknown keys are errors, missing keys keep
    // defaults. Amounts are decimal ZEC strings.
    static ScenarioConfig from_file(const std::filesystem::path& path);
    void validate() const; // throws ConfigError on infeasible parameters
};

// Complete label set for the generated chain: who owns every address, the
// true party behind every pool transaction, planted round trips and buyers,
// per-block pool flows, and per-transaction fees.
struct GroundTruth {
    std::string digest;
    std::uint64_t blocks = 0;
    std::uint64_t txs = 0;
    std::array<std::uint64_t, kTxKindCount> kind_counts{};
    std::unordered_map<std::string, std::uint64_t> tx_fees; // non-coingen, zat
    std::unordered_map<std::string, Party> tx_party;        // pool txs only
    std::vector<std::string> pool_payout_txids;
    std::unordered_map<std::string, std::string> address_owner;
    std::vector<std::pair<Amount, Amount>> pool_per_block; // (deposited, withdrawn)
    std::vector<RoundTrip> round_trips;
    std::uint64_t round_trip_gap = 100;
    std::vector<std::string> founder_params;
    std::vector<std::pair<std::string, std::string>> pool_tag_rows;     // address,name
    std::vector<std::pair<std::string, std::string>> exchange_tag_rows; // address,name
    std::vector<std::pair<std::string, std::string>> service_tag_rows;  // address,name
    std::vector<Address> change_exclusions; // service fee addresses
    PriceSchedule schedule;

    struct BuyerTruth {
        std::string actor;
        std::vector<std::string> months;
        std::vector<std::string> deposit_txids;
    };
    std::vector<BuyerTruth> buyers;
    std::vector<std::pair<std::string, std::string>> decoys; // actor, violated condition

    nlohmann::json to_json() const;
    static GroundTruth from_json(const nlohmann::json& j);

    void save(const std::filesystem::path& path) const;
    static GroundTruth load(const std::filesystem::path& path);
};

struct SynthOutput {
    std::vector<Block> chain;
    GroundTruth truth;
};

// Byte-identical output for identical (config, seed). Every chain-model
// invariant holds on the result, inputs fully resolve, and the manifest's
// round-trip list equals a brute-force unique-value scan of the chain.
SynthOutput generate(const ScenarioConfig& config);

// Writes chain.jsonl, manifest.json, founders.txt, pool_tags.csv, tags.csv,
// exclusions.txt and schedule.csv into the directory.
void write_scenario(const SynthOutput& output, const std::filesystem::path& dir);

struct Evaluation {
    struct Counts {
        std::uint64_t tp = 0, fp = 0, fn = 0;
        double precision() const { return tp + fp == 0 ? 1.0 : double(tp) / double(tp + fp); }
        double recall() const { return tp + fn == 0 ? 1.0 : double(tp) / double(tp + fn); }
    };
    Counts founder_withdrawals; // quantum-value signature vs truth
    Counts pool_payouts;        // fan-out signature vs truth
    Counts round_trips;         // linked pairs vs truth
    double cluster_purity = 1.0;
    double attribution_accuracy = 1.0;
};

// Confusion counts of the analysis outputs against the manifest. Throws
// IntegrityError if the store digest does not match the manifest.
Evaluation evaluate(const ChainStore& store, const ClusterSet& clusters,
                    const AttributionResult& attribution, const std::vector<RoundTrip>& trips,
                    const GroundTruth& truth);

} // namespace zana
