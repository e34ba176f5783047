#include "zana/synth.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <fstream>
#include <map>
#include <set>

#include "zana/csv.hpp"
#include "zana/errors.hpp"
#include "zana/rng.hpp"
#include "zana/sha256.hpp"
#include "zana/dumpio.hpp"
#include "zana/store.hpp"
#include "zana/timebucket.hpp"

namespace zana {

namespace {

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        std::uint64_t r = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw ConfigError("bad integer for " + key + ": '" + v + "'");
    }
}

std::int64_t parse_i64(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        std::int64_t r = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw ConfigError("bad integer for " + key + ": '" + v + "'");
    }
}

} // namespace

ScenarioConfig ScenarioConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario config " + path.string());
    ScenarioConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string_view sv(line);
        if (sv.empty() || sv.front() == '#') continue;
        auto eq = sv.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
        std::string key(sv.substr(0, eq));
        std::string value(sv.substr(eq + 1));
        auto u32 = [&](std::uint32_t& field) { field = static_cast<std::uint32_t>(parse_u64(value, key)); };
        if (key == "blocks") cfg.blocks = parse_u64(value, key);
        else if (key == "seed") cfg.seed = parse_u64(value, key);
        else if (key == "founder_addresses") u32(cfg.founder_addresses);
        else if (key == "founder_cap") cfg.founder_cap = Amount::from_zec_string(value);
        else if (key == "founder_deposit_quantum") cfg.founder_deposit_quantum = Amount::from_zec_string(value);
        else if (key == "founder_withdraw_quantum") cfg.founder_withdraw_quantum = Amount::from_zec_string(value);
        else if (key == "founder_interval_min") u32(cfg.founder_interval_min);
        else if (key == "founder_interval_max") u32(cfg.founder_interval_max);
        else if (key == "founder_burst_rewards") u32(cfg.founder_burst_rewards);
        else if (key == "pools") u32(cfg.pools);
        else if (key == "pool_fanout") u32(cfg.pool_fanout);
        else if (key == "pool_deposit_batch") u32(cfg.pool_deposit_batch);
        else if (key == "pool_payout_period") u32(cfg.pool_payout_period);
        else if (key == "pool_member_roster") u32(cfg.pool_member_roster);
        else if (key == "solo_miners") u32(cfg.solo_miners);
        else if (key == "users") u32(cfg.users);
        else if (key == "round_trips") u32(cfg.round_trips);
        else if (key == "round_trip_max_gap") u32(cfg.round_trip_max_gap);
        else if (key == "private_txs") u32(cfg.private_txs);
        else if (key == "tsb_buyers") u32(cfg.tsb_buyers);
        else if (key == "tsb_decoys") cfg.tsb_decoys = value == "true" || value == "1";
        else if (key == "founder_decoy") cfg.founder_decoy = value == "true" || value == "1";
        else if (key == "miner_reward") cfg.miner_reward = Amount::from_zec_string(value);
        else if (key == "founder_reward") cfg.founder_reward = Amount::from_zec_string(value);
        else if (key == "std_fee") cfg.std_fee = Amount::from_zec_string(value);
        else if (key == "genesis_time") cfg.genesis_time = parse_i64(value, key);
        else if (key == "block_spacing") cfg.block_spacing = parse_i64(value, key);
        else throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    return cfg;
}

void ScenarioConfig::validate() const {
    if (blocks == 0) throw ConfigError("blocks must be positive");
    if (founder_addresses == 0) throw ConfigError("founder_addresses must be positive");
    if (founder_cap < founder_deposit_quantum)
        throw ConfigError("founder_cap below founder_deposit_quantum is infeasible");
    if (founder_interval_min == 0 || founder_interval_min > founder_interval_max)
        throw ConfigError("founder interval range is empty");
    if (founder_burst_rewards < 100)
        throw ConfigError("founder_burst_rewards must cover at least one deposit (100 rewards)");
    if (pool_fanout == 0 || pool_member_roster < pool_fanout)
        throw ConfigError("pool_member_roster must cover pool_fanout");
    if (pool_deposit_batch == 0 || pool_payout_period == 0)
        throw ConfigError("pool cadence parameters must be positive");
    if (round_trip_max_gap == 0) throw ConfigError("round_trip_max_gap must be >= 1");
    if (block_spacing <= 0) throw ConfigError("block_spacing must be positive");
    if (std_fee.is_zero()) throw ConfigError("std_fee must be positive");
    if (founder_reward.is_zero() || miner_reward.is_zero())
        throw ConfigError("rewards must be positive");
    if ((founder_deposit_quantum.zat + std_fee.zat) % founder_reward.zat != 0)
        throw ConfigError("founder_deposit_quantum + std_fee must be a whole number of rewards");
    if (founder_withdraw_quantum <= std_fee)
        throw ConfigError("founder_withdraw_quantum must exceed the fee");
    if (miner_reward.zat <= std_fee.zat * 3)
        throw ConfigError("miner_reward must exceed three fees");
}

// ---------------------------------------------------------------------------
// generator
// ---------------------------------------------------------------------------

namespace {

struct Utxo {
    std::string txid;
    std::uint32_t index = 0;
    Amount value;
    Address address;
};

struct Wallet {
    std::deque<Utxo> utxos;

    Amount total() const {
        Amount t;
        for (const auto& u : utxos) t = checked_add(t, u.value);
        return t;
    }
    // oldest utxos covering `need`; empty vector when short
    std::vector<Utxo> take_value(Amount need) {
        Amount got;
        std::size_t n = 0;
        for (; n < utxos.size() && got < need; ++n) got = checked_add(got, utxos[n].value);
        if (got < need) return {};
        std::vector<Utxo> out(utxos.begin(), utxos.begin() + n);
        utxos.erase(utxos.begin(), utxos.begin() + n);
        return out;
    }
    std::vector<Utxo> take_count(std::size_t n) {
        if (utxos.size() < n) return {};
        std::vector<Utxo> out(utxos.begin(), utxos.begin() + n);
        utxos.erase(utxos.begin(), utxos.begin() + n);
        return out;
    }
};

enum class Side { Deposit, Withdrawal };

// Keeps unplanted (deposit, withdrawal) value pairs from ever both being
// unique: misc values are nudged off any opposite-side occurrence and off
// every reserved (semantic or planted) value before use.
class ValueLedger {
  public:
    void reserve(Side side, Amount v) {
        (side == Side::Deposit ? reserved_dep_ : reserved_wd_).insert(v.zat);
    }
    void reserve_both(Amount v) {
        reserved_dep_.insert(v.zat);
        reserved_wd_.insert(v.zat);
    }
    bool clashes(Side side, std::uint64_t zat) const {
        if (reserved_dep_.count(zat) || reserved_wd_.count(zat)) return true;
        const auto& opposite = side == Side::Deposit ? wd_count_ : dep_count_;
        return opposite.count(zat) != 0;
    }
    Amount pick_misc(Amount want, Side side) const {
        std::uint64_t zat = want.zat;
        while (zat > 1 && clashes(side, zat)) --zat;
        return Amount{zat};
    }
    bool is_free_everywhere(std::uint64_t zat) const {
        return !dep_count_.count(zat) && !wd_count_.count(zat) && !reserved_dep_.count(zat) &&
               !reserved_wd_.count(zat);
    }
    void record(Side side, Amount v) {
        ++(side == Side::Deposit ? dep_count_ : wd_count_)[v.zat];
    }
    const std::map<std::uint64_t, std::uint32_t>& deposits() const { return dep_count_; }
    const std::map<std::uint64_t, std::uint32_t>& withdrawals() const { return wd_count_; }

  private:
    std::map<std::uint64_t, std::uint32_t> dep_count_, wd_count_;
    std::set<std::uint64_t> reserved_dep_, reserved_wd_;
};

class Generator {
  public:
    explicit Generator(const ScenarioConfig& cfg) : cfg_(cfg), rng_(cfg.seed ^ 0xa5c3ull) {}

    SynthOutput run();

  private:
    // --- identity -----------------------------------------------------------
    std::string next_txid() {
        return sha256_hex("tx|" + std::to_string(cfg_.seed) + "|" + std::to_string(++txid_seq_));
    }
    std::string next_opaque(const char* prefix) {
        return sha256_hex(std::string(prefix) + "|" + std::to_string(cfg_.seed) + "|" +
                          std::to_string(++opaque_seq_));
    }
    Address fresh_address(const std::string& owner) {
        const std::string a =
            "t1" + sha256_hex("addr|" + std::to_string(cfg_.seed) + "|" +
                              std::to_string(++addr_seq_))
                       .substr(0, 32);
        truth_.address_owner.emplace(a, owner);
        return a;
    }

    // --- block/tx emission --------------------------------------------------
    void begin_block(std::uint64_t h) {
        current_ = Block{};
        current_.height = h;
        current_.hash = sha256_hex("blk|" + std::to_string(cfg_.seed) + "|" + std::to_string(h));
        current_.time = cfg_.genesis_time + static_cast<std::int64_t>(h) * cfg_.block_spacing;
        height_ = h;
    }
    void end_block() { chain_.push_back(std::move(current_)); }

    struct JsSpec {
        Amount vpub_old;
        Amount vpub_new;
    };

    const Transaction& emit(std::vector<Utxo> inputs,
                            std::vector<std::pair<Address, Amount>> outputs,
                            std::vector<JsSpec> joinsplits, Party party = Party::Other) {
        Transaction tx;
        tx.txid = next_txid();
        tx.block_height = height_;
        tx.block_time = current_.time;
        Amount in_sum, out_sum, dep, wd;
        for (auto& u : inputs) {
            TxIn txin;
            txin.prev_txid = u.txid;
            txin.prev_index = u.index;
            in_sum = checked_add(in_sum, u.value);
            tx.vin.push_back(std::move(txin));
        }
        std::uint32_t index = 0;
        for (auto& [addr, value] : outputs) {
            out_sum = checked_add(out_sum, value);
            tx.vout.push_back(TxOut{addr, value, index++});
        }
        for (const auto& js : joinsplits) {
            JoinSplit j;
            j.vpub_old = js.vpub_old;
            j.vpub_new = js.vpub_new;
            j.nullifiers = {next_opaque("nf"), next_opaque("nf")};
            j.commitments = {next_opaque("cm"), next_opaque("cm")};
            dep = checked_add(dep, j.vpub_old);
            wd = checked_add(wd, j.vpub_new);
            tx.joinsplits.push_back(std::move(j));
        }
        const Amount credits = checked_add(in_sum, wd);
        const Amount debits = checked_add(out_sum, dep);
        if (debits > credits)
            throw IntegrityError("generator built a value-losing tx at height " +
                                 std::to_string(height_));
        const Amount fee = checked_sub(credits, debits);
        truth_.tx_fees.emplace(tx.txid, fee.zat);
        const TxKind kind = classify_tx(tx);
        ++truth_.kind_counts[static_cast<std::size_t>(kind)];
        if (kind == TxKind::Shielded || kind == TxKind::Deshielded || kind == TxKind::Mixed)
            truth_.tx_party.emplace(tx.txid, party);
        if (!dep.is_zero()) {
            values_.record(Side::Deposit, dep);
            pool_dep_[height_] = checked_add(pool_dep_[height_], dep);
        }
        if (!wd.is_zero()) {
            values_.record(Side::Withdrawal, wd);
            pool_wd_[height_] = checked_add(pool_wd_[height_], wd);
        }
        current_.txs.push_back(std::move(tx));
        return current_.txs.back();
    }

    // credit a transaction's outputs into wallets
    static void credit(Wallet& wallet, const Transaction& tx, const std::set<Address>& owned) {
        for (const auto& out : tx.vout)
            if (owned.count(out.address)) wallet.utxos.push_back({tx.txid, out.index, out.value, out.address});
    }
    static void credit_all(Wallet& wallet, const Transaction& tx) {
        for (const auto& out : tx.vout)
            wallet.utxos.push_back({tx.txid, out.index, out.value, out.address});
    }

    std::uint64_t interval() {
        return rng_.range(cfg_.founder_interval_min, cfg_.founder_interval_max);
    }

    // split a deposit across one or two joinsplits
    std::vector<JsSpec> deposit_js(Amount v) {
        if (v.zat > 2 && rng_.chance(1, 4)) {
            Amount half{v.zat / 2};
            return {JsSpec{half, Amount{}}, JsSpec{checked_sub(v, half), Amount{}}};
        }
        return {JsSpec{v, Amount{}}};
    }

    // --- actors -------------------------------------------------------------
    void setup();
    void coingen_step();
    void founder_step();
    void pool_step();
    void solo_step();
    void exchange_step();
    void user_step();
    void roundtrip_step();
    void private_step();
    void tsb_step();
    void finalize(SynthOutput& out);

    const ScenarioConfig& cfg_;
    SplitMix64 rng_;
    std::uint64_t txid_seq_ = 0, opaque_seq_ = 0, addr_seq_ = 0;
    std::vector<Block> chain_;
    Block current_;
    std::uint64_t height_ = 0;
    GroundTruth truth_;
    ValueLedger values_;
    std::vector<Amount> pool_dep_, pool_wd_;

    // founders: one address active at a time, aggregate shielded balance
    struct Founders {
        std::vector<Address> roster;
        std::vector<Amount> deposited;
        std::vector<Wallet> rewards;
        std::uint32_t active = 0;
        bool bursting = false;
        std::uint64_t next_dep_h = 0;
        std::uint64_t next_wd_h = 0;
        Amount shielded;
    } founders_;

    struct Pool {
        std::string name;
        std::array<Address, 2> reward_addrs;
        std::uint32_t next_reward_addr = 0;
        Wallet rewards;
        Amount shielded;
        std::vector<Address> members;
        std::vector<Wallet> member_wallets;
        std::set<std::uint32_t> exchange_members; // payouts land at the exchange
        std::uint32_t payout_count = 0;
        std::uint32_t offset = 0;
    };
    std::vector<Pool> pools_;

    struct Solo {
        Address addr;
        Wallet rewards;
        Amount shielded;
        std::uint64_t sold = 0, kept = 0;
        std::vector<std::uint64_t> deposits_due;    // heights
        std::vector<std::uint64_t> withdrawals_due; // heights
    };
    std::vector<Solo> solos_;
    Amount solo_dep_value_, solo_wd_value_;

    struct Exchange {
        std::string name = "ExchangeA";
        Address hot;
        Wallet hot_wallet;
        Wallet pending; // customer deposits awaiting consolidation
        std::set<Address> owned;
    } exchange_;

    struct FundRequest {
        std::uint64_t not_before = 0;
        Address to;
        Amount amount;
        Wallet* credit_to = nullptr;
    };
    std::deque<FundRequest> fund_queue_;

    struct User {
        std::string owner;
        Wallet wallet;
        std::set<Address> owned;
        Amount shielded;
        Amount shielded_reserved; // planted round-trip funds awaiting exit
        std::uint64_t funded_at = UINT64_MAX;
        std::uint64_t next_action = 0;
    };
    std::vector<User> users_;
    User hermit_;
    Address service_fee_addr_;
    std::uint32_t service_payments_ = 0;

    struct PlannedTrip {
        std::uint64_t dep_h;
        std::uint32_t user;
        bool done = false;
    };
    std::vector<PlannedTrip> planned_trips_;
    struct PendingExit {
        std::uint64_t h;
        std::uint32_t user;
        Amount value;
        std::string dep_txid;
        std::uint64_t dep_h;
    };
    std::vector<PendingExit> pending_exits_;
    std::vector<std::uint64_t> private_due_;

    struct Buyer {
        std::string actor;
        User state;
        std::vector<std::pair<std::uint64_t, Amount>> plan; // (deposit height, amount)
        std::size_t next = 0;
        Utxo change; // previous month change, chained into the next deposit
        bool has_change = false;
        GroundTruth::BuyerTruth* truth = nullptr;
    };
    std::vector<Buyer> buyers_;
    struct Decoy {
        std::string kind;
        User state;
        std::vector<std::pair<std::uint64_t, Amount>> deposits;
        std::size_t next = 0;
        std::uint64_t churn_left = 0;
        bool needs_pool_receipt = false;
        bool pool_receipt_done = false;
    };
    std::vector<Decoy> decoys_;
    bool founder_decoy_done_ = false;
    std::uint64_t founder_decoy_h_ = 0;
    User founder_decoy_user_;
};

void Generator::setup() {
    truth_.pool_per_block.clear();
    pool_dep_.assign(cfg_.blocks, Amount{});
    pool_wd_.assign(cfg_.blocks, Amount{});

    // semantic values no misc draw may collide with
    values_.reserve(Side::Deposit, cfg_.founder_deposit_quantum);
    values_.reserve(Side::Withdrawal, cfg_.founder_withdraw_quantum);
    if (const std::uint64_t rem = cfg_.founder_cap.zat % cfg_.founder_deposit_quantum.zat)
        values_.reserve(Side::Deposit, Amount{rem}); // the rotation's partial deposit
    solo_dep_value_ = checked_sub(cfg_.miner_reward, cfg_.std_fee);
    solo_wd_value_ = checked_sub(cfg_.miner_reward, Amount{cfg_.std_fee.zat * 3});
    values_.reserve(Side::Deposit, solo_dep_value_);
    values_.reserve(Side::Withdrawal, solo_wd_value_);

    founders_.roster.resize(cfg_.founder_addresses);
    founders_.deposited.assign(cfg_.founder_addresses, Amount{});
    founders_.rewards.resize(cfg_.founder_addresses);
    for (std::uint32_t i = 0; i < cfg_.founder_addresses; ++i) {
        founders_.roster[i] = fresh_address("founders");
        truth_.founder_params.push_back(founders_.roster[i]);
    }

    pools_.resize(cfg_.pools);
    for (std::uint32_t i = 0; i < cfg_.pools; ++i) {
        auto& pool = pools_[i];
        pool.name = "Pool" + std::string(1, static_cast<char>('A' + (i % 26)));
        pool.offset = (i * 17) % std::max<std::uint32_t>(1, cfg_.pool_payout_period);
        for (auto& addr : pool.reward_addrs) {
            addr = fresh_address(pool.name);
            truth_.pool_tag_rows.emplace_back(addr, pool.name);
        }
        pool.members.reserve(cfg_.pool_member_roster);
        pool.member_wallets.resize(cfg_.pool_member_roster);
        for (std::uint32_t m = 0; m < cfg_.pool_member_roster; ++m) {
            // some miners take payouts straight into their exchange account
            if (m % 40 == 7) {
                const Address a = fresh_address(exchange_.name);
                exchange_.owned.insert(a);
                pool.exchange_members.insert(m);
                pool.members.push_back(a);
            } else {
                pool.members.push_back(fresh_address(pool.name + ":member" + std::to_string(m)));
            }
        }
    }

    solos_.resize(cfg_.solo_miners);
    for (std::uint32_t i = 0; i < cfg_.solo_miners; ++i)
        solos_[i].addr = fresh_address("solo" + std::to_string(i));

    exchange_.hot = fresh_address(exchange_.name);
    exchange_.owned.insert(exchange_.hot);
    truth_.exchange_tag_rows.emplace_back(exchange_.hot, exchange_.name);

    service_fee_addr_ = fresh_address("WalletOpFee");
    truth_.service_tag_rows.emplace_back(service_fee_addr_, "WalletOpFee");
    truth_.change_exclusions.push_back(service_fee_addr_);

    const std::uint64_t user_start = std::min<std::uint64_t>(300, std::max<std::uint64_t>(4, cfg_.blocks / 4));
    users_.resize(cfg_.users);
    for (std::uint32_t i = 0; i < cfg_.users; ++i) {
        auto& user = users_[i];
        user.owner = "user" + std::to_string(i);
        const Address first = fresh_address(user.owner);
        user.owned.insert(first);
        const Amount stake = Amount::from_zec_int(30 + rng_.range(0, 50));
        fund_queue_.push_back({user_start + i * 7, first, stake, &user.wallet});
    }

    hermit_.owner = "hermit";
    if (cfg_.private_txs > 0 || (cfg_.tsb_decoys && cfg_.tsb_buyers > 0)) {
        const Address haddr = fresh_address(hermit_.owner);
        hermit_.owned.insert(haddr);
        fund_queue_.push_back({std::max<std::uint64_t>(2, user_start / 2), haddr,
                               Amount::from_zec_string("140.5"), &hermit_.wallet});
    }
    const std::uint64_t priv_start = std::min<std::uint64_t>(400, cfg_.blocks / 3 + 2);
    if (cfg_.private_txs > 0 && cfg_.blocks > priv_start + 4) {
        const std::uint64_t span = cfg_.blocks - priv_start - 2;
        for (std::uint32_t i = 0; i < cfg_.private_txs; ++i)
            private_due_.push_back(priv_start + (span * i) / cfg_.private_txs +
                                   rng_.range(0, 3));
        std::sort(private_due_.begin(), private_due_.end());
    }

    // round trips spread over the usable middle of the chain
    if (cfg_.round_trips > 0 && cfg_.users > 0) {
        const std::uint64_t start = user_start + 40;
        if (cfg_.blocks > start + cfg_.round_trip_max_gap + 4) {
            const std::uint64_t span = cfg_.blocks - start - cfg_.round_trip_max_gap - 2;
            for (std::uint32_t i = 0; i < cfg_.round_trips; ++i) {
                planned_trips_.push_back(
                    {start + (span * i) / cfg_.round_trips, i % cfg_.users, false});
            }
        }
    }

    // TSB schedule: three consecutive months starting two after genesis
    const std::int64_t m0 = utc_month_index(cfg_.genesis_time);
    truth_.schedule.entries = {
        {utc_month_label(m0 + 2), Amount::from_zec_int(100)},
        {utc_month_label(m0 + 3), Amount::from_zec_int(200)},
        {utc_month_label(m0 + 3), Amount::from_zec_int(400)},
        {utc_month_label(m0 + 4), Amount::from_zec_int(500)},
    };
    for (const auto& e : truth_.schedule.entries) values_.reserve(Side::Deposit, e.amount);

    // first block height of each scheduled month, if inside the chain
    auto month_first_height = [&](std::int64_t month) -> std::optional<std::uint64_t> {
        for (std::uint64_t h = 0; h < cfg_.blocks; ++h) {
            const std::int64_t t = cfg_.genesis_time + static_cast<std::int64_t>(h) * cfg_.block_spacing;
            const std::int64_t mi = utc_month_index(t);
            if (mi == month) return h;
            if (mi > month) return std::nullopt;
        }
        return std::nullopt;
    };
    const std::uint64_t blocks_per_month =
        std::max<std::uint64_t>(2, (30ll * 86400) / cfg_.block_spacing);
    auto plan_deposit = [&](std::int64_t month, std::uint64_t salt) -> std::optional<std::uint64_t> {
        auto first = month_first_height(month);
        if (!first) return std::nullopt;
        const std::uint64_t offset =
            blocks_per_month / 5 + (salt * 13) % std::max<std::uint64_t>(1, blocks_per_month / 2);
        const std::uint64_t h = *first + offset;
        if (h + 2 >= cfg_.blocks) return std::nullopt;
        // stay within the month
        const std::int64_t t = cfg_.genesis_time + static_cast<std::int64_t>(h) * cfg_.block_spacing;
        if (utc_month_index(t) != month) return std::nullopt;
        return h;
    };

    truth_.buyers.reserve(cfg_.tsb_buyers);
    for (std::uint32_t b = 0; b < cfg_.tsb_buyers; ++b) {
        Buyer buyer;
        buyer.actor = "tsb_buyer" + std::to_string(b);
        buyer.state.owner = buyer.actor;
        if (b == 0) {
            // repeat buyer: one scheduled amount per month
            for (std::uint32_t k = 0; k < 3; ++k) {
                const Amount amount = k == 0   ? Amount::from_zec_int(100)
                                      : k == 1 ? Amount::from_zec_int(200)
                                               : Amount::from_zec_int(500);
                if (auto h = plan_deposit(m0 + 2 + k, b * 31 + k * 7))
                    buyer.plan.emplace_back(*h, amount);
            }
        } else {
            const Amount amount = b % 2 == 1 ? Amount::from_zec_int(100) : Amount::from_zec_int(400);
            const std::int64_t month = b % 2 == 1 ? m0 + 2 : m0 + 3;
            if (auto h = plan_deposit(month, b * 31))
                buyer.plan.emplace_back(*h, amount);
        }
        if (buyer.plan.empty()) continue;
        truth_.buyers.push_back({buyer.actor, {}, {}});
        buyers_.push_back(std::move(buyer));
        buyers_.back().truth = &truth_.buyers.back();
    }
    // funding requests for the first month of each buyer (later months chain
    // off the change and a follow-up request)
    for (auto& buyer : buyers_) {
        const Address addr = fresh_address(buyer.actor);
        buyer.state.owned.insert(addr);
        const Amount need = checked_add(buyer.plan[0].second,
                                        checked_add(cfg_.std_fee, Amount::from_zec_string("0.01")));
        const std::uint64_t when = buyer.plan[0].first > 40 ? buyer.plan[0].first - 40 : 1;
        fund_queue_.push_back({when, addr, need, &buyer.state.wallet});
    }

    if (cfg_.tsb_decoys && !buyers_.empty()) {
        auto add_decoy = [&](const std::string& kind) -> Decoy& {
            decoys_.push_back({});
            auto& d = decoys_.back();
            d.kind = kind;
            d.state.owner = "tsb_decoy_" + kind;
            return d;
        };
        const std::int64_t dec_month0 = m0 + 2;
        if (auto h = plan_deposit(dec_month0, 101)) {
            auto& d = add_decoy("tolerance"); // 106 outside the +-5 window
            d.deposits = {{*h, Amount::from_zec_int(106)}};
            const Address a = fresh_address(d.state.owner);
            d.state.owned.insert(a);
            fund_queue_.push_back({*h > 30 ? *h - 30 : 1, a,
                                   Amount::from_zec_string("106.0101"), &d.state.wallet});
            truth_.decoys.emplace_back(d.state.owner, "deposit outside tolerance");
            values_.reserve(Side::Deposit, Amount::from_zec_int(106));
        }
        if (auto h = plan_deposit(dec_month0, 211)) {
            auto& d = add_decoy("prior_receipt"); // funded from the pool
            d.deposits = {{*h, Amount::from_zec_int(100)}};
            d.needs_pool_receipt = true;
            const Address a = fresh_address(d.state.owner);
            d.state.owned.insert(a);
            truth_.decoys.emplace_back(d.state.owner, "prior pool receipt");
        }
        if (auto h = plan_deposit(dec_month0, 307)) {
            auto& d = add_decoy("month_total"); // 100 + 50 in the same month
            d.deposits = {{*h, Amount::from_zec_int(100)},
                          {*h + 12, Amount::from_zec_int(50)}};
            const Address a = fresh_address(d.state.owner);
            d.state.owned.insert(a);
            fund_queue_.push_back({*h > 30 ? *h - 30 : 1, a,
                                   Amount::from_zec_string("150.0202"), &d.state.wallet});
            truth_.decoys.emplace_back(d.state.owner, "cluster month total off schedule");
            values_.reserve(Side::Deposit, Amount::from_zec_int(50));
        }
        if (auto h = plan_deposit(m0 + 3, 401)) {
            auto& d = add_decoy("activity"); // over the transaction cap
            d.deposits = {{*h, Amount::from_zec_int(100)}};
            d.churn_left = 252;
            const Address a = fresh_address(d.state.owner);
            d.state.owned.insert(a);
            fund_queue_.push_back({*h > 120 ? *h - 120 : 1, a,
                                   Amount::from_zec_string("100.0101"), &d.state.wallet});
            truth_.decoys.emplace_back(d.state.owner, "activity above limit");
        }
    }

    if (cfg_.founder_decoy) {
        founder_decoy_h_ = cfg_.blocks * 7 / 10;
        founder_decoy_user_.owner = "founder_decoy";
        const Address a = fresh_address(founder_decoy_user_.owner);
        founder_decoy_user_.owned.insert(a);
        const Amount need = checked_add(cfg_.founder_withdraw_quantum,
                                        Amount{cfg_.std_fee.zat * 2});
        fund_queue_.push_back({founder_decoy_h_ > 200 ? founder_decoy_h_ - 200 : 1, a, need,
                               &founder_decoy_user_.wallet});
    }
}

void Generator::coingen_step() {
    // weighted winner: pools dominate, solos pick up the rest
    const std::uint64_t pool_weight = 4;
    const std::uint64_t total = cfg_.pools * pool_weight + cfg_.solo_miners;
    Address miner_addr;
    if (total == 0) {
        miner_addr = fresh_address("lone_miner");
    } else {
        std::uint64_t pick = rng_.range(0, total - 1);
        if (pick < cfg_.pools * pool_weight) {
            auto& pool = pools_[pick / pool_weight];
            miner_addr = pool.reward_addrs[pool.next_reward_addr];
            pool.next_reward_addr ^= 1;
        } else {
            miner_addr = solos_[pick - cfg_.pools * pool_weight].addr;
        }
    }
    const Address founder_addr = founders_.roster[founders_.active];

    Transaction tx;
    tx.txid = next_txid();
    tx.block_height = height_;
    tx.block_time = current_.time;
    tx.is_coinbase = true;
    tx.vout.push_back(TxOut{miner_addr, cfg_.miner_reward, 0});
    tx.vout.push_back(TxOut{founder_addr, cfg_.founder_reward, 1});
    ++truth_.kind_counts[static_cast<std::size_t>(TxKind::Coingen)];
    current_.txs.push_back(std::move(tx));
    const Transaction& made = current_.txs.back();

    for (auto& pool : pools_) {
        if (miner_addr == pool.reward_addrs[0] || miner_addr == pool.reward_addrs[1]) {
            pool.rewards.utxos.push_back({made.txid, 0, cfg_.miner_reward, miner_addr});
        }
    }
    for (auto& solo : solos_) {
        if (miner_addr == solo.addr)
            solo.rewards.utxos.push_back({made.txid, 0, cfg_.miner_reward, miner_addr});
    }
    founders_.rewards[founders_.active].utxos.push_back(
        {made.txid, 1, cfg_.founder_reward, founder_addr});
}

void Generator::founder_step() {
    auto& f = founders_;
    const std::uint64_t rewards_per_deposit =
        (cfg_.founder_deposit_quantum.zat + cfg_.std_fee.zat) / cfg_.founder_reward.zat;
    auto& wallet = f.rewards[f.active];

    if (!f.bursting && wallet.utxos.size() >= cfg_.founder_burst_rewards) {
        f.bursting = true;
        f.next_dep_h = height_;
    }
    if (f.bursting && height_ >= f.next_dep_h) {
        const bool capped = f.active + 1 < f.roster.size(); // last address uncapped
        Amount quantum = cfg_.founder_deposit_quantum;
        bool rotate = false;
        if (capped) {
            const Amount room = checked_sub(cfg_.founder_cap, f.deposited[f.active]);
            if (room.is_zero()) {
                f.active += 1;
                f.bursting = false;
                return;
            }
            if (room < quantum) {
                quantum = room;
                rotate = true;
            }
        }
        const std::uint64_t need =
            (quantum.zat + cfg_.std_fee.zat + cfg_.founder_reward.zat - 1) /
            cfg_.founder_reward.zat;
        if (wallet.utxos.size() >= need) {
            auto ins = wallet.take_count(need);
            emit(std::move(ins), {}, deposit_js(quantum), Party::Founder);
            f.deposited[f.active] = checked_add(f.deposited[f.active], quantum);
            f.shielded = checked_add(f.shielded, quantum);
            f.next_dep_h = height_ + interval();
            if (rotate) {
                f.active += 1;
                f.bursting = false;
            } else if (wallet.utxos.size() < rewards_per_deposit) {
                f.bursting = false;
            }
        } else {
            f.bursting = false;
        }
    }

    if (f.shielded >= cfg_.founder_withdraw_quantum && height_ >= f.next_wd_h) {
        const Address to = fresh_address("founders");
        const Amount paid = checked_sub(cfg_.founder_withdraw_quantum, cfg_.std_fee);
        emit({}, {{to, paid}}, {JsSpec{Amount{}, cfg_.founder_withdraw_quantum}},
             Party::Founder);
        f.shielded = checked_sub(f.shielded, cfg_.founder_withdraw_quantum);
        f.next_wd_h = height_ + interval();
    }
}

void Generator::pool_step() {
    for (auto& pool : pools_) {
        if (pool.rewards.utxos.size() >= cfg_.pool_deposit_batch) {
            auto ins = pool.rewards.take_count(cfg_.pool_deposit_batch);
            Amount sum;
            for (const auto& u : ins) sum = checked_add(sum, u.value);
            const Amount v = checked_sub(sum, cfg_.std_fee);
            values_.reserve(Side::Deposit, v); // batch sums repeat; keep them off misc draws
            emit(std::move(ins), {}, deposit_js(v), Party::Miner);
            pool.shielded = checked_add(pool.shielded, v);
        }
        if (cfg_.pool_payout_period == 0 || height_ % cfg_.pool_payout_period != pool.offset)
            continue;
        const Amount retention{130'000}; // keeps payout values off deposit values
        const Amount pool_cut = Amount::from_zec_int(1);
        const Amount floor = checked_add(
            checked_add(retention, pool_cut),
            checked_add(cfg_.std_fee, Amount{static_cast<std::uint64_t>(cfg_.pool_fanout) * 10}));
        if (pool.shielded < floor) continue;
        const Amount want = checked_sub(pool.shielded, retention);
        const Amount v = values_.pick_misc(want, Side::Withdrawal);
        const Amount distributable = checked_sub(v, cfg_.std_fee);
        const Amount member_pot = checked_sub(distributable, pool_cut);
        const Amount per{member_pot.zat / cfg_.pool_fanout};
        const Amount remainder{member_pot.zat % cfg_.pool_fanout};
        std::vector<std::pair<Address, Amount>> outs;
        outs.reserve(cfg_.pool_fanout + 1);
        outs.emplace_back(pool.reward_addrs[0], checked_add(pool_cut, remainder));
        const std::uint32_t start = (pool.payout_count * cfg_.pool_fanout) % pool.members.size();
        for (std::uint32_t k = 0; k < cfg_.pool_fanout; ++k) {
            const std::uint32_t m = (start + k) % pool.members.size();
            outs.emplace_back(pool.members[m], per);
        }
        const Transaction& tx =
            emit({}, std::move(outs), {JsSpec{Amount{}, v}}, Party::Miner);
        truth_.pool_payout_txids.push_back(tx.txid);
        pool.shielded = checked_sub(pool.shielded, v);
        ++pool.payout_count;
        // credit members (skip output 0, the pool's own address)
        for (const auto& out : tx.vout) {
            if (out.index == 0) continue;
            const std::uint32_t m = (start + out.index - 1) % pool.members.size();
            Utxo utxo{tx.txid, out.index, out.value, out.address};
            if (pool.exchange_members.count(m))
                exchange_.pending.utxos.push_back(std::move(utxo));
            else
                pool.member_wallets[m].utxos.push_back(std::move(utxo));
        }
        // pool reward address output goes back into the reward wallet
        pool.rewards.utxos.push_back(
            {tx.txid, 0, tx.vout[0].value, pool.reward_addrs[0]});
    }

    // members occasionally cash out to the exchange
    if (!pools_.empty() && rng_.chance(2, 5)) {
        auto& pool = pools_[rng_.range(0, pools_.size() - 1)];
        const std::uint32_t m = static_cast<std::uint32_t>(rng_.range(0, pool.members.size() - 1));
        auto& wallet = pool.member_wallets[m];
        if (wallet.utxos.size() >= 2) {
            auto ins = wallet.take_count(std::min<std::size_t>(3, wallet.utxos.size()));
            Amount sum;
            for (const auto& u : ins) sum = checked_add(sum, u.value);
            if (sum > cfg_.std_fee) {
                const Address dep_addr = fresh_address(exchange_.name);
                exchange_.owned.insert(dep_addr);
                const Transaction& tx =
                    emit(std::move(ins), {{dep_addr, checked_sub(sum, cfg_.std_fee)}}, {});
                credit(exchange_.pending, tx, {dep_addr});
            }
        }
    }
}

void Generator::solo_step() {
    for (auto& solo : solos_) {
        if (!solo.rewards.utxos.empty()) {
            // alternate between shielding the reward and selling it
            if ((solo.sold + solo.kept) % 2 == 0) {
                ++solo.kept;
                solo.deposits_due.push_back(height_ + rng_.range(1, 5));
            } else {
                ++solo.sold;
                auto ins = solo.rewards.take_count(1);
                const Address dep_addr = fresh_address(exchange_.name);
                exchange_.owned.insert(dep_addr);
                const Transaction& tx = emit(
                    std::move(ins), {{dep_addr, checked_sub(cfg_.miner_reward, cfg_.std_fee)}},
                    {});
                credit(exchange_.pending, tx, {dep_addr});
                continue;
            }
        }
        if (!solo.deposits_due.empty() && solo.deposits_due.front() <= height_ &&
            !solo.rewards.utxos.empty()) {
            solo.deposits_due.erase(solo.deposits_due.begin());
            auto ins = solo.rewards.take_count(1);
            emit(std::move(ins), {}, {JsSpec{solo_dep_value_, Amount{}}}, Party::Miner);
            solo.shielded = checked_add(solo.shielded, solo_dep_value_);
            solo.withdrawals_due.push_back(height_ + rng_.range(2, 8));
        }
        if (!solo.withdrawals_due.empty() && solo.withdrawals_due.front() <= height_ &&
            solo.shielded >= solo_wd_value_) {
            solo.withdrawals_due.erase(solo.withdrawals_due.begin());
            emit({}, {{solo.addr, checked_sub(solo_wd_value_, cfg_.std_fee)}},
                 {JsSpec{Amount{}, solo_wd_value_}}, Party::Miner);
            solo.shielded = checked_sub(solo.shielded, solo_wd_value_);
        }
    }
}

void Generator::exchange_step() {
    // consolidate customer deposits into the hot address
    if (height_ % 7 == 3 && exchange_.pending.utxos.size() >= 2) {
        std::vector<Utxo> ins(exchange_.pending.utxos.begin(), exchange_.pending.utxos.end());
        exchange_.pending.utxos.clear();
        if (!exchange_.hot_wallet.utxos.empty()) {
            auto hot = exchange_.hot_wallet.take_count(1);
            ins.push_back(hot.front());
        }
        Amount sum;
        for (const auto& u : ins) sum = checked_add(sum, u.value);
        if (sum > cfg_.std_fee) {
            const Transaction& tx =
                emit(std::move(ins), {{exchange_.hot, checked_sub(sum, cfg_.std_fee)}}, {});
            credit(exchange_.hot_wallet, tx, {exchange_.hot});
        }
    }
    // serve funding requests in order
    while (!fund_queue_.empty()) {
        auto& req = fund_queue_.front();
        if (req.not_before > height_) break;
        const Amount need = checked_add(req.amount, cfg_.std_fee);
        auto ins = exchange_.hot_wallet.take_value(need);
        if (ins.empty()) break; // retry next block
        Amount sum;
        for (const auto& u : ins) sum = checked_add(sum, u.value);
        std::vector<std::pair<Address, Amount>> outs{{req.to, req.amount}};
        const Amount change = checked_sub(sum, need);
        if (!change.is_zero()) outs.emplace_back(exchange_.hot, change);
        const Transaction& tx = emit(std::move(ins), std::move(outs), {});
        if (req.credit_to)
            req.credit_to->utxos.push_back({tx.txid, 0, req.amount, req.to});
        credit(exchange_.hot_wallet, tx, {exchange_.hot});
        fund_queue_.pop_front();
    }
}

void Generator::user_step() {
    for (std::uint32_t i = 0; i < users_.size(); ++i) {
        auto& user = users_[i];
        if (user.funded_at == UINT64_MAX) {
            if (!user.wallet.utxos.empty()) {
                user.funded_at = height_;
                user.next_action = height_ + 5 + rng_.range(0, 10);
            }
            continue;
        }
        if (height_ < user.next_action) continue;
        user.next_action = height_ + 20 + rng_.range(0, 30);
        auto restore = [&user](std::vector<Utxo>& ins) {
            for (auto& u : ins) user.wallet.utxos.push_back(std::move(u));
        };
        const std::uint64_t roll = rng_.range(0, 9);
        if (roll < 4) {
            // plain transfer to another user
            if (users_.size() < 2) continue;
            std::uint32_t peer = static_cast<std::uint32_t>(rng_.range(0, users_.size() - 1));
            if (peer == i) peer = (peer + 1) % users_.size();
            auto ins = user.wallet.take_count(std::min<std::size_t>(
                user.wallet.utxos.size(), 1 + rng_.range(0, 1)));
            if (ins.empty()) continue;
            Amount sum;
            for (const auto& u : ins) sum = checked_add(sum, u.value);
            if (sum <= Amount{cfg_.std_fee.zat * 10}) {
                restore(ins);
                continue;
            }
            const Amount pay{(sum.zat - cfg_.std_fee.zat) / 2};
            const Amount change = checked_sub(sum, checked_add(pay, cfg_.std_fee));
            const Address to = fresh_address(users_[peer].owner);
            users_[peer].owned.insert(to);
            const Address back = fresh_address(user.owner);
            user.owned.insert(back);
            std::vector<std::pair<Address, Amount>> outs{{to, pay}};
            if (!change.is_zero()) outs.emplace_back(back, change);
            const Transaction& tx = emit(std::move(ins), std::move(outs), {});
            users_[peer].wallet.utxos.push_back({tx.txid, 0, pay, to});
            if (!change.is_zero()) user.wallet.utxos.push_back({tx.txid, 1, change, back});
        } else if (roll < 7) {
            // shield everything in one or two coins
            auto ins = user.wallet.take_count(std::min<std::size_t>(
                user.wallet.utxos.size(), 1 + rng_.range(0, 1)));
            if (ins.empty()) continue;
            Amount sum;
            for (const auto& u : ins) sum = checked_add(sum, u.value);
            if (sum <= Amount{cfg_.std_fee.zat * 100}) {
                restore(ins);
                continue;
            }
            const Amount v = values_.pick_misc(checked_sub(sum, cfg_.std_fee), Side::Deposit);
            emit(std::move(ins), {}, deposit_js(v), Party::Other);
            user.shielded = checked_add(user.shielded, v);
        } else if (roll < 9) {
            // shield part, keep change (single transparent output)
            auto ins = user.wallet.take_count(1);
            if (ins.empty()) continue;
            const Amount sum = ins.front().value;
            if (sum <= Amount{cfg_.std_fee.zat * 200}) {
                restore(ins);
                continue;
            }
            const Amount v = values_.pick_misc(Amount{sum.zat / 2}, Side::Deposit);
            // a few of these pay the wallet operator fee address instead
            Address change_addr;
            if (service_payments_ < 2 && i < 2) {
                change_addr = service_fee_addr_;
                ++service_payments_;
            } else {
                change_addr = fresh_address(user.owner);
                user.owned.insert(change_addr);
            }
            const Amount change = checked_sub(sum, checked_add(v, cfg_.std_fee));
            if (change.is_zero()) {
                restore(ins);
                continue;
            }
            const Transaction& tx =
                emit(std::move(ins), {{change_addr, change}}, deposit_js(v), Party::Other);
            if (change_addr != service_fee_addr_)
                user.wallet.utxos.push_back({tx.txid, 0, change, change_addr});
            user.shielded = checked_add(user.shielded, v);
        } else {
            // unshield some funds
            const Amount spendable = checked_sub(user.shielded, user.shielded_reserved);
            if (spendable <= Amount{cfg_.std_fee.zat * 100}) continue;
            const Amount v = values_.pick_misc(Amount{spendable.zat / 2}, Side::Withdrawal);
            if (v <= cfg_.std_fee) continue;
            const Address to = fresh_address(user.owner);
            user.owned.insert(to);
            const Transaction& tx =
                emit({}, {{to, checked_sub(v, cfg_.std_fee)}}, {JsSpec{Amount{}, v}},
                     Party::Other);
            user.wallet.utxos.push_back({tx.txid, 0, checked_sub(v, cfg_.std_fee), to});
            user.shielded = checked_sub(user.shielded, v);
        }
    }

    // the planted non-founder quantum withdrawal
    if (cfg_.founder_decoy && !founder_decoy_done_ && height_ >= founder_decoy_h_) {
        auto& user = founder_decoy_user_;
        if (user.shielded >= cfg_.founder_withdraw_quantum) {
            const Address to = fresh_address(user.owner);
            user.owned.insert(to);
            emit({}, {{to, checked_sub(cfg_.founder_withdraw_quantum, cfg_.std_fee)}},
                 {JsSpec{Amount{}, cfg_.founder_withdraw_quantum}}, Party::Other);
            user.shielded = checked_sub(user.shielded, cfg_.founder_withdraw_quantum);
            founder_decoy_done_ = true;
        } else if (!user.wallet.utxos.empty()) {
            // shield enough to withdraw the quantum
            auto ins = user.wallet.take_value(
                checked_add(cfg_.founder_withdraw_quantum, cfg_.std_fee));
            if (ins.empty()) return;
            Amount sum;
            for (const auto& u : ins) sum = checked_add(sum, u.value);
            const Amount v = values_.pick_misc(checked_sub(sum, cfg_.std_fee), Side::Deposit);
            emit(std::move(ins), {}, deposit_js(v), Party::Other);
            user.shielded = checked_add(user.shielded, v);
        }
    }
}

void Generator::roundtrip_step() {
    for (auto& plan : planned_trips_) {
        if (plan.done || plan.dep_h > height_) continue;
        auto& user = users_[plan.user];
        if (user.funded_at == UINT64_MAX) {
            if (plan.dep_h + 20 < height_) plan.done = true; // never funded; drop
            continue;
        }
        // chain-unique value with eight decimal places, small enough for any
        // funded wallet
        Amount v;
        for (int tries = 0; tries < 64; ++tries) {
            std::uint64_t zat = rng_.range(3'000'000, 90'000'000);
            zat = zat * 10 + rng_.range(1, 9);
            if (values_.is_free_everywhere(zat)) {
                v = Amount{zat};
                break;
            }
        }
        if (v.is_zero()) continue;
        auto ins = user.wallet.take_value(checked_add(v, cfg_.std_fee));
        if (ins.empty()) {
            if (plan.dep_h + 20 < height_) plan.done = true;
            continue;
        }
        values_.reserve_both(v);
        Amount sum;
        for (const auto& u : ins) sum = checked_add(sum, u.value);
        const Amount change = checked_sub(sum, checked_add(v, cfg_.std_fee));
        std::vector<std::pair<Address, Amount>> outs;
        Address change_addr;
        if (!change.is_zero()) {
            change_addr = fresh_address(user.owner);
            user.owned.insert(change_addr);
            outs.emplace_back(change_addr, change);
        }
        const Transaction& dep = emit(std::move(ins), std::move(outs), deposit_js(v),
                                      Party::Other);
        if (!change.is_zero())
            user.wallet.utxos.push_back({dep.txid, 0, change, change_addr});
        user.shielded = checked_add(user.shielded, v);
        user.shielded_reserved = checked_add(user.shielded_reserved, v);
        const std::uint64_t gap = rng_.range(1, cfg_.round_trip_max_gap);
        pending_exits_.push_back({height_ + gap, plan.user, v, dep.txid, height_});
        plan.done = true;
    }
    for (auto& exit : pending_exits_) {
        if (exit.h != height_) continue;
        auto& user = users_[exit.user];
        const Address to = fresh_address(user.owner);
        user.owned.insert(to);
        const Transaction& wd =
            emit({}, {{to, checked_sub(exit.value, cfg_.std_fee)}},
                 {JsSpec{Amount{}, exit.value}}, Party::Other);
        user.wallet.utxos.push_back({wd.txid, 0, checked_sub(exit.value, cfg_.std_fee), to});
        user.shielded = checked_sub(user.shielded, exit.value);
        user.shielded_reserved = checked_sub(user.shielded_reserved, exit.value);
        truth_.round_trips.push_back({exit.value, exit.dep_txid, exit.dep_h, wd.txid, height_,
                                      height_ - exit.dep_h});
    }
    std::erase_if(pending_exits_, [&](const PendingExit& e) { return e.h <= height_; });
}

void Generator::private_step() {
    // fund the hermit's shielded balance once
    if (hermit_.funded_at == UINT64_MAX && !hermit_.wallet.utxos.empty()) {
        hermit_.funded_at = height_;
        auto ins = hermit_.wallet.take_value(Amount::from_zec_int(140));
        if (!ins.empty()) {
            Amount sum;
            for (const auto& u : ins) sum = checked_add(sum, u.value);
            const Amount v = values_.pick_misc(checked_sub(sum, cfg_.std_fee), Side::Deposit);
            emit(std::move(ins), {}, deposit_js(v), Party::Other);
            hermit_.shielded = checked_add(hermit_.shielded, v);
        }
    }
    while (!private_due_.empty() && private_due_.front() <= height_) {
        private_due_.erase(private_due_.begin());
        if (hermit_.shielded.is_zero()) continue; // not funded yet; skip quietly
        std::vector<JsSpec> js{JsSpec{Amount{}, Amount{}}};
        if (rng_.chance(1, 10)) js.push_back(JsSpec{Amount{}, Amount{}});
        emit({}, {}, std::move(js), Party::Other);
    }

    // the prior-receipt decoy is funded straight out of the pool
    for (auto& d : decoys_) {
        if (!d.needs_pool_receipt || d.pool_receipt_done) continue;
        if (d.deposits.empty() || height_ + 30 < d.deposits[0].first) continue;
        if (hermit_.shielded < Amount::from_zec_string("101.5")) continue;
        const Amount v = values_.pick_misc(Amount::from_zec_string("100.0103"),
                                           Side::Withdrawal);
        const Address to = *d.state.owned.begin();
        const Transaction& tx = emit({}, {{to, checked_sub(v, cfg_.std_fee)}},
                                     {JsSpec{Amount{}, v}}, Party::Other);
        d.state.wallet.utxos.push_back({tx.txid, 0, checked_sub(v, cfg_.std_fee), to});
        hermit_.shielded = checked_sub(hermit_.shielded, v);
        d.pool_receipt_done = true;
    }
}

void Generator::tsb_step() {
    auto month_label_now = [&](std::int64_t t) { return utc_month_label(utc_month_index(t)); };
    for (auto& buyer : buyers_) {
        if (buyer.next >= buyer.plan.size()) continue;
        auto [h, amount] = buyer.plan[buyer.next];
        if (height_ < h) continue;
        std::vector<Utxo> ins;
        if (buyer.has_change) {
            ins.push_back(buyer.change);
            buyer.has_change = false;
        }
        Amount have;
        for (const auto& u : ins) have = checked_add(have, u.value);
        const Amount need = checked_add(amount, cfg_.std_fee);
        if (have < need) {
            auto more = buyer.state.wallet.take_value(checked_sub(need, have));
            if (more.empty()) {
                buyer.state.wallet.utxos.insert(buyer.state.wallet.utxos.end(), ins.begin(),
                                                ins.end());
                if (!ins.empty()) buyer.has_change = false;
                continue; // funding not arrived yet; retry
            }
            for (auto& u : more) {
                have = checked_add(have, u.value);
                ins.push_back(std::move(u));
            }
        }
        const Amount change = checked_sub(have, need);
        std::vector<std::pair<Address, Amount>> outs;
        Address change_addr;
        if (!change.is_zero()) {
            change_addr = fresh_address(buyer.actor);
            buyer.state.owned.insert(change_addr);
            outs.emplace_back(change_addr, change);
        }
        const Transaction& tx =
            emit(std::move(ins), std::move(outs), deposit_js(amount), Party::Other);
        buyer.truth->months.push_back(month_label_now(tx.block_time));
        buyer.truth->deposit_txids.push_back(tx.txid);
        if (!change.is_zero()) {
            buyer.change = {tx.txid, 0, change, change_addr};
            buyer.has_change = true;
        }
        ++buyer.next;
        if (buyer.next < buyer.plan.size()) {
            // top-up for the next month, co-spent with this month's change
            const Amount next_need =
                checked_add(buyer.plan[buyer.next].second,
                            checked_add(cfg_.std_fee, Amount::from_zec_string("0.01")));
            const Address to = fresh_address(buyer.actor);
            buyer.state.owned.insert(to);
            const std::uint64_t when =
                buyer.plan[buyer.next].first > height_ + 20 ? buyer.plan[buyer.next].first - 15
                                                            : height_ + 1;
            fund_queue_.push_back({when, to, next_need, &buyer.state.wallet});
        }
    }

    for (auto& d : decoys_) {
        // churn traffic for the activity decoy: many tiny self-transfers
        if (d.churn_left > 0 && !d.state.wallet.utxos.empty()) {
            for (int k = 0; k < 6 && d.churn_left > 0; ++k, --d.churn_left) {
                auto ins = d.state.wallet.take_count(1);
                if (ins.empty()) break;
                const Amount sum = ins.front().value;
                if (sum <= cfg_.std_fee) break;
                const Address& self = *d.state.owned.begin();
                const Transaction& tx =
                    emit(std::move(ins), {{self, checked_sub(sum, cfg_.std_fee)}}, {});
                d.state.wallet.utxos.push_back(
                    {tx.txid, 0, checked_sub(sum, cfg_.std_fee), self});
            }
            continue; // deposit only after churn completes
        }
        if (d.next >= d.deposits.size()) continue;
        auto [h, amount] = d.deposits[d.next];
        if (height_ < h) continue;
        auto ins = d.state.wallet.take_value(checked_add(amount, cfg_.std_fee));
        if (ins.empty()) continue;
        Amount sum;
        for (const auto& u : ins) sum = checked_add(sum, u.value);
        const Amount change = checked_sub(sum, checked_add(amount, cfg_.std_fee));
        std::vector<std::pair<Address, Amount>> outs;
        const Address& self = *d.state.owned.begin();
        if (!change.is_zero()) outs.emplace_back(self, change);
        const Transaction& tx = emit(std::move(ins), std::move(outs), deposit_js(amount),
                                     Party::Other);
        if (!change.is_zero())
            d.state.wallet.utxos.push_back({tx.txid, 0, change, self});
        ++d.next;
    }
}

void Generator::finalize(SynthOutput& out) {
    truth_.blocks = chain_.size();
    std::uint64_t txs = 0;
    for (const auto& b : chain_) txs += b.txs.size();
    truth_.txs = txs;
    truth_.pool_per_block.reserve(chain_.size());
    for (std::uint64_t h = 0; h < chain_.size(); ++h)
        truth_.pool_per_block.emplace_back(pool_dep_[h], pool_wd_[h]);

    std::vector<const Block*> ptrs;
    ptrs.reserve(chain_.size());
    for (const auto& b : chain_) ptrs.push_back(&b);
    truth_.digest = chain_digest(ptrs);
    truth_.round_trip_gap = std::max<std::uint64_t>(100, cfg_.round_trip_max_gap);

    // cross-check: unique-value links over the emitted chain must equal the
    // planted list (value discipline guarantees it; a mismatch is a bug here)
    std::map<std::uint64_t, std::vector<const Transaction*>> deps, wds;
    for (const auto& b : chain_) {
        for (const auto& tx : b.txs) {
            Amount d = pool_deposit(tx), w = pool_withdrawal(tx);
            if (!d.is_zero()) deps[d.zat].push_back(&tx);
            if (!w.is_zero()) wds[w.zat].push_back(&tx);
        }
    }
    std::set<std::pair<std::string, std::string>> brute;
    for (const auto& [zat, dtxs] : deps) {
        if (dtxs.size() != 1) continue;
        auto it = wds.find(zat);
        if (it == wds.end() || it->second.size() != 1) continue;
        const auto* d = dtxs.front();
        const auto* w = it->second.front();
        if (w->block_height <= d->block_height) continue;
        if (w->block_height - d->block_height > truth_.round_trip_gap) continue;
        brute.insert({d->txid, w->txid});
    }
    std::set<std::pair<std::string, std::string>> planted;
    for (const auto& t : truth_.round_trips) planted.insert({t.deposit_txid, t.withdrawal_txid});
    if (brute != planted)
        throw IntegrityError("generator invariant broken: incidental unique-value link");

    // planted buyers and decoys that never managed to deposit are dropped
    std::erase_if(truth_.buyers,
                  [](const GroundTruth::BuyerTruth& b) { return b.deposit_txids.empty(); });

    out.chain = std::move(chain_);
    out.truth = std::move(truth_);
}

SynthOutput Generator::run() {
    cfg_.validate();
    setup();
    for (std::uint64_t h = 0; h < cfg_.blocks; ++h) {
        begin_block(h);
        coingen_step();
        founder_step();
        pool_step();
        solo_step();
        exchange_step();
        user_step();
        roundtrip_step();
        private_step();
        tsb_step();
        end_block();
    }
    SynthOutput out;
    finalize(out);
    return out;
}

} // namespace

SynthOutput generate(const ScenarioConfig& config) {
    Generator gen(config);
    return gen.run();
}

// ---------------------------------------------------------------------------
// manifest (de)serialization
// ---------------------------------------------------------------------------

using nlohmann::json;

namespace {

std::optional<Party> party_from_string(const std::string& s) {
    for (auto p : {Party::Founder, Party::Miner, Party::Other})
        if (s == to_string(p)) return p;
    return std::nullopt;
}

json pairs_to_json(const std::vector<std::pair<std::string, std::string>>& v) {
    json arr = json::array();
    for (const auto& [a, b] : v) arr.push_back({{"address", a}, {"name", b}});
    return arr;
}

std::vector<std::pair<std::string, std::string>> pairs_from_json(const json& arr) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : arr)
        out.emplace_back(e.at("address").get<std::string>(), e.at("name").get<std::string>());
    return out;
}

} // namespace

json GroundTruth::to_json() const {
    json j;
    j["schema"] = "zana-manifest-v1";
    j["digest"] = digest;
    j["blocks"] = blocks;
    j["txs"] = txs;
    json kinds;
    for (std::size_t i = 0; i < kTxKindCount; ++i)
        kinds[to_string(static_cast<TxKind>(i))] = kind_counts[i];
    j["kind_counts"] = std::move(kinds);
    j["tx_fees"] = json(std::map<std::string, std::uint64_t>(tx_fees.begin(), tx_fees.end()));
    json parties;
    for (const auto& [txid, p] : tx_party) parties[txid] = to_string(p);
    j["tx_party"] = std::move(parties);
    j["pool_payout_txids"] = pool_payout_txids;
    j["address_owner"] =
        json(std::map<std::string, std::string>(address_owner.begin(), address_owner.end()));
    json flows = json::array();
    for (const auto& [d, w] : pool_per_block)
        flows.push_back({{"deposited_zat", d.zat}, {"withdrawn_zat", w.zat}});
    j["pool_per_block"] = std::move(flows);
    json trips = json::array();
    for (const auto& t : round_trips)
        trips.push_back({{"value_zat", t.value.zat},
                         {"deposit_txid", t.deposit_txid},
                         {"deposit_height", t.deposit_height},
                         {"withdrawal_txid", t.withdrawal_txid},
                         {"withdrawal_height", t.withdrawal_height},
                         {"gap", t.gap}});
    j["round_trips"] = std::move(trips);
    j["round_trip_gap"] = round_trip_gap;
    j["founder_params"] = founder_params;
    j["pool_tags"] = pairs_to_json(pool_tag_rows);
    j["exchange_tags"] = pairs_to_json(exchange_tag_rows);
    j["service_tags"] = pairs_to_json(service_tag_rows);
    j["change_exclusions"] = change_exclusions;
    json sched = json::array();
    for (const auto& e : schedule.entries)
        sched.push_back({{"month", e.month}, {"amount_zat", e.amount.zat}});
    j["schedule"] = std::move(sched);
    json jbuyers = json::array();
    for (const auto& b : buyers)
        jbuyers.push_back(
            {{"actor", b.actor}, {"months", b.months}, {"deposit_txids", b.deposit_txids}});
    j["tsb_buyers"] = std::move(jbuyers);
    json jdecoys = json::array();
    for (const auto& [actor, why] : decoys)
        jdecoys.push_back({{"actor", actor}, {"violates", why}});
    j["tsb_decoys"] = std::move(jdecoys);
    return j;
}

GroundTruth GroundTruth::from_json(const json& j) {
    GroundTruth t;
    t.digest = j.at("digest").get<std::string>();
    t.blocks = j.at("blocks").get<std::uint64_t>();
    t.txs = j.at("txs").get<std::uint64_t>();
    for (std::size_t i = 0; i < kTxKindCount; ++i)
        t.kind_counts[i] =
            j.at("kind_counts").at(to_string(static_cast<TxKind>(i))).get<std::uint64_t>();
    for (const auto& [txid, fee] : j.at("tx_fees").items())
        t.tx_fees.emplace(txid, fee.get<std::uint64_t>());
    for (const auto& [txid, p] : j.at("tx_party").items()) {
        auto party = party_from_string(p.get<std::string>());
        if (!party) throw ParseError("bad party in manifest for " + txid);
        t.tx_party.emplace(txid, *party);
    }
    t.pool_payout_txids = j.at("pool_payout_txids").get<std::vector<std::string>>();
    for (const auto& [addr, owner] : j.at("address_owner").items())
        t.address_owner.emplace(addr, owner.get<std::string>());
    for (const auto& e : j.at("pool_per_block"))
        t.pool_per_block.emplace_back(Amount{e.at("deposited_zat").get<std::uint64_t>()},
                                      Amount{e.at("withdrawn_zat").get<std::uint64_t>()});
    for (const auto& e : j.at("round_trips"))
        t.round_trips.push_back({Amount{e.at("value_zat").get<std::uint64_t>()},
                                 e.at("deposit_txid").get<std::string>(),
                                 e.at("deposit_height").get<std::uint64_t>(),
                                 e.at("withdrawal_txid").get<std::string>(),
                                 e.at("withdrawal_height").get<std::uint64_t>(),
                                 e.at("gap").get<std::uint64_t>()});
    t.round_trip_gap = j.at("round_trip_gap").get<std::uint64_t>();
    t.founder_params = j.at("founder_params").get<std::vector<std::string>>();
    t.pool_tag_rows = pairs_from_json(j.at("pool_tags"));
    t.exchange_tag_rows = pairs_from_json(j.at("exchange_tags"));
    t.service_tag_rows = pairs_from_json(j.at("service_tags"));
    t.change_exclusions = j.at("change_exclusions").get<std::vector<std::string>>();
    for (const auto& e : j.at("schedule"))
        t.schedule.entries.push_back({e.at("month").get<std::string>(),
                                      Amount{e.at("amount_zat").get<std::uint64_t>()}});
    for (const auto& e : j.at("tsb_buyers"))
        t.buyers.push_back({e.at("actor").get<std::string>(),
                            e.at("months").get<std::vector<std::string>>(),
                            e.at("deposit_txids").get<std::vector<std::string>>()});
    for (const auto& e : j.at("tsb_decoys"))
        t.decoys.emplace_back(e.at("actor").get<std::string>(),
                              e.at("violates").get<std::string>());
    return t;
}

void GroundTruth::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << to_json().dump(1) << '\n';
}

GroundTruth GroundTruth::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("bad manifest: " + std::string(e.what()));
    }
    return from_json(j);
}

void write_scenario(const SynthOutput& output, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_dump_file(output.chain, dir / "chain.jsonl");
    output.truth.save(dir / "manifest.json");

    std::ofstream founders(dir / "founders.txt", std::ios::binary);
    for (const auto& a : output.truth.founder_params) founders << a << '\n';

    std::ofstream pools(dir / "pool_tags.csv", std::ios::binary);
    pools << "address,category,name,source\n";
    for (const auto& [addr, name] : output.truth.pool_tag_rows)
        pools << addr << ",pool," << csv_escape(name) << ",csv\n";

    std::ofstream tags(dir / "tags.csv", std::ios::binary);
    tags << "address,category,name,source\n";
    for (const auto& [addr, name] : output.truth.exchange_tag_rows)
        tags << addr << ",exchange," << csv_escape(name) << ",csv\n";
    for (const auto& [addr, name] : output.truth.service_tag_rows)
        tags << addr << ",service," << csv_escape(name) << ",csv\n";

    std::ofstream excl(dir / "exclusions.txt", std::ios::binary);
    for (const auto& a : output.truth.change_exclusions) excl << a << '\n';

    std::ofstream sched(dir / "schedule.csv", std::ios::binary);
    sched << "month,amount_zec\n";
    for (const auto& e : output.truth.schedule.entries)
        sched << e.month << ',' << e.amount.to_zec_string_trimmed() << '\n';
}

// ---------------------------------------------------------------------------
// evaluation against ground truth
// ---------------------------------------------------------------------------

Evaluation evaluate(const ChainStore& store, const ClusterSet& clusters,
                    const AttributionResult& attribution, const std::vector<RoundTrip>& trips,
                    const GroundTruth& truth) {
    if (store.digest() != truth.digest)
        throw IntegrityError("store digest does not match manifest digest");
    Evaluation eval;

    std::set<std::string> payout_truth(truth.pool_payout_txids.begin(),
                                       truth.pool_payout_txids.end());
    std::set<Address> pool_addrs;
    for (const auto& [addr, name] : truth.pool_tag_rows) pool_addrs.insert(addr);

    for (const auto& block : store.blocks()) {
        for (const auto& tx : block.txs) {
            if (classify_tx(tx) != TxKind::Deshielded) continue;
            const auto truth_it = truth.tx_party.find(tx.txid);
            const bool founder_truth =
                truth_it != truth.tx_party.end() && truth_it->second == Party::Founder;
            const bool quantum = pool_withdrawal(tx) == kFounderWithdrawQuantum;
            if (quantum && founder_truth) ++eval.founder_withdrawals.tp;
            if (quantum && !founder_truth) ++eval.founder_withdrawals.fp;
            if (!quantum && founder_truth) ++eval.founder_withdrawals.fn;

            bool payout_pred = false;
            if (tx.vout.size() > kMinerPayoutFanout)
                for (const auto& out : tx.vout)
                    if (pool_addrs.count(out.address)) {
                        payout_pred = true;
                        break;
                    }
            const bool payout_truth_pos = payout_truth.count(tx.txid) != 0;
            if (payout_pred && payout_truth_pos) ++eval.pool_payouts.tp;
            if (payout_pred && !payout_truth_pos) ++eval.pool_payouts.fp;
            if (!payout_pred && payout_truth_pos) ++eval.pool_payouts.fn;
        }
    }

    std::set<std::pair<std::string, std::string>> predicted, actual;
    for (const auto& t : trips) predicted.insert({t.deposit_txid, t.withdrawal_txid});
    for (const auto& t : truth.round_trips) actual.insert({t.deposit_txid, t.withdrawal_txid});
    for (const auto& p : predicted)
        actual.count(p) ? ++eval.round_trips.tp : ++eval.round_trips.fp;
    for (const auto& a : actual)
        if (!predicted.count(a)) ++eval.round_trips.fn;

    std::uint64_t pure = 0;
    for (std::uint32_t id = 0; id < clusters.cluster_count(); ++id) {
        std::set<std::string> owners;
        for (const auto& addr : clusters.members_of(id)) {
            auto it = truth.address_owner.find(addr);
            owners.insert(it == truth.address_owner.end() ? "?" + addr : it->second);
        }
        if (owners.size() <= 1) ++pure;
    }
    eval.cluster_purity =
        clusters.cluster_count() == 0 ? 1.0 : double(pure) / double(clusters.cluster_count());

    std::uint64_t right = 0;
    for (const auto& [txid, party] : truth.tx_party)
        if (attribution.party_of(txid) == party) ++right;
    eval.attribution_accuracy =
        truth.tx_party.empty() ? 1.0 : double(right) / double(truth.tx_party.size());
    return eval;
}

} // namespace zana
