#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

std::string bin() {
    const char* path = std::getenv("ZANA_BIN");
    REQUIRE(path);
    return path;
}

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& args) {
    const fs::path out_file = fs::temp_directory_path() / "zana_cli_out.txt";
    const std::string cmd = bin() + " " + args + " >" + out_file.string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WEXITSTATUS(status), ss.str()};
}

std::string value_of(const std::string& out, const std::string& key) {
    std::istringstream ss(out);
    std::string k, v;
    while (ss >> k >> v)
        if (k == key) return v;
    return {};
}

fs::path work_dir() {
    auto dir = fs::temp_directory_path() / "zana_cli_work";
    return dir;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("cli pipeline: synth, import, check, report") {
    const auto dir = work_dir();
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string scen = (dir / "scen").string();
    const std::string store = (dir / "store").string();

    // a small scenario keeps the CLI suite quick
    {
        std::ofstream cfg(dir / "scenario.cfg");
        cfg << "blocks=400\nusers=4\nround_trips=4\nprivate_txs=3\n";
    }
    auto synth = run("synth --scenario " + (dir / "scenario.cfg").string() + " --seed 5 --out-dir " +
                     scen);
    CHECK(synth.exit_code == 0);
    const std::string digest = value_of(synth.out, "digest");
    CHECK(digest.size() == 64);

    auto import = run("--store " + store + " import --dump " + scen + "/chain.jsonl");
    CHECK(import.exit_code == 0);
    CHECK(value_of(import.out, "digest") == digest);
    CHECK(value_of(import.out, "blocks_ingested") == "400");

    // importing the same dump again adds nothing and keeps the digest
    auto again = run("--store " + store + " import --dump " + scen + "/chain.jsonl");
    CHECK(again.exit_code == 0);
    CHECK(value_of(again.out, "blocks_ingested") == "0");
    CHECK(value_of(again.out, "digest") == digest);

    auto resolve = run("--store " + store + " resolve");
    CHECK(resolve.exit_code == 0);
    CHECK(value_of(resolve.out, "inputs_unresolvable") == "0");

    auto check = run("--store " + store + " check");
    CHECK(check.exit_code == 0);
    CHECK(value_of(check.out, "supply_equation") == "balanced");

    auto report = run("--store " + store + " report --out " + (dir / "rep").string() +
                      " --founders " + scen + "/founders.txt --tags " + scen +
                      "/pool_tags.csv --tags " + scen + "/tags.csv --schedule " + scen +
                      "/schedule.csv --exclusions " + scen + "/exclusions.txt");
    CHECK(report.exit_code == 0);
    for (const char* name :
         {"kinds.csv", "pool_series.csv", "clusters.csv", "attribution.csv", "coverage.csv",
          "round_trips.csv", "linked_curve.csv", "anonymity.csv", "founder_report.csv",
          "tsb_monthly.csv"})
        CHECK(fs::exists(dir / "rep" / name));

    // identical run config on the identical store: byte-identical bundle
    auto report2 = run("--store " + store + " report --out " + (dir / "rep2").string() +
                       " --founders " + scen + "/founders.txt --tags " + scen +
                       "/pool_tags.csv --tags " + scen + "/tags.csv --schedule " + scen +
                       "/schedule.csv --exclusions " + scen + "/exclusions.txt");
    CHECK(report2.exit_code == 0);
    for (const auto& entry : fs::directory_iterator(dir / "rep"))
        CHECK(read_file(entry.path()) ==
              read_file(dir / "rep2" / entry.path().filename()));

    // the emitted report agrees with the generator's manifest
    nlohmann::json manifest;
    std::ifstream(dir / "scen" / "manifest.json") >> manifest;
    std::map<std::string, std::string> predicted;
    {
        std::ifstream in(dir / "rep" / "attribution.csv");
        std::string line;
        std::getline(in, line); // header
        while (std::getline(in, line)) {
            std::stringstream row(line);
            std::string txid, kind, category;
            std::getline(row, txid, ',');
            std::getline(row, kind, ',');
            std::getline(row, category, ',');
            predicted[txid] = category;
        }
    }
    for (const auto& [txid, party] : manifest.at("tx_party").items())
        CHECK(predicted.at(txid) == party.get<std::string>());
    std::set<std::pair<std::string, std::string>> trips_want, trips_got;
    for (const auto& t : manifest.at("round_trips"))
        trips_want.insert({t.at("deposit_txid").get<std::string>(),
                           t.at("withdrawal_txid").get<std::string>()});
    {
        std::ifstream in(dir / "rep" / "round_trips.csv");
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            std::stringstream row(line);
            std::string value, dep, dep_h, wd;
            std::getline(row, value, ',');
            std::getline(row, dep, ',');
            std::getline(row, dep_h, ',');
            std::getline(row, wd, ',');
            trips_got.insert({dep, wd});
        }
    }
    CHECK(trips_got == trips_want);
}

TEST_CASE("cli link monotonicity in the block interval") {
    const auto dir = work_dir(); // reuses the pipeline test's store
    const std::string store = (dir / "store").string();
    REQUIRE(fs::exists(dir / "store"));

    auto narrow = run("--store " + store + " link --out " + (dir / "l1").string() +
                      " --max-gap 1");
    auto wide = run("--store " + store + " link --out " + (dir / "l2").string() +
                    " --max-gap 100");
    CHECK(narrow.exit_code == 0);
    CHECK(wide.exit_code == 0);
    const auto narrow_count = std::stoull(value_of(narrow.out, "round_trips"));
    const auto wide_count = std::stoull(value_of(wide.out, "round_trips"));
    CHECK(narrow_count <= wide_count);
    const double narrow_value = std::stod(value_of(narrow.out, "linked_value_zec"));
    const double wide_value = std::stod(value_of(wide.out, "linked_value_zec"));
    CHECK(narrow_value <= wide_value);
}

TEST_CASE("cli accepts a key=value config file with flag overrides") {
    const auto dir = work_dir();
    REQUIRE(fs::exists(dir / "store"));
    std::ofstream(dir / "cli.cfg") << "store=" << (dir / "store").string() << "\n";
    auto check = run("--config " + (dir / "cli.cfg").string() + " check");
    CHECK(check.exit_code == 0);
    // a flag on the command line overrides the file
    auto overridden = run("--config " + (dir / "cli.cfg").string() + " --store " +
                          (dir / "no_such_store").string() + " check");
    CHECK(overridden.exit_code == 2);
}

TEST_CASE("cli error paths use the documented exit codes") {
    const auto dir = work_dir();
    // usage error: unknown subcommand
    CHECK(run("frobnicate").exit_code == 1);
    // data error: report on an empty store
    auto empty = run("--store " + (dir / "empty_store").string() + " report --out " +
                     (dir / "empty_rep").string());
    CHECK(empty.exit_code == 2);
    // data error: import of a missing dump
    auto missing = run("--store " + (dir / "s2").string() + " import --dump /no/such/file");
    CHECK(missing.exit_code == 2);
    // a held writer lock blocks import
    fs::create_directories(dir / "locked_store");
    std::ofstream(dir / "locked_store" / "write.lock") << "";
    auto locked = run("--store " + (dir / "locked_store").string() + " import --dump " +
                      (dir / "scen" / "chain.jsonl").string());
    CHECK(locked.exit_code == 2);
    fs::remove(dir / "locked_store" / "write.lock");
}

TEST_CASE("cli tsb scan surfaces candidates") {
    const auto dir = work_dir();
    const std::string store = (dir / "store").string();
    const std::string scen = (dir / "scen").string();
    REQUIRE(fs::exists(dir / "store"));
    auto tsb = run("--store " + store + " tsb --out " + (dir / "tsb").string() + " --founders " +
                   scen + "/founders.txt --tags " + scen + "/pool_tags.csv --schedule " + scen +
                   "/schedule.csv --exclusions " + scen + "/exclusions.txt");
    CHECK(tsb.exit_code == 0);
    // the 400-block scenario ends before the schedule months: zero candidates
    CHECK(value_of(tsb.out, "flagged_clusters") == "0");
}
