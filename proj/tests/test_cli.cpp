#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include <json.hpp>

#include "convds/io.hpp"
#include "subprocess.hpp"

namespace fs = std::filesystem;
using convds::io::read_file;
using convds::io::write_file;
using testutil::cli_path;
using testutil::run_command;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("convds_test_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string half_pair_csv() { return "offset,re,im\n0,0.5,0\n1,0.5,0\n"; }

}  // namespace

TEST_CASE("cli help lists subcommands and flags") {
    auto res = run_command(cli_path() + " --help");
    CHECK(res.exit_code == 0);
    for (const char* name : {"evolve", "sample", "reconstruct", "diagnose", "frame-bounds",
                             "density", "noise-sweep", "decay"})
        CHECK(res.output.find(name) != std::string::npos);

    auto sub = run_command(cli_path() + " reconstruct --help");
    CHECK(sub.exit_code == 0);
    for (const char* flag : {"--config", "--out", "--threads", "--allow-partial"})
        CHECK(sub.output.find(flag) != std::string::npos);
}

TEST_CASE("cli rejects malformed kernel files with exit 2") {
    TempDir dir("badkernel");
    write_file((dir.path / "kernel.csv").string(), "offset,re\n0,1\n");
    write_file((dir.path / "cfg.json").string(),
               std::string("{\"kernel\": \"") + (dir.path / "kernel.csv").string() +
                   "\", \"m\": 2, \"L\": 1, \"N\": 2, \"grid\": 64, \"out\": \"" +
                   (dir.path / "out").string() + "\"}");
    auto res = run_command(cli_path() + " diagnose --config " + (dir.path / "cfg.json").string());
    CHECK(res.exit_code == 2);
    CHECK(res.output.find("kernel") != std::string::npos);
}

TEST_CASE("cli rejects unknown config fields with exit 2") {
    TempDir dir("unknownfield");
    write_file((dir.path / "kernel.csv").string(), half_pair_csv());
    write_file((dir.path / "cfg.json").string(),
               std::string("{\"kernel\": \"") + (dir.path / "kernel.csv").string() +
                   "\", \"m\": 2, \"L\": 1, \"N\": 2, \"grid\": 64, \"typo_field\": 1, "
                   "\"out\": \"" +
                   (dir.path / "out").string() + "\"}");
    auto res = run_command(cli_path() + " diagnose --config " + (dir.path / "cfg.json").string());
    CHECK(res.exit_code == 2);
    CHECK(res.output.find("typo_field") != std::string::npos);
}

TEST_CASE("cli diagnose emits a PASS verdict for the two-tap kernel") {
    TempDir dir("diagnose");
    write_file((dir.path / "kernel.csv").string(), half_pair_csv());
    write_file((dir.path / "cfg.json").string(),
               std::string("{\"kernel\": \"") + (dir.path / "kernel.csv").string() +
                   "\", \"m\": 2, \"L\": 1, \"N\": 2, \"grid\": 128, \"out\": \"" +
                   (dir.path / "out").string() + "\"}");
    auto res = run_command(cli_path() + " diagnose --config " + (dir.path / "cfg.json").string());
    REQUIRE(res.exit_code == 0);

    auto verdict = nlohmann::json::parse(read_file((dir.path / "out" / "verdict.json").string()));
    CHECK(verdict["verdict"] == "PASS");
    CHECK(verdict["m"] == 2);
    CHECK(verdict["nl"] == 2);
    CHECK(verdict["provenance"]["config_hash"].get<std::string>().size() == 16);

    std::string csv = read_file((dir.path / "out" / "diagnostics.csv").string());
    CHECK(csv.find("omega,sigma_min,sigma_max,gautschi_bound,max_cluster") != std::string::npos);
    CHECK(csv.find("# config_hash=") != std::string::npos);

    auto prov = nlohmann::json::parse(read_file((dir.path / "out" / "provenance.json").string()));
    CHECK(prov["effective_config"].contains("rank_tol"));  // defaults are visible
}

TEST_CASE("cli rank-deficient reconstruction honors --allow-partial") {
    TempDir dir("partial");
    write_file((dir.path / "kernel.csv").string(),
               "offset,re,im\n-2,0.25,0\n0,0.5,0\n2,0.25,0\n");
    // f = delta_0, pattern 2Z, N = 2: samples of the interleaved kernel
    write_file((dir.path / "signal.csv").string(), "index,re,im\n0,1,0\n");
    std::string sample_cfg = std::string("{\"kernel\": \"") +
                             (dir.path / "kernel.csv").string() + "\", \"signal\": \"" +
                             (dir.path / "signal.csv").string() +
                             "\", \"pattern\": {\"periodic\": {\"m\": 2, \"L\": 1}}, "
                             "\"N\": 2, \"window\": {\"lo\": -8, \"hi\": 8}, \"out\": \"" +
                             (dir.path / "out").string() + "\"}";
    write_file((dir.path / "sample.json").string(), sample_cfg);
    REQUIRE(run_command(cli_path() + " sample --config " +
                        (dir.path / "sample.json").string()).exit_code == 0);

    std::string rec_cfg = std::string("{\"kernel\": \"") + (dir.path / "kernel.csv").string() +
                          "\", \"samples\": \"" + (dir.path / "out" / "samples.csv").string() +
                          "\", \"pattern\": {\"periodic\": {\"m\": 2, \"L\": 1}}, \"N\": 2, "
                          "\"signal_window\": {\"lo\": 0, \"hi\": 0}, "
                          "\"sample_window\": {\"lo\": -8, \"hi\": 8}, \"out\": \"" +
                          (dir.path / "rec").string() + "\"}";
    write_file((dir.path / "rec.json").string(), rec_cfg);

    auto strict = run_command(cli_path() + " reconstruct --config " +
                              (dir.path / "rec.json").string());
    CHECK(strict.exit_code == 1);
    auto partial = run_command(cli_path() + " reconstruct --config " +
                               (dir.path / "rec.json").string() + " --allow-partial");
    CHECK(partial.exit_code == 0);
    auto rec = nlohmann::json::parse(
        read_file((dir.path / "rec" / "reconstruction.json").string()));
    CHECK(rec["status"] == "rank-deficient");
    CHECK(!rec["rank_deficient_bins"].empty());
}

TEST_CASE("cli grid override applies only where it makes sense") {
    TempDir dir("gridflag");
    write_file((dir.path / "kernel.csv").string(), half_pair_csv());
    write_file((dir.path / "cfg.json").string(),
               std::string("{\"kernel\": \"") + (dir.path / "kernel.csv").string() +
                   "\", \"signal\": {\"random\": {\"seed\": 4, \"support\": 8}}, "
                   "\"steps\": 1, \"out\": \"" +
                   (dir.path / "out").string() + "\"}");
    auto res = run_command(cli_path() + " evolve --config " + (dir.path / "cfg.json").string() +
                           " --grid 64");
    CHECK(res.exit_code == 2);
}
