#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"

// These tests drive the installed binary through a shell; the harness
// exports GFBM_CLI_BIN with the built executable's path.

namespace {

struct CmdResult {
    int code = -1;
    std::string out;
};

CmdResult run_cli(const std::string& args) {
    const char* bin = std::getenv("GFBM_CLI_BIN");
    if (!bin)
        throw std::runtime_error("GFBM_CLI_BIN not set; run through ctest");
    const std::string cmd = std::string(bin) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    CmdResult r;
    char buf[4096];
    std::size_t got = 0;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) {
        r.out.append(buf, got);
    }
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

const std::string market_flags =
    "--a 1 --b 0.5 --hurst 0.7 --s0 100 --strike 100 --rate 0.05 "
    "--sigma 0.2 --maturity 1";

std::size_t count_crlf(const std::string& text) {
    std::size_t lines = 0, pos = 0;
    while ((pos = text.find("\r\n", pos)) != std::string::npos) {
        ++lines;
        pos += 2;
    }
    return lines;
}

}  // namespace

TEST_CASE("closed-form price over json", "[cli]") {
    const auto r = run_cli("price-bs " + market_flags);
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["model"] == "bs");
    CHECK(j["provenance"] == "formula");
    CHECK(double(j["price"])
          == Catch::Approx(oracle::bs_call_gen).epsilon(1e-12));
    CHECK(double(j["params"]["hurst"]) == 0.7);
    CHECK(double(j["params"]["sigma"]) == 0.2);
    CHECK(j.contains("runtime_ms"));
    CHECK(double(j["runtime_ms"]) >= 0.0);
    CHECK_FALSE(j.contains("std_error"));
}

TEST_CASE("cev price over json", "[cli]") {
    const auto r = run_cli(
        "price-cev --a 1 --b 0.5 --hurst 0.7 --s0 100 --strike 100 "
        "--rate 0.05 --sigma 0.6324555320336759 --maturity 1 --alpha 1.5");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["model"] == "cev");
    CHECK(double(j["price"])
          == Catch::Approx(oracle::cev_call_gen_a15).epsilon(1e-9));
    CHECK(double(j["params"]["alpha"]) == 1.5);
}

TEST_CASE("csv price output is RFC 4180 shaped", "[cli]") {
    const auto r = run_cli("price-bs " + market_flags + " --format csv");
    REQUIRE(r.code == 0);
    CHECK(count_crlf(r.out) == 2);
    CHECK(r.out.substr(0, 6) == "model,");
    // data row starts with the model tag
    const auto second = r.out.find("\r\n") + 2;
    CHECK(r.out.substr(second, 3) == "bs,");
}

TEST_CASE("monte carlo pricing agrees with the closed form", "[cli]") {
    const auto r = run_cli("simulate " + market_flags
                           + " --paths 60000 --steps 64 --seed 9");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["model"] == "bs");
    CHECK(j["provenance"] == "mc");
    const double price = j["price"];
    const double se = j["std_error"];
    CHECK(se > 0.0);
    CHECK(std::fabs(price - oracle::bs_call_gen) <= 4.0 * se);
    CHECK(j["params"]["paths"] == 60000);
    CHECK(j["params"]["seed"] == 9);
}

TEST_CASE("simulation output is reproducible modulo runtime", "[cli]") {
    const std::string cmd = "simulate " + market_flags
                          + " --paths 20000 --steps 64 --seed 31337";
    const auto r1 = run_cli(cmd);
    const auto r2 = run_cli(cmd);
    REQUIRE(r1.code == 0);
    REQUIRE(r2.code == 0);
    auto j1 = nlohmann::json::parse(r1.out);
    auto j2 = nlohmann::json::parse(r2.out);
    j1.erase("runtime_ms");
    j2.erase("runtime_ms");
    CHECK(j1.dump() == j2.dump());

    const auto r3 = run_cli("simulate " + market_flags
                            + " --paths 20000 --steps 64 --seed 31338");
    auto j3 = nlohmann::json::parse(r3.out);
    CHECK(double(j3["price"]) != double(j1["price"]));
}

TEST_CASE("path dump file", "[cli]") {
    const std::string file = "cli_dump_test.csv";
    std::remove(file.c_str());
    const auto r = run_cli("simulate " + market_flags
                           + " --paths 4 --steps 8 --seed 5 --dump-paths "
                           + file);
    REQUIRE(r.code == 0);
    std::ifstream f(file, std::ios::binary);
    REQUIRE(f.good());
    std::stringstream ss;
    ss << f.rdbuf();
    const std::string text = ss.str();
    CHECK(count_crlf(text) == 5);  // header plus four paths
    CHECK(text.substr(0, 5) == "0.125");
    std::remove(file.c_str());
}

TEST_CASE("density table in csv", "[cli]") {
    const auto r = run_cli("density " + market_flags
                           + " --s-min 40 --s-max 250 --points 200 "
                             "--format csv");
    REQUIRE(r.code == 0);
    CHECK(count_crlf(r.out) == 202);  // header, 200 rows, mass row
    CHECK(r.out.substr(0, 11) == "s,density\r\n");
    const auto tail = r.out.rfind("mass,");
    REQUIRE(tail != std::string::npos);
    const double mass = std::stod(r.out.substr(tail + 5));
    CHECK(mass == Catch::Approx(1.0).margin(5e-3));
}

TEST_CASE("density table in json", "[cli]") {
    const auto r = run_cli("density " + market_flags
                           + " --s-min 40 --s-max 250 --points 64");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["model"] == "bs-density");
    CHECK(j["s"].size() == 64);
    CHECK(j["density"].size() == 64);
    CHECK(double(j["mass"]) == Catch::Approx(1.0).margin(5e-3));

    const auto rc = run_cli("density " + market_flags
                            + " --alpha 1.5 --s-min 40 --s-max 250 "
                              "--points 64");
    REQUIRE(rc.code == 0);
    const auto jc = nlohmann::json::parse(rc.out);
    CHECK(jc["model"] == "cev-density");
}

TEST_CASE("validation suites pass and report", "[cli]") {
    const auto r = run_cli("validate --suite reductions");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    REQUIRE(j["suites"].size() == 1);
    CHECK(j["suites"][0]["name"] == "reductions");
    CHECK(j["suites"][0]["pass"] == true);
    CHECK(double(j["suites"][0]["worst"]) <= 1e-12);
    CHECK(j["pass"] == true);

    const auto ra = run_cli("validate --format csv");
    REQUIRE(ra.code == 0);
    CHECK(count_crlf(ra.out) == 5);  // header plus four suites
    CHECK(ra.out.find("reductions,") != std::string::npos);
    CHECK(ra.out.find("parity,") != std::string::npos);
    CHECK(ra.out.find("fail") == std::string::npos);
}

TEST_CASE("usage and domain errors exit with one", "[cli]") {
    CHECK(run_cli("price-bs --hurst 0.7").code == 1);       // missing market
    CHECK(run_cli("price-bs --nonsense 1").code == 1);      // unknown flag
    CHECK(run_cli("").code == 1);                           // no subcommand
    const auto r = run_cli(
        "price-bs --a 1 --b 0 --hurst 0.7 --s0 100 --strike 100 "
        "--sigma -0.2 --maturity 1");
    CHECK(r.code == 1);  // domain error from validation
    // cev step floor propagates as a domain error
    const auto r2 = run_cli("simulate " + market_flags
                            + " --model cev --alpha 1.5 --paths 100 "
                              "--steps 16 --seed 1");
    CHECK(r2.code == 1);
}
