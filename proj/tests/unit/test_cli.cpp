#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "hetmel/cli.hpp"

using namespace hetmel;
using json = nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli_main(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        std::vector<std::string> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(cell);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_CASE("classify example") {
    const auto r = call({"classify", "--beta1", "0.005", "--beta2", "2", "--omega", "2"});
    REQUIRE(r.code == kExitOk);
    const auto j = json::parse(r.out);
    CHECK(j["classification"] == "SimpleZero");
    CHECK(j["verdict"] == "nonintegrable");
}

TEST_CASE("g-curve example") {
    const auto r = call({"g-curve", "--omega", "2", "--beta2-min", "0.5", "--beta2-max", "3", "--points", "100"});
    REQUIRE(r.code == kExitOk);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() > 2);
    CHECK(rows[0] == std::vector<std::string>{"beta1[1]", "beta2[1]", "abs_G[1]"});
    // beta2 = 2 falls between two samples of the 100-point grid.
    bool bracketed = false;
    for (std::size_t k = 2; k < rows.size(); ++k) {
        const double b2a = std::stod(rows[k - 1][1]), b2b = std::stod(rows[k][1]);
        if (b2a <= 2.0 && b2b >= 2.0) {
            const double b1a = std::stod(rows[k - 1][0]), b1b = std::stod(rows[k][0]);
            const double b1 = b1a + (b1b - b1a) * (2.0 - b2a) / (b2b - b2a);
            CHECK(b1 >= 0.014);
            CHECK(b1 <= 0.016);
            CHECK(b1a >= 0.014);
            CHECK(b1b <= 0.016);
            bracketed = true;
        }
    }
    CHECK(bracketed);
    CHECK(r.err.find("beta2=3") != std::string::npos);
}

TEST_CASE("melnikov example") {
    const auto r = call({"melnikov", "--beta1", "0", "--beta2", "3", "--omega", "2"});
    REQUIRE(r.code == kExitOk);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 65);
    CHECK(rows[0] == std::vector<std::string>{"t0[time]", "M_closed[energy]", "M_direct[energy]"});
    for (std::size_t k = 1; k < rows.size(); ++k) {
        CHECK(std::abs(std::stod(rows[k][1])) < 1e-6);
        CHECK(std::abs(std::stod(rows[k][2])) < 1e-6);
    }
}

TEST_CASE("monodromy and verify commands") {
    const auto m = call({"monodromy", "--beta1", "0", "--beta2", "3", "--omega", "2"});
    REQUIRE(m.code == kExitOk);
    const auto j = json::parse(m.out);
    CHECK(j["commutator_norm"].get<double>() < 1e-9);
    CHECK(j["verdict"] == "inconclusive");

    const auto v = call({"verify", "--beta1", "0", "--beta2", "2", "--omega", "2"});
    CHECK(v.code == kExitOk);
    const auto jv = json::parse(v.out);
    CHECK(jv["pass"] == true);
    bool spectral = false;
    for (const auto& c : jv["checks"]) spectral = spectral || c["name"] == "monodromy_equal_ratio_spectrum";
    CHECK(spectral);
}

TEST_CASE("exit codes") {
    const auto bad = call({"classify", "--beta1", "0", "--beta2", "6", "--omega", "2"});
    CHECK(bad.code == kExitConfig);
    const auto e = json::parse(bad.err);
    CHECK(e["error"] == "parameter");

    CHECK(call({"classify", "--beta1", "0"}).code == kExitConfig);
    CHECK(call({"manifolds", "--beta1", "0.005", "--beta2", "2", "--omega", "2"}).code == kExitConfig);
    CHECK(call({"melnikov", "--beta1", "0.005", "--beta2", "2", "--omega", "2", "--gnuplot"}).code == kExitConfig);
    CHECK(call({"classify", "--omega", "2", "--beta1-range", "0:0.2"}).code == kExitConfig);
    CHECK(call({"nope"}).code == kExitConfig);
    CHECK(call({"--help"}).code == kExitOk);

    const auto num = call({"melnikov", "--beta1", "0.005", "--beta2", "2", "--omega", "2", "--t-limit", "3"});
    CHECK(num.code == kExitNumerical);
    CHECK(json::parse(num.err)["error"] == "numerical");
}

TEST_CASE("sweep range parsing") {
    const auto r = parse_sweep_range("0:0.2:5");
    CHECK(r.lo == 0.0);
    CHECK(r.hi == 0.2);
    CHECK(r.n == 5);
    CHECK_THROWS(parse_sweep_range("0:0.2"));
    CHECK_THROWS(parse_sweep_range("1:0:3"));
    CHECK_THROWS(parse_sweep_range("0:1:3:4"));
}

TEST_CASE("classify sweep keeps input order and is deterministic") {
    const std::vector<std::string> args{"classify", "--omega", "2", "--beta1-range", "0:0.2:5", "--beta2-range", "0.5:3:5"};
    const auto a = call(args), b = call(args);
    REQUIRE(a.code == kExitOk);
    CHECK(a.out == b.out);
    const auto rows = parse_csv(a.out);
    REQUIRE(rows.size() == 26);
    CHECK(rows[1][0] == "0");
    CHECK(rows[1][1] == "0.5");
    CHECK(rows[2][1] == "1.125");
    CHECK(rows[6][0] == "0.050000000000000003");
}

TEST_CASE("file outputs are byte-identical across runs") {
    const auto dir = std::filesystem::temp_directory_path() / "hetmel_cli_test";
    std::filesystem::remove_all(dir);
    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream f(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    };
    for (const char* run : {"a", "b"}) {
        const auto out = (dir / run / "m.csv").string();
        REQUIRE(call({"melnikov", "--beta1", "0.005", "--beta2", "2", "--omega", "2", "-o", out, "--gnuplot"}).code == kExitOk);
    }
    CHECK(slurp(dir / "a" / "m.csv") == slurp(dir / "b" / "m.csv"));
    CHECK(slurp(dir / "a" / "m.gp").find("'m.csv'") != std::string::npos);
    std::filesystem::remove_all(dir);
}
