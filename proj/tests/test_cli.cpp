#include "clustersym/cli.hpp"
#include "clustersym/errors.hpp"

#include <catch_amalgamated.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace clustersym;
using Catch::Approx;
using nlohmann::json;

namespace {

const std::filesystem::path kNetworks = std::filesystem::path(CLUSTERSYM_DATA_DIR) / "networks";

struct Outcome {
    int status = 0;
    std::string out;
    std::string err;
};

Outcome invoke(const RunConfig& config) {
    std::ostringstream out;
    std::ostringstream err;
    Outcome o;
    o.status = run(config, out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

RunConfig command(const std::string& sub, const std::string& file = "") {
    RunConfig c;
    c.subcommand = sub;
    if (!file.empty()) {
        c.input = kNetworks / file;
    }
    return c;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("clustersym_cli_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("analyze reports the exchangeability partition", "[cli]") {
    const Outcome o = invoke(command("analyze", "example2.json"));
    REQUIRE(o.status == kExitOk);
    const json j = json::parse(o.out);
    CHECK(j["exchangeability_partition"] == json::parse("[[1],[2],[3,4,5]]"));
    CHECK(j["weak_automorphisms"].size() == 6);
    CHECK(j["group_closed"] == true);
    CHECK(j["predicted_partition"] == j["exchangeability_partition"]);
}

TEST_CASE("steady-state on the two-node network", "[cli]") {
    const Outcome o = invoke(command("steady-state", "two_node.json"));
    REQUIRE(o.status == kExitOk);
    const json j = json::parse(o.out);
    CHECK(j["y"][0].get<double>() == Approx(2.0 / 3.0).margin(1e-6));
    CHECK(j["y"][1].get<double>() == Approx(1.0 / 3.0).margin(1e-6));
    CHECK(j["residual"].get<double>() <= 1e-9);
}

TEST_CASE("invalid options exit with status 2", "[cli]") {
    RunConfig c = command("simulate", "two_node.json");
    c.dt = -1e-3;
    Outcome o = invoke(c);
    CHECK(o.status == kExitInvalid);
    CHECK(o.out.empty());
    CHECK(o.err.find("--dt") != std::string::npos);

    c = command("steady-state", "missing.json");
    CHECK(invoke(c).status == kExitInvalid);

    c = command("simulate", "two_node.json");
    c.x0 = "1,2,3";
    CHECK(invoke(c).status == kExitInvalid);

    c = command("synthesize");
    c.value_b = c.value_a;
    CHECK(invoke(c).status == kExitInvalid);

    c = command("synthesize");
    c.agent = "{not json";
    CHECK(invoke(c).status == kExitInvalid);

    CHECK(invoke(command("transmogrify", "two_node.json")).status == kExitInvalid);
}

TEST_CASE("solver and detection failures exit with status 3", "[cli]") {
    RunConfig c = command("steady-state", "cycle5_weakly_homogeneous.json");
    c.max_iter = 3;
    const Outcome o = invoke(c);
    CHECK(o.status == kExitNotConverged);
    CHECK(json::parse(o.out)["converged"] == false);

    // the washout agent is still moving after a short horizon
    c = command("simulate", "example2_driven.json");
    c.duration = 6.0;
    c.window = 5.0;
    c.cluster_tol = 1e-12;
    const Outcome moving = invoke(c);
    CHECK(moving.status == kExitNotConverged);
    CHECK(moving.err.find("still move") != std::string::npos);
    CHECK(json::parse(moving.out)["detected_partition"].is_null());
}

TEST_CASE("failed verification exits with status 4", "[cli]") {
    RunConfig c = command("synthesize");
    c.duration = 0.5;
    const Outcome o = invoke(c);
    CHECK(o.status == kExitVerificationFailed);
    CHECK(json::parse(o.out)["report"]["passed"] == false);
}

TEST_CASE("synthesize the two-by-three design", "[cli]") {
    const Outcome o = invoke(command("synthesize"));
    REQUIRE(o.status == kExitOk);
    const json j = json::parse(o.out);
    CHECK(j["report"]["controller"]["a"].get<double>() == 1.0);
    CHECK(j["report"]["controller"]["b"].get<double>() == -1.2);
    CHECK(j["report"]["w"].get<double>() == 0.6);
    CHECK(j["report"]["passed"] == true);
}

TEST_CASE("outputs are deterministic", "[cli]") {
    for (const std::string sub : {"analyze", "steady-state", "simulate"}) {
        RunConfig c = command(sub, "cycle5_weakly_homogeneous.json");
        c.seed = 5;
        c.duration = 20.0;
        c.x0 = "ball:1";
        const Outcome a = invoke(c);
        const Outcome b = invoke(c);
        CHECK(a.status == b.status);
        CHECK(a.out == b.out);
    }

    RunConfig c = command("simulate", "example2.json");
    c.duration = 50.0;
    c.stride = 50;
    c.x0 = "ball:0.5";
    c.seed = 11;
    const auto first = fresh_dir("a");
    const auto second = fresh_dir("b");
    c.out_dir = first;
    const Outcome a = invoke(c);
    c.out_dir = second;
    const Outcome b = invoke(c);
    REQUIRE(a.status == kExitOk);
    CHECK(a.out.empty());
    CHECK(b.status == kExitOk);
    for (const char* name : {"trace.csv", "summary.json"}) {
        INFO(name);
        REQUIRE(std::filesystem::exists(first / name));
        CHECK(read_file(first / name) == read_file(second / name));
    }
    CHECK(read_file(first / "trace.csv").rfind("t,y_1,", 0) == 0);

    RunConfig s = command("synthesize");
    const auto dir = fresh_dir("s");
    s.out_dir = dir;
    REQUIRE(invoke(s).status == kExitOk);
    CHECK(std::filesystem::exists(dir / "network.json"));
    CHECK(std::filesystem::exists(dir / "report.json"));
    std::filesystem::remove_all(first);
    std::filesystem::remove_all(second);
    std::filesystem::remove_all(dir);
}

TEST_CASE("initial state specifications", "[cli]") {
    CHECK(parse_initial_state("zero", 3, 0) == std::vector<double>(3, 0.0));
    CHECK(parse_initial_state("1, -2.5,3", 3, 0) == std::vector<double>{1.0, -2.5, 3.0});
    CHECK(parse_initial_state("", 0, 0).empty());

    const auto a = parse_initial_state("ball:2", 4, 9);
    CHECK(a == parse_initial_state("ball:2", 4, 9));
    CHECK(a != parse_initial_state("ball:2", 4, 10));
    double norm = 0.0;
    for (double x : a) {
        norm += x * x;
    }
    CHECK(std::sqrt(norm) <= 2.0);
    CHECK(parse_initial_state("ball:0", 2, 1) == std::vector<double>(2, 0.0));

    CHECK_THROWS_AS(parse_initial_state("1,2", 3, 0), InvalidOptions);
    CHECK_THROWS_AS(parse_initial_state("1,x,3", 3, 0), InvalidOptions);
    CHECK_THROWS_AS(parse_initial_state("1,nan", 2, 0), InvalidOptions);
    CHECK_THROWS_AS(parse_initial_state("ball:-1", 2, 0), InvalidOptions);
}
