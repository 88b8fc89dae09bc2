#include "clustersym/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

void pair_option(CLI::App& app, const std::string& name, std::vector<std::string>& raw, const std::string& help) {
    app.add_option(name, raw, help)->delimiter(',')->expected(2);
}

}  // namespace

int main(int argc, char** argv) {
    clustersym::RunConfig config;
    std::string out_dir;
    std::vector<std::string> sizes;
    std::vector<std::string> values;

    CLI::App app{"Symmetry-based cluster analysis of diffusively coupled networks"};
    app.require_subcommand(1);

    auto* analyze = app.add_subcommand("analyze", "weak automorphisms, exchangeability partition, predicted clusters");
    auto* steady = app.add_subcommand("steady-state", "solve the network steady-state equation");
    auto* simulate = app.add_subcommand("simulate", "integrate the closed loop and detect clusters");
    auto* synthesize = app.add_subcommand("synthesize", "design a two-cluster network and verify it");

    for (auto* sub : {analyze, steady, simulate}) {
        sub->add_option("network", config.input, "network description file")->required();
        sub->add_option("--seed", config.seed, "seed for the common random input and random initial states");
    }
    for (auto* sub : {analyze, steady, simulate, synthesize}) {
        sub->add_option("--out", out_dir, "directory for the output files");
    }
    for (auto* sub : {analyze, steady, synthesize}) {
        sub->add_option("--tol", config.tol, "solver tolerance");
        sub->add_option("--max-iter", config.max_iter, "solver iteration limit");
    }
    for (auto* sub : {simulate, synthesize}) {
        sub->add_option("--T", config.duration, "simulated duration");
        sub->add_option("--dt", config.dt, "integration step");
        sub->add_option("--window", config.window, "averaging window for cluster detection");
    }
    simulate->add_option("--tol", config.cluster_tol, "cluster and stationarity tolerance");
    simulate->add_option("--x0", config.x0, "zero, ball:R or a comma-separated initial state");
    simulate->add_option("--stride", config.stride, "record every k-th step");
    synthesize->add_option("--cluster-tol", config.cluster_tol, "tolerance of the simulated cluster check");

    pair_option(*synthesize, "--sizes", sizes, "cluster sizes nA,nB");
    pair_option(*synthesize, "--values", values, "cluster values yA,yB");
    synthesize->add_option("--slope", config.slope, "controller gain");
    synthesize->add_option("--agent", config.agent, "agent relation literal or model reference (JSON)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return clustersym::kExitInvalid;
    }

    try {
        if (!sizes.empty()) {
            config.size_a = std::stoi(sizes[0]);
            config.size_b = std::stoi(sizes[1]);
        }
        if (!values.empty()) {
            config.value_a = std::stod(values[0]);
            config.value_b = std::stod(values[1]);
        }
    } catch (const std::exception&) {
        std::cerr << "error: --sizes and --values take two comma-separated numbers\n";
        return clustersym::kExitInvalid;
    }

    config.subcommand = app.get_subcommands().front()->get_name();
    if (!out_dir.empty()) {
        config.out_dir = out_dir;
    }
    return clustersym::run(config, std::cout, std::cerr);
}
