#include "clustersym/cli.hpp"

#include "clustersym/errors.hpp"
#include "clustersym/network_io.hpp"
#include "clustersym/simulator.hpp"
#include "clustersym/steady_state.hpp"
#include "clustersym/symmetry.hpp"
#include "clustersym/synthesis.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

namespace clustersym {

namespace {

using nlohmann::json;

json partition_to_json(const Partition& p) {
    json blocks = json::array();
    for (const auto& b : p.blocks) {
        json ids = json::array();
        for (int v : b) {
            ids.push_back(v + 1);
        }
        blocks.push_back(std::move(ids));
    }
    return blocks;
}

json common_input_json(const Network& net) {
    if (!net.random_input()) {
        return nullptr;
    }
    return {{"seed", net.random_input()->seed}, {"value", net.random_input()->value}};
}

void append_number(std::string& s, double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    s.append(buf, res.ptr);
}

std::string trace_csv(const Trace& trace) {
    std::string s = "t";
    const std::size_t n = trace.y.empty() ? 0 : trace.y.front().size();
    const std::size_t m = trace.zeta.empty() ? 0 : trace.zeta.front().size();
    auto columns = [&](const char* name, std::size_t count) {
        for (std::size_t i = 1; i <= count; ++i) {
            s += std::string(",") + name + "_" + std::to_string(i);
        }
    };
    columns("y", n);
    columns("zeta", m);
    columns("u", n);
    columns("mu", m);
    s += '\n';
    for (std::size_t k = 0; k < trace.time.size(); ++k) {
        append_number(s, trace.time[k]);
        for (const auto* rows : {&trace.y, &trace.zeta, &trace.u, &trace.mu}) {
            for (double v : (*rows)[k]) {
                s += ',';
                append_number(s, v);
            }
        }
        s += '\n';
    }
    return s;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw InvalidOptions("cannot write " + path.string());
    }
    f << text;
}

void emit(const RunConfig& config, std::ostream& out, const std::string& name, const json& j) {
    const std::string text = j.dump(2) + "\n";
    if (config.out_dir) {
        write_file(*config.out_dir / name, text);
    } else {
        out << text;
    }
}

void validate(const RunConfig& c) {
    auto positive = [](double x, const char* flag) {
        if (!(x > 0.0) || !std::isfinite(x)) {
            throw InvalidOptions(std::string(flag) + " must be positive");
        }
    };
    positive(c.tol, "--tol");
    positive(static_cast<double>(c.max_iter), "--max-iter");
    positive(c.duration, "--T");
    positive(c.dt, "--dt");
    positive(c.window, "--window");
    positive(c.cluster_tol, "cluster tolerance");
    positive(static_cast<double>(c.stride), "--stride");
    if (c.out_dir) {
        std::error_code ec;
        std::filesystem::create_directories(*c.out_dir, ec);
        if (ec) {
            throw InvalidOptions("cannot create " + c.out_dir->string() + ": " + ec.message());
        }
    }
}

int analyze(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const Network net = load_network(config.input, config.seed);
    AutomorphismSet group = weak_automorphisms(net);
    verify_group(group);
    json images = json::array();
    for (const auto& p : group.elements) {
        json img = json::array();
        for (int v : p.image) {
            img.push_back(v + 1);
        }
        images.push_back(std::move(img));
    }
    const Partition exch = orbit_partition(net.vertex_count(), group);
    json predicted_values = nullptr;
    Partition predicted = predict_clusters(net);
    try {
        predicted = predict_clusters(net, SolveOptions{config.tol, config.max_iter});
        predicted_values = *predicted.values;
    } catch (const Error& e) {
        err << "steady state unavailable: " << e.what() << "\n";
    }
    json j = {{"weak_automorphisms", images},
              {"group_closed", group.closed},
              {"exchangeability_partition", partition_to_json(exch)},
              {"assumption3_holds", assumption3_holds(net)},
              {"weakly_homogeneous", weakly_homogeneous(net)},
              {"predicted_partition", partition_to_json(predicted)},
              {"predicted_values", predicted_values},
              {"common_input", common_input_json(net)}};
    emit(config, out, "analysis.json", j);
    return kExitOk;
}

json steady_state_json(const SteadyState& ss) {
    return {{"y", ss.y},
            {"zeta", ss.zeta},
            {"mu", ss.mu},
            {"u", ss.u},
            {"objective", ss.objective},
            {"residual", ss.residual},
            {"iterations", ss.iterations}};
}

int steady_state(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const Network net = load_network(config.input, config.seed);
    try {
        json j = steady_state_json(solve(net, SolveOptions{config.tol, config.max_iter}));
        j["common_input"] = common_input_json(net);
        emit(config, out, "steady_state.json", j);
        return kExitOk;
    } catch (const NotConverged& e) {
        err << "error: " << e.what() << "\n";
        json j = steady_state_json(e.best());
        j["converged"] = false;
        emit(config, out, "steady_state.json", j);
        return kExitNotConverged;
    }
}

int simulate_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const Network net = load_network(config.input, config.seed);
    SimulationOptions opts;
    opts.duration = config.duration;
    opts.dt = config.dt;
    opts.record_stride = config.stride;
    opts.x0 = parse_initial_state(config.x0, ClosedLoop(net).state_dim(), config.seed);
    const Trace trace = simulate(net, opts);
    if (config.out_dir) {
        write_file(*config.out_dir / "trace.csv", trace_csv(trace));
    }
    json summary = {{"final_residual", residual(net, trace.y.back())}, {"common_input", common_input_json(net)}};
    int status = kExitOk;
    try {
        const DetectedClusters found = detect_clusters(trace, config.window, config.cluster_tol);
        summary["detected_partition"] = partition_to_json(found.partition);
        summary["values"] = *found.partition.values;
        summary["drift"] = found.drift;
    } catch (const NotStationary& e) {
        err << "error: " << e.what() << "\n";
        summary["detected_partition"] = nullptr;
        summary["values"] = nullptr;
        summary["drift"] = nullptr;
        status = kExitNotConverged;
    }
    emit(config, out, "summary.json", summary);
    return status;
}

int synthesize_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
    json agent_literal;
    try {
        agent_literal = json::parse(config.agent);
    } catch (const json::exception& e) {
        throw ParseError(std::string("--agent: ") + e.what());
    }
    const Attachment agent = attachment_from_json(agent_literal);
    ClusterSpec spec;
    spec.size_a = config.size_a;
    spec.size_b = config.size_b;
    spec.value_a = config.value_a;
    spec.value_b = config.value_b;
    spec.slope = config.slope;
    const SynthesisResult result = synthesize_two_clusters(agent, spec);

    VerifyOptions vopts;
    vopts.solve = SolveOptions{config.tol, config.max_iter};
    vopts.simulation.duration = config.duration;
    vopts.simulation.dt = config.dt;
    vopts.window = config.window;
    vopts.cluster_tol = config.cluster_tol;
    const SynthesisReport report = verify_synthesis(result, spec, vopts);

    json checks = json::array();
    for (const Check& c : report.checks) {
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
        if (!c.passed) {
            err << "check " << c.name << " failed: " << c.detail << "\n";
        }
    }
    const json j = {{"controller", {{"a", result.gain}, {"b", result.offset}}},
                    {"w", result.exogenous},
                    {"checks", checks},
                    {"passed", report.passed()}};
    if (config.out_dir) {
        write_file(*config.out_dir / "network.json", serialize_network(result.network));
        emit(config, out, "report.json", j);
    } else {
        emit(config, out, "", {{"network", network_to_json(result.network)}, {"report", j}});
    }
    return report.passed() ? kExitOk : kExitVerificationFailed;
}

}  // namespace

std::vector<double> parse_initial_state(const std::string& spec, std::size_t state_dim, std::uint64_t seed) {
    if (spec.empty() || spec == "zero") {
        return std::vector<double>(state_dim, 0.0);
    }
    auto parse_number = [](std::string_view text) {
        const auto first = text.find_first_not_of(" \t");
        text = first == std::string_view::npos ? std::string_view{} : text.substr(first, text.find_last_not_of(" \t") - first + 1);
        double x = 0.0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
        if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(x)) {
            throw InvalidOptions("--x0: '" + std::string(text) + "' is not a finite number");
        }
        return x;
    };
    if (spec.rfind("ball:", 0) == 0) {
        const double radius = parse_number(std::string_view(spec).substr(5));
        if (!(radius >= 0.0)) {
            throw InvalidOptions("--x0 ball radius must be nonnegative");
        }
        std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
        std::normal_distribution<double> normal;
        std::uniform_real_distribution<double> uniform;
        std::vector<double> x(state_dim);
        double norm = 0.0;
        for (double& xi : x) {
            xi = normal(rng);
            norm += xi * xi;
        }
        norm = std::sqrt(norm);
        const double r = state_dim == 0 ? 0.0 : radius * std::pow(uniform(rng), 1.0 / static_cast<double>(state_dim));
        for (double& xi : x) {
            xi = norm > 0.0 ? xi / norm * r : 0.0;
        }
        return x;
    }
    std::vector<double> x;
    std::string_view rest(spec);
    while (true) {
        const auto comma = rest.find(',');
        x.push_back(parse_number(rest.substr(0, comma)));
        if (comma == std::string_view::npos) {
            break;
        }
        rest.remove_prefix(comma + 1);
    }
    if (x.size() != state_dim) {
        throw InvalidOptions("--x0 has " + std::to_string(x.size()) + " entries, the closed loop has " +
                             std::to_string(state_dim) + " states");
    }
    return x;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        validate(config);
        if (config.subcommand == "analyze") {
            return analyze(config, out, err);
        }
        if (config.subcommand == "steady-state") {
            return steady_state(config, out, err);
        }
        if (config.subcommand == "simulate") {
            return simulate_command(config, out, err);
        }
        if (config.subcommand == "synthesize") {
            return synthesize_command(config, out, err);
        }
        err << "error: unknown subcommand '" << config.subcommand << "'\n";
        return kExitInvalid;
    } catch (const NotConverged& e) {
        err << "error: " << e.what() << "\n";
        return kExitNotConverged;
    } catch (const Infeasible& e) {
        err << "error: " << e.what() << "\n";
        return kExitNotConverged;
    } catch (const NotStationary& e) {
        err << "error: " << e.what() << "\n";
        return kExitNotConverged;
    } catch (const AlgebraicLoopDiverged& e) {
        err << "error: " << e.what() << "\n";
        return kExitNotConverged;
    } catch (const NonFiniteState& e) {
        err << "error: " << e.what() << "\n";
        return kExitNotConverged;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace clustersym
