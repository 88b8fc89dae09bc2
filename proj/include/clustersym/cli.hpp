#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace clustersym {

/// Exit statuses of the command-line front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitInvalid = 2,
    kExitNotConverged = 3,
    kExitVerificationFailed = 4,
};

struct RunConfig {
    /// analyze, steady-state, simulate or synthesize.
    std::string subcommand;
    std::filesystem::path input;
    /// Artifacts go to files in this directory; without it the main JSON
    /// result goes to the output stream.
    std::optional<std::filesystem::path> out_dir;

    double tol = 1e-9;
    std::size_t max_iter = 1'000'000;

    double duration = 50.0;
    double dt = 1e-3;
    std::uint64_t seed = 0;
    /// "zero", "ball:R" (seeded uniform draw from the radius-R ball) or a
    /// comma-separated state vector.
    std::string x0 = "zero";
    double window = 5.0;
    double cluster_tol = 1e-3;
    std::size_t stride = 1;

    int size_a = 2;
    int size_b = 3;
    double value_a = 0.0;
    double value_b = 1.0;
    double slope = 1.0;
    /// Relation literal or model reference, as in network files.
    std::string agent = R"({"named": "identity"})";
};

/// Runs one subcommand and returns its exit status; diagnostics go to err.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses an x0 specification for a closed loop with state_dim states.
std::vector<double> parse_initial_state(const std::string& spec, std::size_t state_dim, std::uint64_t seed);

}  // namespace clustersym
