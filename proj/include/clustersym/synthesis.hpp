#pragma once

#include "clustersym/network.hpp"
#include "clustersym/simulator.hpp"
#include "clustersym/steady_state.hpp"

#include <string>
#include <vector>

namespace clustersym {

/// Two clusters: block A (vertices 1..size_a) at value_a and block B (the
/// remaining size_b vertices) at value_b.
struct ClusterSpec {
    int size_a = 1;
    int size_b = 1;
    double value_a = 0.0;
    double value_b = 1.0;
    /// Controller gain a > 0.
    double slope = 1.0;
    /// Edge heads on the B side, so zeta_e = value_b - value_a.
    bool heads_on_b = true;
};

struct SynthesisResult {
    Network network;
    /// gamma(x) = gain * x + offset on every edge.
    MonotoneRelation controller;
    double gain = 1.0;
    double offset = 0.0;
    double exogenous = 0.0;
};

/// Complete bipartite graph, one affine controller and one common exogenous
/// input placing the steady state at the requested two-cluster vector.
/// Throws DegenerateTargets (equal values), RelationNotInvertible (k^{-1} empty
/// or set-valued at a target), InvalidOptions (bad sizes or slope).
SynthesisResult synthesize_two_clusters(const Attachment& agent, const ClusterSpec& spec);
SynthesisResult synthesize_two_clusters(const MonotoneRelation& agent, const ClusterSpec& spec);

/// The clustered output vector the synthesis aims for.
std::vector<double> target_outputs(const ClusterSpec& spec);

struct VerifyOptions {
    SolveOptions solve;
    SimulationOptions simulation;
    double window = 5.0;
    double value_tol = 1e-6;
    double residual_tol = 1e-9;
    double cluster_tol = 1e-3;
};

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SynthesisReport {
    std::vector<Check> checks;
    [[nodiscard]] bool passed() const;
};

/// Exchangeability (block sizes), steady state (targets and residual) and
/// simulation (detected clusters at targets). Failures are report entries.
SynthesisReport verify_synthesis(const SynthesisResult& result, const ClusterSpec& spec, const VerifyOptions& opts = {});

}  // namespace clustersym
