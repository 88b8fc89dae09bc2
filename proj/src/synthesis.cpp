#include "clustersym/synthesis.hpp"

#include "clustersym/errors.hpp"
#include "clustersym/network_io.hpp"
#include "clustersym/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace clustersym {

namespace {

double inverse_at(const MonotoneRelation& k, double y) {
    const Interval pre = k.inverse().evaluate(y);
    if (pre.is_empty()) {
        throw RelationNotInvertible("the agent relation never outputs " + std::to_string(y));
    }
    if (!pre.is_point()) {
        throw RelationNotInvertible("the agent relation is flat at output " + std::to_string(y));
    }
    return pre.lo;
}

std::string format(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

}  // namespace

std::vector<double> target_outputs(const ClusterSpec& spec) {
    std::vector<double> y(static_cast<std::size_t>(spec.size_a), spec.value_a);
    y.resize(static_cast<std::size_t>(spec.size_a + spec.size_b), spec.value_b);
    return y;
}

SynthesisResult synthesize_two_clusters(const Attachment& agent, const ClusterSpec& spec) {
    if (spec.size_a < 1 || spec.size_b < 1) {
        throw InvalidOptions("cluster sizes must be positive");
    }
    if (!(spec.slope > 0.0) || !std::isfinite(spec.slope)) {
        throw InvalidOptions("controller slope must be positive and finite");
    }
    if (!std::isfinite(spec.value_a) || !std::isfinite(spec.value_b)) {
        throw InvalidOptions("cluster values must be finite");
    }
    if (spec.value_a == spec.value_b) {
        throw DegenerateTargets("equal cluster values ask for consensus, not clustering");
    }
    const double ka = inverse_at(agent.relation, spec.value_a);
    const double kb = inverse_at(agent.relation, spec.value_b);
    const double na = spec.size_a;
    const double nb = spec.size_b;
    const double total = na + nb;
    const double s = spec.heads_on_b ? 1.0 : -1.0;
    const double delta = spec.value_b - spec.value_a;

    // Per-block steady-state equations
    //   k^{-1}(yA) = w + s nB gamma(s delta),  k^{-1}(yB) = w - s nA gamma(s delta)
    // fix gamma(s delta) and w; each is formed with a single division.
    const double w = (na * ka + nb * kb) / total;
    const double b = s * (ka - kb - spec.slope * delta * total) / total;

    Graph g = Graph::complete_bipartite(spec.size_a, spec.size_b);
    if (!spec.heads_on_b) {
        std::vector<Edge> flipped;
        for (const Edge& e : g.edges()) {
            flipped.push_back({e.tail, e.head});
        }
        g = Graph(g.vertex_count(), std::move(flipped));
    }
    const DynamicModel ctrl = make_builtin_model("static_affine", {{"a", spec.slope}, {"b", b}});
    const nlohmann::json ctrl_literal = {{"affine", {{"a", spec.slope}, {"b", b}}}};
    std::vector<Attachment> agents(static_cast<std::size_t>(g.vertex_count()), agent);
    std::vector<Attachment> controllers(static_cast<std::size_t>(g.edge_count()),
                                        Attachment::from_model(ctrl, ctrl_literal));
    const Assumption assumption =
        agent.relation.strictly_monotone() ? Assumption::OutputStrictAgents : Assumption::OutputStrictControllers;
    Network net(std::move(g), std::move(agents), std::move(controllers),
                std::vector<double>(static_cast<std::size_t>(spec.size_a + spec.size_b), w), assumption);
    return SynthesisResult{std::move(net), MonotoneRelation::affine(spec.slope, b), spec.slope, b, w};
}

SynthesisResult synthesize_two_clusters(const MonotoneRelation& agent, const ClusterSpec& spec) {
    return synthesize_two_clusters(Attachment::from_relation(agent, relation_to_json(agent)), spec);
}

bool SynthesisReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

SynthesisReport verify_synthesis(const SynthesisResult& result, const ClusterSpec& spec, const VerifyOptions& opts) {
    SynthesisReport report;
    const Network& net = result.network;
    const std::vector<double> target = target_outputs(spec);
    std::vector<int> block_a(static_cast<std::size_t>(spec.size_a));
    std::vector<int> block_b(static_cast<std::size_t>(spec.size_b));
    for (int i = 0; i < spec.size_a; ++i) {
        block_a[static_cast<std::size_t>(i)] = i;
    }
    for (int i = 0; i < spec.size_b; ++i) {
        block_b[static_cast<std::size_t>(i)] = spec.size_a + i;
    }
    const Partition expected = make_partition({block_a, block_b});

    {
        Check c{"exchangeability", false, ""};
        try {
            const Partition p = exchangeability_partition(net);
            c.passed = p.blocks == expected.blocks;
            c.detail = std::to_string(p.blocks.size()) + " orbit(s)";
        } catch (const Error& e) {
            c.detail = e.what();
        }
        report.checks.push_back(std::move(c));
    }

    {
        Check c{"steady_state", false, ""};
        try {
            const SteadyState ss = solve(net, opts.solve);
            double err = 0.0;
            for (std::size_t i = 0; i < target.size(); ++i) {
                err = std::max(err, std::abs(ss.y[i] - target[i]));
            }
            c.passed = err <= opts.value_tol && ss.residual <= opts.residual_tol;
            c.detail = "max |y - target| = " + format(err) + ", residual = " + format(ss.residual);
        } catch (const Error& e) {
            c.detail = e.what();
        }
        report.checks.push_back(std::move(c));
    }

    {
        Check c{"simulation", false, ""};
        try {
            const Trace trace = simulate(net, opts.simulation);
            const DetectedClusters found = detect_clusters(trace, opts.window, opts.cluster_tol);
            double err = 0.0;
            for (std::size_t i = 0; i < target.size(); ++i) {
                err = std::max(err, std::abs(found.means[i] - target[i]));
            }
            c.passed = found.partition.blocks == expected.blocks && err <= opts.cluster_tol;
            c.detail = std::to_string(found.partition.blocks.size()) + " cluster(s), max |y - target| = " + format(err);
        } catch (const Error& e) {
            c.detail = e.what();
        }
        report.checks.push_back(std::move(c));
    }
    return report;
}

}  // namespace clustersym
