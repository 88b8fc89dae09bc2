#include "clustersym/errors.hpp"
#include "clustersym/network_io.hpp"
#include "clustersym/steady_state.hpp"
#include "clustersym/symmetry.hpp"

#include "generators.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <random>

using namespace clustersym;
using Catch::Approx;

namespace {

const std::filesystem::path kNetworks = std::filesystem::path(CLUSTERSYM_DATA_DIR) / "networks";

Network homogeneous_cycle(double c) {
    const auto id = Attachment::from_relation(MonotoneRelation::identity());
    return Network(Graph::cycle(5), std::vector<Attachment>(5, id), std::vector<Attachment>(5, id),
                   std::vector<double>(5, c), Assumption::OutputStrictAgents);
}

}  // namespace

TEST_CASE("assembled potentials", "[steady]") {
    const Network two = load_network(kNetworks / "two_node.json");
    const Potentials p = assemble(two);
    const PwqFunction& k = p.agent[0];
    for (double y : {-1.5, 0.0, 0.7}) {
        CHECK(p.agent_conjugate[0](y) == Approx(0.5 * y * y).margin(1e-12));
        const double grid = oracle::grid_conjugate([&](double x) { return k(x); }, y, -5, 5, 1e-4);
        CHECK(p.agent_conjugate[0](y) == Approx(grid).margin(1e-7));
    }

    const auto integ = Attachment::from_relation(MonotoneRelation::integrator());
    const auto id = Attachment::from_relation(MonotoneRelation::identity());
    const Network ring(Graph::cycle(3), {integ, integ, integ}, {id, id, id}, {0, 0, 0},
                       Assumption::OutputStrictControllers);
    const Potentials pr = assemble(ring);
    CHECK(pr.agent[0](0.0) == 0.0);
    CHECK(pr.agent[0](0.1) == kInf);
    for (double y : {-3.0, 0.0, 2.0}) {
        CHECK(pr.agent_conjugate[0](y) == 0.0);
    }

    const Network syn = load_network(kNetworks / "cluster_synthesis.json");
    const Potentials ps = assemble(syn);
    const auto g = MonotoneRelation::affine(1.0, -1.2);
    for (double x : {-2.0, 0.0, 1.0, 2.5}) {
        const double quad = oracle::trapezoid([&](double t) { return g.evaluate(t).lo; }, 0.0, x, 1000);
        CHECK(ps.controller[0](x) == Approx(quad).margin(1e-9));
    }
}

TEST_CASE("solver examples", "[steady]") {
    const Network two = load_network(kNetworks / "two_node.json");
    const SteadyState s2 = solve(two);
    CHECK(s2.y[0] == Approx(2.0 / 3.0).margin(1e-8));
    CHECK(s2.y[1] == Approx(1.0 / 3.0).margin(1e-8));
    CHECK(s2.residual <= 1e-9);
    const Eigen::VectorXd lin = oracle::linear_steady_state(two.incidence(), Eigen::VectorXd::Ones(2),
                                                            Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(1),
                                                            Eigen::VectorXd::Zero(1), Eigen::Vector2d(1.0, 0.0));
    CHECK(s2.y[0] == Approx(lin(0)).margin(1e-8));

    for (double c : {0.0, 0.37, 1.9}) {
        const SteadyState sc = solve(homogeneous_cycle(c));
        for (int i = 0; i < 5; ++i) {
            CHECK(sc.y[static_cast<std::size_t>(i)] == Approx(c).margin(1e-8));
            CHECK(sc.zeta[static_cast<std::size_t>(i)] == Approx(0.0).margin(1e-8));
            CHECK(sc.mu[static_cast<std::size_t>(i)] == Approx(0.0).margin(1e-8));
        }
    }

    const Network syn = load_network(kNetworks / "cluster_synthesis.json");
    const SteadyState ss = solve(syn);
    const std::vector<double> target{0, 0, 1, 1, 1};
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(ss.y[i] == Approx(target[i]).margin(1e-7));
    }
    for (double mu : ss.mu) {
        CHECK(mu == Approx(-0.2).margin(1e-7));
    }
}

TEST_CASE("a relay held at its jump", "[steady]") {
    // y0 = 0.3 - mu and y1 = 2 mu meet at 0.2 with mu = 0.1 inside the jump
    const Network net(Graph(2, {{0, 1}}),
                      {Attachment::from_relation(MonotoneRelation::identity()),
                       Attachment::from_relation(MonotoneRelation::affine(2.0, 0.0))},
                      {Attachment::from_relation(named_relation("relay"))}, {0.3, 0.0},
                      Assumption::OutputStrictAgents);
    const SteadyState ss = solve(net);
    CHECK(ss.residual <= 1e-9);
    CHECK(ss.y[0] == Approx(0.2).margin(1e-8));
    CHECK(ss.y[1] == Approx(0.2).margin(1e-8));
    CHECK(ss.mu[0] == Approx(0.1).margin(1e-8));
    CHECK(optimality_gap(net, ss) <= 1e-8);
    CHECK(residual(net, std::vector<double>{0.2, 0.2}) <= 1e-12);
}

TEST_CASE("signal identities", "[steady]") {
    for (const auto& entry : std::filesystem::directory_iterator(kNetworks)) {
        const Network net = load_network(entry.path());
        const SteadyState ss = solve(net);
        const Eigen::MatrixXd& e = net.incidence();
        const Eigen::Map<const Eigen::VectorXd> y(ss.y.data(), static_cast<Eigen::Index>(ss.y.size()));
        const Eigen::Map<const Eigen::VectorXd> mu(ss.mu.data(), static_cast<Eigen::Index>(ss.mu.size()));
        const Eigen::VectorXd zeta = e.transpose() * y;
        const Eigen::VectorXd u = -(e * mu);
        for (Eigen::Index k = 0; k < zeta.size(); ++k) {
            CHECK(ss.zeta[static_cast<std::size_t>(k)] == zeta(k));
        }
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            CHECK(ss.u[static_cast<std::size_t>(i)] == u(i));
        }
    }
}

TEST_CASE("residual examples", "[steady]") {
    const Network two = load_network(kNetworks / "two_node.json");
    CHECK(residual(two, std::vector<double>{0.0, 0.0}) == Approx(1.0));
    CHECK(residual(two, std::vector<double>{2.0 / 3.0, 1.0 / 3.0}) <= 1e-15);
    CHECK(residual(homogeneous_cycle(0.8), std::vector<double>(5, 0.8)) == 0.0);
}

TEST_CASE("flow recovery", "[steady]") {
    const Network cyc = homogeneous_cycle(1.3);
    const Flow fc = recover_flow(cyc, solve(cyc));
    for (double u : fc.u) CHECK(u == Approx(0.0).margin(1e-8));
    for (double m : fc.mu) CHECK(m == Approx(0.0).margin(1e-8));

    const Network two = load_network(kNetworks / "two_node.json");
    const Flow f2 = recover_flow(two, solve(two));
    CHECK(f2.mu[0] == Approx(1.0 / 3.0).margin(1e-8));
    CHECK(f2.u[0] == Approx(-1.0 / 3.0).margin(1e-8));
    CHECK(f2.u[1] == Approx(1.0 / 3.0).margin(1e-8));

    const Network syn = load_network(kNetworks / "cluster_synthesis.json");
    for (double m : recover_flow(syn, solve(syn)).mu) {
        CHECK(m == Approx(-0.2).margin(1e-7));
    }

    // a tampered state fails the duality check
    SteadyState bad = solve(two);
    bad.y[0] += 0.1;
    CHECK_THROWS_AS(recover_flow(two, bad), DualityGap);
}

TEST_CASE("optimality conditions on every bundled network", "[steady]") {
    for (const auto& entry : std::filesystem::directory_iterator(kNetworks)) {
        INFO(entry.path().filename().string());
        const Network net = load_network(entry.path(), 5);
        const SteadyState ss = solve(net);
        CHECK(ss.residual <= 1e-9);
        CHECK(optimality_gap(net, ss) <= 1e-8);
        CHECK_NOTHROW(recover_flow(net, ss));
        // clusters: exchangeable vertices share a value
        const Partition part = exchangeability_partition(net);
        for (const auto& block : part.blocks) {
            for (int v : block) {
                CHECK(std::abs(ss.y[static_cast<std::size_t>(v)] - ss.y[static_cast<std::size_t>(block.front())]) <=
                      1e-6);
            }
        }
    }
}

TEST_CASE("affine networks match the linear solve", "[steady]") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> gain(0.2, 3.0);
    std::uniform_real_distribution<double> shift(-1.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = std::uniform_int_distribution<int>(2, 6)(rng);
        std::vector<Attachment> agents;
        Eigen::VectorXd p(n);
        Eigen::VectorXd q(n);
        std::vector<double> w;
        for (int i = 0; i < n; ++i) {
            // k(u) = alpha u + beta, so k^{-1}(y) = y / alpha - beta / alpha
            const double alpha = gain(rng);
            const double beta = shift(rng);
            agents.push_back(Attachment::from_relation(MonotoneRelation::affine(alpha, beta)));
            p(i) = 1.0 / alpha;
            q(i) = -beta / alpha;
            w.push_back(shift(rng));
        }
        std::vector<double> gs;
        std::vector<double> hs;
        const Network net = gen::random_network(
            rng, n, agents,
            [&] {
                gs.push_back(gain(rng));
                hs.push_back(shift(rng));
                return Attachment::from_relation(MonotoneRelation::affine(gs.back(), hs.back()));
            },
            w, Assumption::OutputStrictAgents);
        const Eigen::Map<const Eigen::VectorXd> g(gs.data(), static_cast<Eigen::Index>(gs.size()));
        const Eigen::Map<const Eigen::VectorXd> h(hs.data(), static_cast<Eigen::Index>(hs.size()));
        const Eigen::Map<const Eigen::VectorXd> wv(w.data(), n);
        const Eigen::VectorXd expected = oracle::linear_steady_state(net.incidence(), p, q, g, h, wv);
        const SteadyState ss = solve(net);
        for (int i = 0; i < n; ++i) {
            CHECK(ss.y[static_cast<std::size_t>(i)] == Approx(expected(i)).margin(1e-7));
        }
    }
}

TEST_CASE("small networks match grid minimization", "[steady]") {
    std::mt19937_64 rng(52);
    const std::vector<std::string> agent_names{"identity", "two_slope", "stiff_affine", "shifted_identity"};
    const std::vector<std::string> ctrl_names{"identity", "relay", "saturation", "dead_zone", "zero", "box"};
    std::uniform_real_distribution<double> wdist(-1.5, 1.5);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 2 + trial % 2;
        std::vector<Attachment> agents;
        std::vector<double> w;
        for (int i = 0; i < n; ++i) {
            const auto& name = agent_names[std::uniform_int_distribution<std::size_t>(0, agent_names.size() - 1)(rng)];
            agents.push_back(Attachment::from_relation(named_relation(name)));
            w.push_back(wdist(rng));
        }
        const Network net = gen::random_network(
            rng, n, agents,
            [&] {
                const auto& name = ctrl_names[std::uniform_int_distribution<std::size_t>(0, ctrl_names.size() - 1)(rng)];
                return Attachment::from_relation(named_relation(name));
            },
            w, Assumption::OutputStrictAgents);
        const Potentials pot = assemble(net);
        const SteadyState ss = solve(net);
        const auto grid = oracle::grid_minimize(
            [&](std::span<const double> y) { return objective(net, pot, y); }, static_cast<std::size_t>(n), -20.0, 20.0,
            1e-3);
        for (int i = 0; i < n; ++i) {
            CHECK(std::abs(ss.y[static_cast<std::size_t>(i)] - grid[static_cast<std::size_t>(i)]) <= 2e-3);
        }
    }
}

TEST_CASE("solver failures", "[steady]") {
    const Network two = load_network(kNetworks / "two_node.json");
    SolveOptions tight;
    tight.max_iter = 3;
    try {
        (void)solve(two, tight);
        FAIL("expected NotConverged");
    } catch (const NotConverged& e) {
        CHECK(e.best().y.size() == 2);
        CHECK(e.best().iterations == 3);
    }

    // integrators cannot absorb a net inflow: no steady state
    const Network ring = load_network(kNetworks / "integrator_ring.json");
    CHECK_NOTHROW(solve(ring));
    CHECK_THROWS_AS(solve(ring.with_exogenous({1, 1, 1, 1})), Infeasible);
}

TEST_CASE("output-strict controllers: solutions agree within a slice", "[steady]") {
    const Network ring = load_network(kNetworks / "integrator_ring.json");
    const SteadyState ss = solve(ring);
    CHECK(ss.residual <= 1e-9);
    // with integrator agents the steady-state equation is w = E (E^T y) up to
    // a constant shift of y; compare after removing the mean
    const Eigen::MatrixXd lap = ring.incidence() * ring.incidence().transpose();
    const Eigen::Map<const Eigen::VectorXd> w(ring.exogenous().data(), 4);
    const Eigen::VectorXd expected = lap.completeOrthogonalDecomposition().pseudoInverse() * w;
    const double mean = (ss.y[0] + ss.y[1] + ss.y[2] + ss.y[3]) / 4.0;
    for (int i = 0; i < 4; ++i) {
        CHECK(ss.y[static_cast<std::size_t>(i)] - mean == Approx(expected(i)).margin(1e-7));
    }
}
