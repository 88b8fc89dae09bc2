#include "clustersym/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace clustersym {

namespace {

constexpr double kDivergenceBound = 1e12;
constexpr std::size_t kCertificatePeriod = 1000;

// Largest eigenvalue of E E^T by power iteration, inflated slightly since the
// iteration approaches it from below.
double incidence_norm_squared(const Graph& g) {
    const int n = g.vertex_count();
    if (g.edge_count() == 0) {
        return 0.0;
    }
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        v[static_cast<std::size_t>(i)] = std::cos(1.0 + 0.7 * i);
    }
    std::vector<double> next(v.size());
    double lambda = 0.0;
    for (int it = 0; it < 500; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (const Edge& e : g.edges()) {
            const double z = v[static_cast<std::size_t>(e.head)] - v[static_cast<std::size_t>(e.tail)];
            next[static_cast<std::size_t>(e.head)] += z;
            next[static_cast<std::size_t>(e.tail)] -= z;
        }
        double norm = 0.0;
        for (double x : next) {
            norm += x * x;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            break;
        }
        double vnorm = 0.0;
        for (double x : v) {
            vnorm += x * x;
        }
        lambda = norm / std::sqrt(vnorm);
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = next[i] / norm;
        }
    }
    int max_degree = 0;
    for (int i = 0; i < n; ++i) {
        max_degree = std::max(max_degree, g.degree(i));
    }
    // Gershgorin: lambda_max(L) <= 2 max degree
    return std::min(1.05 * lambda, 2.0 * max_degree);
}

std::vector<double> edge_differences(const Graph& g, std::span<const double> y) {
    std::vector<double> z(static_cast<std::size_t>(g.edge_count()));
    for (int e = 0; e < g.edge_count(); ++e) {
        z[static_cast<std::size_t>(e)] =
            y[static_cast<std::size_t>(g.edge(e).head)] - y[static_cast<std::size_t>(g.edge(e).tail)];
    }
    return z;
}

// E mu
std::vector<double> divergence(const Graph& g, std::span<const double> mu) {
    std::vector<double> out(static_cast<std::size_t>(g.vertex_count()), 0.0);
    for (int e = 0; e < g.edge_count(); ++e) {
        out[static_cast<std::size_t>(g.edge(e).head)] += mu[static_cast<std::size_t>(e)];
        out[static_cast<std::size_t>(g.edge(e).tail)] -= mu[static_cast<std::size_t>(e)];
    }
    return out;
}

// Minimizer over [lo, hi] of a convex function given its nondecreasing derivative.
template <typename Derivative>
double minimize_on_interval(Interval box, double start, Derivative d) {
    double lo = box.lo;
    double hi = box.hi;
    double step = 1.0;
    if (!std::isfinite(lo)) {
        lo = std::min(start, std::isfinite(hi) ? hi : start) - step;
        while (d(lo) > 0.0 && std::isfinite(lo)) {
            step *= 2.0;
            lo -= step;
        }
    }
    step = 1.0;
    if (!std::isfinite(hi)) {
        hi = std::max(start, lo) + step;
        while (d(hi) < 0.0 && std::isfinite(hi)) {
            step *= 2.0;
            hi += step;
        }
    }
    if (d(lo) >= 0.0) {
        return lo;
    }
    if (d(hi) <= 0.0) {
        return hi;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (d(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

NotConverged::NotConverged(std::size_t max_iter, SteadyState best)
    : Error("steady-state solver did not converge in " + std::to_string(max_iter) +
            " iterations (best residual " + std::to_string(best.residual) + ")"),
      best_(std::move(best)) {}

Potentials assemble(const Network& net) {
    Potentials p;
    for (const Attachment& a : net.agents()) {
        p.agent.push_back(integrate(a.relation));
        p.agent_conjugate.push_back(conjugate(p.agent.back()));
    }
    for (const Attachment& c : net.controllers()) {
        p.controller.push_back(integrate(c.relation));
    }
    return p;
}

double potential(const Network& net, const Potentials& p, std::span<const double> y) {
    if (static_cast<int>(y.size()) != net.vertex_count()) {
        throw DimensionMismatch("potential evaluated on a vector of the wrong size");
    }
    double f = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        f += p.agent_conjugate[i](y[i]);
    }
    const auto z = edge_differences(net.graph(), y);
    for (std::size_t e = 0; e < z.size(); ++e) {
        f += p.controller[e](z[e]);
    }
    return f;
}

double objective(const Network& net, const Potentials& p, std::span<const double> y) {
    double f = potential(net, p, y);
    for (std::size_t i = 0; i < y.size(); ++i) {
        f -= net.exogenous()[i] * y[i];
    }
    return f;
}

namespace {

// Whether d = y - earlier is a direction along which F_w decreases without
// bound, judged by the recession function of F_w at the normalized d.
// Components below rounding level relative to |d| count as zero.
bool descent_direction(const Network& net, const Potentials& p, std::span<const double> y,
                       std::span<const double> earlier) {
    std::vector<double> d(y.size());
    double scale = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        d[i] = y[i] - earlier[i];
        scale = std::max(scale, std::abs(d[i]));
    }
    if (!(scale > 1e-6)) {
        return false;
    }
    auto snap = [](double v) { return std::abs(v) <= 1e-9 ? 0.0 : v; };
    const auto& w = net.exogenous();
    double slope = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] /= scale;
        slope += p.agent_conjugate[i].recession(snap(d[i])) - w[i] * d[i];
    }
    const auto dz = edge_differences(net.graph(), d);
    for (std::size_t e = 0; e < dz.size(); ++e) {
        slope += p.controller[e].recession(snap(dz[e]));
    }
    return slope < -1e-9;
}

}  // namespace

SteadyState solve(const Network& net, const SolveOptions& opts) {
    if (!(opts.tol > 0.0) || opts.max_iter == 0) {
        throw Error("solver needs tol > 0 and max_iter > 0");
    }
    const Graph& g = net.graph();
    const auto n = static_cast<std::size_t>(g.vertex_count());
    const auto m = static_cast<std::size_t>(g.edge_count());
    const auto& w = net.exogenous();

    std::vector<MonotoneRelation> agent_inverse;
    for (std::size_t i = 0; i < n; ++i) {
        agent_inverse.push_back(net.agent_relation(static_cast<int>(i)).inverse());
    }

    const double norm2 = incidence_norm_squared(g);
    const double step = norm2 > 0.0 ? 0.99 / std::sqrt(norm2) : 1.0;
    const double sigma = step;
    const double tau = step;

    std::vector<double> y(n, 0.0);
    std::vector<double> y_bar(n, 0.0);
    std::vector<double> y_next(n, 0.0);
    std::vector<double> mu(m, 0.0);

    SteadyState best;
    best.residual = kInf;
    const Potentials potentials = assemble(net);
    std::vector<double> snapshot;

    auto finish = [&](SteadyState& ss) {
        const Potentials& pot = potentials;
        ss.zeta = edge_differences(g, ss.y);
        const auto e_mu = divergence(g, ss.mu);
        ss.u.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            ss.u[i] = -e_mu[i];
        }
        ss.objective = objective(net, pot, ss.y);
    };

    for (std::size_t iter = 1; iter <= opts.max_iter; ++iter) {
        // dual step: prox of sigma Gamma*, through the Moreau identity
        const auto z_bar = edge_differences(g, y_bar);
        for (std::size_t e = 0; e < m; ++e) {
            const double v = mu[e] + sigma * z_bar[e];
            // curve point (z, g) with z + g / sigma = v / sigma: g = v - sigma z
            mu[e] = net.controller_relation(static_cast<int>(e)).resolvent_point(1.0 / sigma, v / sigma).y;
        }
        // primal step: prox of tau (K* - w.)
        const auto e_mu = divergence(g, mu);
        for (std::size_t i = 0; i < n; ++i) {
            y_next[i] = agent_inverse[i].resolvent(tau, y[i] - tau * e_mu[i] + tau * w[i]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            y_bar[i] = 2.0 * y_next[i] - y[i];
        }
        y.swap(y_next);

        double size = 0.0;
        for (double v : y) {
            size = std::max(size, std::abs(v));
        }
        for (double v : mu) {
            size = std::max(size, std::abs(v));
        }
        if (!(size < kDivergenceBound)) {
            throw Infeasible("steady-state iterates diverge; the potential objective is unbounded below");
        }
        if (iter % kCertificatePeriod == 0) {
            if (!snapshot.empty() && descent_direction(net, potentials, y, snapshot)) {
                throw Infeasible("the potential objective decreases without bound along the iterate drift");
            }
            snapshot = y;
        }

        // distance of (y, mu) from every relation graph; unlike a point
        // evaluation this is continuous across vertical pieces
        const auto zeta = edge_differences(g, y);
        const auto e_mu_now = divergence(g, mu);
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            res = std::max(res, net.agent_relation(static_cast<int>(i)).graph_distance(w[i] - e_mu_now[i], y[i]));
        }
        for (std::size_t e = 0; e < m; ++e) {
            res = std::max(res, net.controller_relation(static_cast<int>(e)).graph_distance(zeta[e], mu[e]));
        }
        if (res < best.residual) {
            best.y = y;
            best.mu = mu;
            best.residual = res;
            best.iterations = iter;
        }
        if (res <= opts.tol) {
            SteadyState ss;
            ss.y = y;
            ss.mu = mu;
            ss.residual = res;
            ss.iterations = iter;
            finish(ss);
            return ss;
        }
    }
    if (best.y.empty()) {
        best.y = y;
        best.mu = mu;
    }
    finish(best);
    best.iterations = opts.max_iter;
    throw NotConverged(opts.max_iter, std::move(best));
}

double residual(const Network& net, std::span<const double> y) {
    const Graph& g = net.graph();
    if (static_cast<int>(y.size()) != g.vertex_count()) {
        throw DimensionMismatch("residual evaluated on a vector of the wrong size");
    }
    const auto n = y.size();
    const auto m = static_cast<std::size_t>(g.edge_count());
    const auto& w = net.exogenous();
    const auto zeta = edge_differences(g, y);

    std::vector<Interval> edge_values(m);
    std::vector<double> mu(m);
    for (std::size_t e = 0; e < m; ++e) {
        edge_values[e] = net.controller_relation(static_cast<int>(e)).evaluate(zeta[e]);
        if (edge_values[e].is_empty()) {
            return kInf;
        }
        mu[e] = edge_values[e].clamp(0.0);
    }
    std::vector<Interval> vertex_values(n);
    for (std::size_t i = 0; i < n; ++i) {
        vertex_values[i] = net.agent_relation(static_cast<int>(i)).inverse().evaluate(y[i]);
        if (vertex_values[i].is_empty()) {
            return kInf;
        }
    }

    // Coordinate descent on sum_i dist(w_i - (E mu)_i, k_i^{-1}(y_i))^2 over
    // the set-valued selections; convex and separable constraints.
    std::vector<std::size_t> free_edges;
    for (std::size_t e = 0; e < m; ++e) {
        if (!edge_values[e].is_point()) {
            free_edges.push_back(e);
        }
    }
    std::vector<double> r(n);
    auto refresh = [&] {
        const auto e_mu = divergence(g, mu);
        for (std::size_t i = 0; i < n; ++i) {
            r[i] = w[i] - e_mu[i];
        }
    };
    refresh();
    for (int pass = 0; pass < 1000 && !free_edges.empty(); ++pass) {
        double change = 0.0;
        for (std::size_t e : free_edges) {
            const auto h = static_cast<std::size_t>(g.edge(static_cast<int>(e)).head);
            const auto t = static_cast<std::size_t>(g.edge(static_cast<int>(e)).tail);
            const double a_h = r[h] + mu[e];
            const double a_t = r[t] - mu[e];
            auto derivative = [&](double x) {
                return -vertex_values[h].excess(a_h - x) + vertex_values[t].excess(a_t + x);
            };
            const double next = minimize_on_interval(edge_values[e], mu[e], derivative);
            change = std::max(change, std::abs(next - mu[e]));
            r[h] = a_h - next;
            r[t] = a_t + next;
            mu[e] = next;
        }
        refresh();
        if (change <= 1e-15) {
            break;
        }
    }
    double out = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out = std::max(out, vertex_values[i].distance(r[i]));
    }
    return out;
}

Flow recover_flow(const Network& net, const SteadyState& ss, double tol) {
    Flow f;
    f.mu = ss.mu;
    const auto e_mu = divergence(net.graph(), f.mu);
    f.u.resize(e_mu.size());
    for (std::size_t i = 0; i < e_mu.size(); ++i) {
        f.u[i] = -e_mu[i];
    }
    SteadyState check = ss;
    check.u = f.u;
    const double gap = optimality_gap(net, check);
    if (!(gap <= tol)) {
        throw DualityGap("steady state violates the optimality conditions by " + std::to_string(gap));
    }
    return f;
}

double optimality_gap(const Network& net, const SteadyState& ss) {
    const Graph& g = net.graph();
    const auto zeta = edge_differences(g, ss.y);
    const auto e_mu = divergence(g, ss.mu);
    double gap = 0.0;
    for (std::size_t i = 0; i < ss.y.size(); ++i) {
        const double input = ss.u[i] + net.exogenous()[i];
        gap = std::max(gap, net.agent_relation(static_cast<int>(i)).graph_distance(input, ss.y[i]));
        gap = std::max(gap, std::abs(ss.u[i] + e_mu[i]));
    }
    for (std::size_t e = 0; e < zeta.size(); ++e) {
        gap = std::max(gap, net.controller_relation(static_cast<int>(e)).graph_distance(zeta[e], ss.mu[e]));
        gap = std::max(gap, std::abs(zeta[e] - ss.zeta[e]));
    }
    return gap;
}

}  // namespace clustersym
