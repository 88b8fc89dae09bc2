#include "clustersym/simulator.hpp"

#include "clustersym/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace clustersym {

namespace {

DynamicModel realize(const Attachment& a, const std::string& where) {
    if (a.model) {
        return *a.model;
    }
    if (auto m = static_realization(a.relation)) {
        return *m;
    }
    throw MissingModel(where + " has no dynamic model and its relation is not a single-valued function");
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

constexpr double kLoopTol = 1e-12;
constexpr int kLoopMaxIter = 100;

}  // namespace

ClosedLoop::ClosedLoop(const Network& net) : net_(net) {
    const int n = net.vertex_count();
    const int m = net.edge_count();
    for (int i = 0; i < n; ++i) {
        agents_.push_back(realize(net.agents()[static_cast<std::size_t>(i)], "vertex " + std::to_string(i + 1)));
    }
    for (int e = 0; e < m; ++e) {
        controllers_.push_back(realize(net.controllers()[static_cast<std::size_t>(e)], "edge " + std::to_string(e + 1)));
    }
    for (const auto& model : agents_) {
        offset_.push_back(dim_);
        dim_ += model.state_dim;
    }
    for (const auto& model : controllers_) {
        offset_.push_back(dim_);
        dim_ += model.state_dim;
    }
    offset_.push_back(dim_);

    bool agent_ft = false;
    bool ctrl_ft = false;
    for (const auto& model : agents_) {
        agent_ft = agent_ft || model.feedthrough;
        affine_ = affine_ && (!model.feedthrough || model.feedthrough_gain.has_value());
    }
    for (const auto& model : controllers_) {
        ctrl_ft = ctrl_ft || model.feedthrough;
        affine_ = affine_ && (!model.feedthrough || model.feedthrough_gain.has_value());
    }
    // the loop only closes when an agent output sees its own input through
    // a controller that also passes its input straight through
    algebraic_loop_ = agent_ft && ctrl_ft;

    if (algebraic_loop_ && affine_) {
        Eigen::VectorXd dy = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd dmu = Eigen::VectorXd::Zero(m);
        for (int i = 0; i < n; ++i) {
            const auto& model = agents_[static_cast<std::size_t>(i)];
            dy(i) = model.feedthrough ? *model.feedthrough_gain : 0.0;
        }
        for (int e = 0; e < m; ++e) {
            const auto& model = controllers_[static_cast<std::size_t>(e)];
            dmu(e) = model.feedthrough ? *model.feedthrough_gain : 0.0;
        }
        const Eigen::MatrixXd& inc = net.incidence();
        const Eigen::MatrixXd loop = Eigen::MatrixXd::Identity(n, n) +
                                     dy.asDiagonal() * inc * dmu.asDiagonal() * inc.transpose();
        loop_lu_.emplace(loop);
        if (!(std::abs(loop_lu_->determinant()) > 1e-12)) {
            throw AlgebraicLoopDiverged("the algebraic loop I + D_y E D_mu E^T is singular");
        }
    }
}

Signals ClosedLoop::evaluate_at(std::span<const double> x, const Eigen::VectorXd& y) const {
    const int n = net_.vertex_count();
    const int m = net_.edge_count();
    const Eigen::MatrixXd& inc = net_.incidence();
    Signals s;
    s.y.assign(y.data(), y.data() + n);
    const Eigen::VectorXd zeta = inc.transpose() * y;
    s.zeta.assign(zeta.data(), zeta.data() + m);
    Eigen::VectorXd mu(m);
    for (int e = 0; e < m; ++e) {
        const std::size_t k = static_cast<std::size_t>(n + e);
        const auto xe = x.subspan(offset_[k], offset_[k + 1] - offset_[k]);
        mu(e) = controllers_[static_cast<std::size_t>(e)].output(xe, zeta(e));
    }
    s.mu.assign(mu.data(), mu.data() + m);
    const Eigen::VectorXd u = -inc * mu;
    s.u.assign(u.data(), u.data() + n);
    return s;
}

Signals ClosedLoop::resolve_feedthrough(std::span<const double> x) const {
    const int n = net_.vertex_count();
    const int m = net_.edge_count();
    const Eigen::MatrixXd& inc = net_.incidence();
    const auto& w = net_.exogenous();

    auto agent_out = [&](int i, double v) {
        const auto k = static_cast<std::size_t>(i);
        return agents_[k].output(x.subspan(offset_[k], offset_[k + 1] - offset_[k]), v);
    };

    auto controller_free = [&](int e) {
        const std::size_t k = static_cast<std::size_t>(n + e);
        return controllers_[static_cast<std::size_t>(e)].output(x.subspan(offset_[k], offset_[k + 1] - offset_[k]), 0.0);
    };

    if (!algebraic_loop_) {
        Eigen::VectorXd mu(m);
        for (int e = 0; e < m; ++e) {
            mu(e) = controller_free(e);
        }
        const Eigen::VectorXd u = -inc * mu;
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
            y(i) = agent_out(i, u(i) + w[static_cast<std::size_t>(i)]);
        }
        return evaluate_at(x, y);
    }

    if (affine_) {
        Eigen::VectorXd cy(n);
        Eigen::VectorXd dy(n);
        Eigen::VectorXd cmu(m);
        for (int i = 0; i < n; ++i) {
            const auto& model = agents_[static_cast<std::size_t>(i)];
            cy(i) = agent_out(i, 0.0);
            dy(i) = model.feedthrough ? *model.feedthrough_gain : 0.0;
        }
        for (int e = 0; e < m; ++e) {
            cmu(e) = controller_free(e);
        }
        Eigen::VectorXd wv(n);
        for (int i = 0; i < n; ++i) {
            wv(i) = w[static_cast<std::size_t>(i)];
        }
        const Eigen::VectorXd rhs = cy + dy.cwiseProduct(wv - inc * cmu);
        const Eigen::VectorXd y = loop_lu_ ? Eigen::VectorXd(loop_lu_->solve(rhs)) : rhs;
        return evaluate_at(x, y);
    }

    // G(y) = y - h(x, w - E mu(Eᵀy)); damped Newton with a difference Jacobian
    auto residual_of = [&](const Eigen::VectorXd& y) {
        const Signals s = evaluate_at(x, y);
        Eigen::VectorXd g(n);
        for (int i = 0; i < n; ++i) {
            g(i) = y(i) - agent_out(i, s.u[static_cast<std::size_t>(i)] + w[static_cast<std::size_t>(i)]);
        }
        return g;
    };
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        y(i) = agent_out(i, w[static_cast<std::size_t>(i)]);
    }
    Eigen::VectorXd g = residual_of(y);
    for (int iter = 0; iter < kLoopMaxIter; ++iter) {
        const double gnorm = g.lpNorm<Eigen::Infinity>();
        if (gnorm <= kLoopTol * (1.0 + y.lpNorm<Eigen::Infinity>())) {
            return evaluate_at(x, y);
        }
        Eigen::MatrixXd jac(n, n);
        for (int j = 0; j < n; ++j) {
            const double h = 1e-7 * std::max(1.0, std::abs(y(j)));
            Eigen::VectorXd yp = y;
            yp(j) += h;
            jac.col(j) = (residual_of(yp) - g) / h;
        }
        const Eigen::VectorXd step = jac.partialPivLu().solve(-g);
        double t = 1.0;
        bool accepted = false;
        for (int k = 0; k < 40 && all_finite({step.data(), static_cast<std::size_t>(n)}); ++k, t *= 0.5) {
            const Eigen::VectorXd trial = y + t * step;
            const Eigen::VectorXd gt = residual_of(trial);
            if (gt.lpNorm<Eigen::Infinity>() < gnorm) {
                y = trial;
                g = gt;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            break;
        }
    }
    throw AlgebraicLoopDiverged("feedthrough loop did not settle (|G| = " +
                                std::to_string(g.lpNorm<Eigen::Infinity>()) + ")");
}

void ClosedLoop::derivative(std::span<const double> x, std::span<double> dx, Signals* signals) const {
    const int n = net_.vertex_count();
    const int m = net_.edge_count();
    Signals s = resolve_feedthrough(x);
    const auto& w = net_.exogenous();
    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const std::size_t len = offset_[k + 1] - offset_[k];
        agents_[k].drift(x.subspan(offset_[k], len), s.u[k] + w[k], dx.subspan(offset_[k], len));
    }
    for (int e = 0; e < m; ++e) {
        const auto k = static_cast<std::size_t>(n + e);
        const std::size_t len = offset_[k + 1] - offset_[k];
        controllers_[static_cast<std::size_t>(e)].drift(x.subspan(offset_[k], len), s.zeta[static_cast<std::size_t>(e)],
                                                        dx.subspan(offset_[k], len));
    }
    if (signals) {
        *signals = std::move(s);
    }
}

Trace simulate(const Network& net, const SimulationOptions& opts) {
    if (!(opts.dt > 0.0) || !std::isfinite(opts.dt)) {
        throw InvalidOptions("time step must be positive and finite");
    }
    if (!(opts.duration >= 0.0) || !std::isfinite(opts.duration)) {
        throw InvalidOptions("duration must be nonnegative and finite");
    }
    if (opts.record_stride == 0) {
        throw InvalidOptions("record stride must be positive");
    }
    const ClosedLoop loop(net);
    const std::size_t d = loop.state_dim();
    std::vector<double> x = opts.x0;
    if (x.empty()) {
        x.assign(d, 0.0);
    }
    if (x.size() != d) {
        throw DimensionMismatch("initial state has " + std::to_string(x.size()) + " entries, the closed loop has " +
                                std::to_string(d));
    }
    if (!all_finite(x)) {
        throw NonFiniteState("initial state is not finite");
    }

    Trace trace;
    auto record = [&](double t, const std::vector<double>& state) {
        Signals s = loop.resolve_feedthrough(state);
        trace.time.push_back(t);
        trace.y.push_back(std::move(s.y));
        trace.zeta.push_back(std::move(s.zeta));
        trace.u.push_back(std::move(s.u));
        trace.mu.push_back(std::move(s.mu));
    };

    const auto steps = static_cast<std::size_t>(std::ceil(opts.duration / opts.dt - 1e-9));
    std::vector<double> k1(d), k2(d), k3(d), k4(d), tmp(d);
    record(0.0, x);
    for (std::size_t step = 0; step < steps; ++step) {
        const double t0 = static_cast<double>(step) * opts.dt;
        const double t1 = step + 1 == steps ? opts.duration : static_cast<double>(step + 1) * opts.dt;
        const double h = t1 - t0;
        loop.derivative(x, k1);
        for (std::size_t j = 0; j < d; ++j) {
            tmp[j] = x[j] + 0.5 * h * k1[j];
        }
        loop.derivative(tmp, k2);
        for (std::size_t j = 0; j < d; ++j) {
            tmp[j] = x[j] + 0.5 * h * k2[j];
        }
        loop.derivative(tmp, k3);
        for (std::size_t j = 0; j < d; ++j) {
            tmp[j] = x[j] + h * k3[j];
        }
        loop.derivative(tmp, k4);
        for (std::size_t j = 0; j < d; ++j) {
            x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if (!all_finite(x)) {
            throw NonFiniteState("state became non-finite at t = " + std::to_string(t1));
        }
        if ((step + 1) % opts.record_stride == 0 || step + 1 == steps) {
            record(t1, x);
        }
    }
    trace.final_state = std::move(x);
    return trace;
}

DetectedClusters detect_clusters(const Trace& trace, double window, double tol) {
    if (trace.time.empty() || trace.y.empty()) {
        throw InvalidOptions("empty trace");
    }
    if (!(window > 0.0) || !(tol > 0.0)) {
        throw InvalidOptions("window and tolerance must be positive");
    }
    const double t_end = trace.time.back();
    if (t_end - trace.time.front() < window) {
        throw InvalidOptions("trace is shorter than the averaging window");
    }
    const std::size_t n = trace.y.front().size();
    std::vector<double> sum(n, 0.0);
    std::vector<double> lo(n, kInf);
    std::vector<double> hi(n, -kInf);
    std::size_t count = 0;
    const double start = t_end - window;
    for (std::size_t k = 0; k < trace.time.size(); ++k) {
        if (trace.time[k] < start - 1e-12 * std::max(1.0, t_end)) {
            continue;
        }
        ++count;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = trace.y[k][i];
            sum[i] += v;
            lo[i] = std::min(lo[i], v);
            hi[i] = std::max(hi[i], v);
        }
    }
    DetectedClusters out;
    out.means.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.means[i] = sum[i] / static_cast<double>(count);
        out.drift = std::max(out.drift, hi[i] - lo[i]);
    }
    if (out.drift > tol) {
        throw NotStationary("outputs still move by " + std::to_string(out.drift) + " inside the window");
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return out.means[static_cast<std::size_t>(a)] < out.means[static_cast<std::size_t>(b)];
    });
    std::vector<std::vector<int>> blocks;
    for (std::size_t k = 0; k < n; ++k) {
        const int v = order[k];
        if (k == 0 || out.means[static_cast<std::size_t>(v)] - out.means[static_cast<std::size_t>(order[k - 1])] > tol) {
            blocks.emplace_back();
        }
        blocks.back().push_back(v);
    }
    out.partition = make_partition(std::move(blocks));
    std::vector<double> values;
    for (const auto& block : out.partition.blocks) {
        double s = 0.0;
        for (int v : block) {
            s += out.means[static_cast<std::size_t>(v)];
        }
        values.push_back(s / static_cast<double>(block.size()));
    }
    out.partition.values = std::move(values);
    return out;
}

}  // namespace clustersym
