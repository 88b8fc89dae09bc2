#include "clustersym/network.hpp"

#include "clustersym/errors.hpp"

#include <cmath>
#include <string>

namespace clustersym {

Graph::Graph(int vertex_count, std::vector<Edge> edges) : n_(vertex_count), edges_(std::move(edges)) {
    if (n_ < 1) {
        throw InvalidNetwork("graph needs at least one vertex");
    }
    lookup_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), -1);
    neighbors_.resize(static_cast<std::size_t>(n_));
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const auto [h, t] = edges_[e];
        if (h < 0 || h >= n_ || t < 0 || t >= n_) {
            throw InvalidNetwork("edge " + std::to_string(e + 1) + " references a missing vertex");
        }
        if (h == t) {
            throw InvalidNetwork("edge " + std::to_string(e + 1) + " is a self-loop");
        }
        if (lookup_[index(h, t)] >= 0) {
            throw InvalidNetwork("edge " + std::to_string(e + 1) + " duplicates an existing edge");
        }
        lookup_[index(h, t)] = static_cast<int>(e);
        lookup_[index(t, h)] = static_cast<int>(e);
        neighbors_[static_cast<std::size_t>(h)].push_back(t);
        neighbors_[static_cast<std::size_t>(t)].push_back(h);
    }
}

bool Graph::is_connected() const {
    std::vector<char> seen(static_cast<std::size_t>(n_), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int w : neighbors(v)) {
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                ++count;
                stack.push_back(w);
            }
        }
    }
    return count == n_;
}

Graph Graph::cycle(int n) {
    std::vector<Edge> edges;
    if (n == 2) {
        edges.push_back({0, 1});
    } else if (n > 2) {
        for (int i = 0; i < n; ++i) {
            edges.push_back({i, (i + 1) % n});
        }
    }
    return Graph(n, std::move(edges));
}

Graph Graph::path(int n) {
    std::vector<Edge> edges;
    for (int i = 0; i + 1 < n; ++i) {
        edges.push_back({i, i + 1});
    }
    return Graph(n, std::move(edges));
}

Graph Graph::complete(int n) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            edges.push_back({i, j});
        }
    }
    return Graph(n, std::move(edges));
}

Graph Graph::complete_bipartite(int a, int b) {
    std::vector<Edge> edges;
    for (int i = 0; i < a; ++i) {
        for (int j = 0; j < b; ++j) {
            edges.push_back({a + j, i});
        }
    }
    return Graph(a + b, std::move(edges));
}

Eigen::MatrixXd incidence(const Graph& g) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(g.vertex_count(), g.edge_count());
    for (int k = 0; k < g.edge_count(); ++k) {
        e(g.edge(k).head, k) = 1.0;
        e(g.edge(k).tail, k) = -1.0;
    }
    return e;
}

Eigen::MatrixXd VertexPermutation::p_matrix() const {
    const auto n = static_cast<Eigen::Index>(image.size());
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        p(i, image[static_cast<std::size_t>(i)]) = 1.0;
    }
    return p;
}

Eigen::MatrixXd VertexPermutation::q_matrix() const {
    const auto m = static_cast<Eigen::Index>(edge_image.size());
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index f = 0; f < m; ++f) {
        q(f, edge_image[static_cast<std::size_t>(f)]) = 1.0;
    }
    return q;
}

Eigen::MatrixXd VertexPermutation::d_matrix() const {
    Eigen::VectorXd d(static_cast<Eigen::Index>(signs.size()));
    for (std::size_t e = 0; e < signs.size(); ++e) {
        d(static_cast<Eigen::Index>(e)) = signs[e];
    }
    return d.asDiagonal();
}

bool VertexPermutation::preserves_orientation() const {
    for (int s : signs) {
        if (s != 1) {
            return false;
        }
    }
    return true;
}

VertexPermutation permutation_triple(std::span<const int> image, const Graph& g) {
    const int n = g.vertex_count();
    if (static_cast<int>(image.size()) != n) {
        throw NotAnAutomorphism("vertex map has the wrong length");
    }
    std::vector<char> hit(static_cast<std::size_t>(n), 0);
    for (int v : image) {
        if (v < 0 || v >= n || hit[static_cast<std::size_t>(v)]) {
            throw NotAnAutomorphism("vertex map is not a bijection");
        }
        hit[static_cast<std::size_t>(v)] = 1;
    }
    VertexPermutation p;
    p.image.assign(image.begin(), image.end());
    p.edge_image.resize(static_cast<std::size_t>(g.edge_count()));
    p.signs.resize(static_cast<std::size_t>(g.edge_count()));
    for (int f = 0; f < g.edge_count(); ++f) {
        const Edge& src = g.edge(f);
        const int h = p.image[static_cast<std::size_t>(src.head)];
        const int t = p.image[static_cast<std::size_t>(src.tail)];
        const int e = g.edge_between(h, t);
        if (e < 0) {
            throw NotAnAutomorphism("edge " + std::to_string(f + 1) + " is not mapped onto an edge");
        }
        p.edge_image[static_cast<std::size_t>(f)] = e;
        p.signs[static_cast<std::size_t>(e)] = g.edge(e).head == h ? 1 : -1;
    }
    // edge count equal and edges map injectively, so non-edges map to non-edges
    return p;
}

std::vector<double> apply_output_permutation(const VertexPermutation& p, std::span<const double> y) {
    if (y.size() != p.image.size()) {
        throw DimensionMismatch("output vector has " + std::to_string(y.size()) + " entries, permutation acts on " +
                                std::to_string(p.image.size()));
    }
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        out[i] = y[static_cast<std::size_t>(p.image[i])];
    }
    return out;
}

Attachment Attachment::from_relation(MonotoneRelation r, nlohmann::json literal) {
    Attachment a;
    a.relation = std::move(r);
    a.literal = std::move(literal);
    return a;
}

Attachment Attachment::from_model(DynamicModel m, nlohmann::json literal) {
    Attachment a;
    a.relation = m.relation;
    a.model = std::move(m);
    a.literal = std::move(literal);
    return a;
}

Network::Network(Graph graph, std::vector<Attachment> agents, std::vector<Attachment> controllers,
                 std::vector<double> exogenous, Assumption assumption)
    : graph_(std::move(graph)),
      agents_(std::move(agents)),
      controllers_(std::move(controllers)),
      exogenous_(std::move(exogenous)),
      assumption_(assumption) {
    const auto n = static_cast<std::size_t>(graph_.vertex_count());
    const auto m = static_cast<std::size_t>(graph_.edge_count());
    if (agents_.size() != n) {
        throw InvalidNetwork("expected one agent per vertex");
    }
    if (controllers_.size() != m) {
        throw InvalidNetwork("expected one controller per edge");
    }
    if (exogenous_.empty()) {
        exogenous_.assign(n, 0.0);
    }
    if (exogenous_.size() != n) {
        throw InvalidNetwork("expected one exogenous input per vertex");
    }
    for (double w : exogenous_) {
        if (!std::isfinite(w)) {
            throw InvalidNetwork("exogenous inputs must be finite");
        }
    }
    if (!graph_.is_connected()) {
        throw InvalidNetwork("graph is not connected");
    }
    if (assumption_ == Assumption::OutputStrictAgents) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!agents_[i].relation.strictly_monotone()) {
                throw InvalidNetwork("assumption A1 needs strictly monotone agent relations; vertex " +
                                     std::to_string(i + 1) + " is not");
            }
        }
    } else {
        for (std::size_t e = 0; e < m; ++e) {
            if (!controllers_[e].relation.strictly_monotone()) {
                throw InvalidNetwork("assumption A2 needs strictly monotone controller relations; edge " +
                                     std::to_string(e + 1) + " is not");
            }
        }
    }
    incidence_ = clustersym::incidence(graph_);
}

Network Network::with_exogenous(std::vector<double> w) const {
    Network copy(graph_, agents_, controllers_, std::move(w), assumption_);
    return copy;
}

Network Network::with_flipped_edges() const {
    std::vector<Edge> flipped;
    for (const Edge& e : graph_.edges()) {
        flipped.push_back({e.tail, e.head});
    }
    Network copy(Graph(graph_.vertex_count(), std::move(flipped)), agents_, controllers_, exogenous_, assumption_);
    copy.random_input_ = random_input_;
    return copy;
}

}  // namespace clustersym
