#pragma once

#include "clustersym/models.hpp"
#include "clustersym/relations.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace clustersym {

/// Oriented edge, 0-based vertex indices. The incidence column has +1 at the
/// head and -1 at the tail, so zeta_e = y_head - y_tail.
struct Edge {
    int head = 0;
    int tail = 0;
};

/// Simple undirected graph with a fixed orientation per edge.
class Graph {
public:
    /// Throws InvalidNetwork on self-loops, repeated pairs or bad indices.
    Graph(int vertex_count, std::vector<Edge> edges);

    [[nodiscard]] int vertex_count() const { return n_; }
    [[nodiscard]] int edge_count() const { return static_cast<int>(edges_.size()); }
    [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
    [[nodiscard]] const Edge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }

    /// Edge joining i and j in either orientation, or -1.
    [[nodiscard]] int edge_between(int i, int j) const { return lookup_[index(i, j)]; }
    [[nodiscard]] bool adjacent(int i, int j) const { return edge_between(i, j) >= 0; }
    [[nodiscard]] int degree(int v) const { return static_cast<int>(neighbors_[static_cast<std::size_t>(v)].size()); }
    [[nodiscard]] const std::vector<int>& neighbors(int v) const { return neighbors_[static_cast<std::size_t>(v)]; }
    [[nodiscard]] bool is_connected() const;

    static Graph cycle(int n);
    static Graph path(int n);
    static Graph complete(int n);
    /// K_{a,b}: vertices 0..a-1 on one side, edges oriented with heads on the b side.
    static Graph complete_bipartite(int a, int b);

private:
    [[nodiscard]] std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
    }

    int n_;
    std::vector<Edge> edges_;
    std::vector<int> lookup_;
    std::vector<std::vector<int>> neighbors_;
};

/// n x m signed incidence matrix.
Eigen::MatrixXd incidence(const Graph& g);

/// Automorphism psi together with the induced edge permutation and sign
/// vector. Conventions: (P y)_i = y_{psi(i)}, Q_{fe} = [psi(f) = e], and
/// signs[e] = +1 when the edge mapped onto e keeps its orientation, so that
/// P E = E Q diag(signs).
struct VertexPermutation {
    std::vector<int> image;
    std::vector<int> edge_image;
    std::vector<int> signs;

    [[nodiscard]] Eigen::MatrixXd p_matrix() const;
    [[nodiscard]] Eigen::MatrixXd q_matrix() const;
    [[nodiscard]] Eigen::MatrixXd d_matrix() const;
    [[nodiscard]] bool preserves_orientation() const;
};

/// Throws NotAnAutomorphism if `image` is not a bijection preserving adjacency.
VertexPermutation permutation_triple(std::span<const int> image, const Graph& g);

/// (P_psi y)_i = y_{psi(i)}; throws DimensionMismatch.
std::vector<double> apply_output_permutation(const VertexPermutation& p, std::span<const double> y);

enum class Assumption {
    OutputStrictAgents,       // A1
    OutputStrictControllers,  // A2
};

/// Agent or controller attached to a vertex or an edge.
struct Attachment {
    MonotoneRelation relation = MonotoneRelation::identity();
    std::optional<DynamicModel> model;
    /// User-declared equivalence label; authoritative over relation comparison.
    std::optional<std::string> label;
    /// How the attachment was written in the network file.
    nlohmann::json literal;

    static Attachment from_relation(MonotoneRelation r, nlohmann::json literal = {});
    static Attachment from_model(DynamicModel m, nlohmann::json literal = {});
};

/// Range of a common random exogenous input drawn once per run.
struct CommonRandomInput {
    double low = 0.0;
    double high = 1.0;
    /// The draw and its seed, and the exogenous inputs before it was added.
    double value = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> declared;
};

/// Diffusively coupled network (graph, agents, controllers, exogenous input).
class Network {
public:
    /// Validates sizes, connectivity and the declared assumption profile.
    Network(Graph graph, std::vector<Attachment> agents, std::vector<Attachment> controllers,
            std::vector<double> exogenous, Assumption assumption);

    [[nodiscard]] const Graph& graph() const { return graph_; }
    [[nodiscard]] int vertex_count() const { return graph_.vertex_count(); }
    [[nodiscard]] int edge_count() const { return graph_.edge_count(); }
    [[nodiscard]] const std::vector<Attachment>& agents() const { return agents_; }
    [[nodiscard]] const std::vector<Attachment>& controllers() const { return controllers_; }
    [[nodiscard]] const MonotoneRelation& agent_relation(int i) const { return agents_[static_cast<std::size_t>(i)].relation; }
    [[nodiscard]] const MonotoneRelation& controller_relation(int e) const {
        return controllers_[static_cast<std::size_t>(e)].relation;
    }
    [[nodiscard]] const std::vector<double>& exogenous() const { return exogenous_; }
    [[nodiscard]] Assumption assumption() const { return assumption_; }
    [[nodiscard]] const Eigen::MatrixXd& incidence() const { return incidence_; }

    [[nodiscard]] const std::optional<CommonRandomInput>& random_input() const { return random_input_; }
    void set_random_input(std::optional<CommonRandomInput> r) { random_input_ = r; }

    [[nodiscard]] Network with_exogenous(std::vector<double> w) const;
    /// Same network with every edge orientation reversed.
    [[nodiscard]] Network with_flipped_edges() const;

private:
    Graph graph_;
    std::vector<Attachment> agents_;
    std::vector<Attachment> controllers_;
    std::vector<double> exogenous_;
    Assumption assumption_;
    Eigen::MatrixXd incidence_;
    std::optional<CommonRandomInput> random_input_;
};

}  // namespace clustersym
