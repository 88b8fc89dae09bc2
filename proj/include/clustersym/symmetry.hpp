#pragma once

#include "clustersym/network.hpp"
#include "clustersym/steady_state.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace clustersym {

struct AutomorphismSet {
    /// Sorted lexicographically by image array; the identity comes first.
    std::vector<VertexPermutation> elements;
    /// Set by verify_group(): identity present, closed under composition
    /// and inverses.
    bool closed = false;
};

/// Disjoint vertex blocks covering V, each sorted, ordered by first vertex.
struct Partition {
    std::vector<std::vector<int>> blocks;
    std::optional<std::vector<double>> values;

    [[nodiscard]] std::vector<int> block_index(int vertex_count) const;
    /// Every block of *this lies inside one block of coarser.
    [[nodiscard]] bool refines(const Partition& coarser) const;
    [[nodiscard]] std::vector<std::size_t> sizes() const;
};

/// Builds a partition from arbitrary disjoint blocks (normalizes order).
Partition make_partition(std::vector<std::vector<int>> blocks);

struct AutomorphismOptions {
    int max_vertices = 16;
    /// Parallel search over the image of vertex 0; output is identical for
    /// any worker count.
    unsigned workers = 1;
};

/// All permutations preserving adjacency, vertex colors, edge colors and,
/// when asked, every edge orientation. Throws TooLarge past max_vertices.
AutomorphismSet graph_automorphisms(const Graph& g, std::span<const int> vertex_colors,
                                    std::span<const int> edge_colors, bool respect_orientation,
                                    const AutomorphismOptions& opts = {});

/// Checks the group axioms by composition table and records the result in
/// set.closed.
bool verify_group(AutomorphismSet& set);

VertexPermutation compose(const VertexPermutation& outer, const VertexPermutation& inner, const Graph& g);

/// Weak-equivalence classes of the agents: user labels when present,
/// otherwise relation comparison at the weak-equivalence tolerance. Agents
/// with different exogenous inputs are never in the same class.
std::vector<int> agent_classes(const Network& net);
std::vector<int> controller_classes(const Network& net);

/// Every controller relation is odd.
bool assumption3_holds(const Network& net);

/// All agents in one class and all controllers in one class.
bool weakly_homogeneous(const Network& net);

AutomorphismSet weak_automorphisms(const Network& net, const AutomorphismOptions& opts = {});

/// Orbits of the group acting on {0..n-1}.
Partition orbit_partition(int vertex_count, const AutomorphismSet& group);

/// Connected components of the exchangeability graph (the orbits of the
/// weak automorphism group).
Partition exchangeability_partition(const Network& net);

/// Predicted clusters. A weakly homogeneous network with odd controllers
/// collapses to one consensus block. With solver options, blocks carry the
/// mean steady-state output of their vertices.
Partition predict_clusters(const Network& net, const std::optional<SolveOptions>& solve_with = std::nullopt);

}  // namespace clustersym
