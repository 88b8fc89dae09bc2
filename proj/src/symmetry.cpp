#include "clustersym/symmetry.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <numeric>
#include <set>
#include <string>

namespace clustersym {

namespace {

struct Search {
    const Graph& g;
    std::span<const int> vertex_colors;
    std::span<const int> edge_colors;
    bool respect_orientation;

    std::vector<int> image;
    std::vector<char> used;
    std::vector<std::vector<int>> found;

    bool consistent(int k, int c) const {
        for (int j = 0; j < k; ++j) {
            const int cj = image[static_cast<std::size_t>(j)];
            const int e = g.edge_between(k, j);
            const int f = g.edge_between(c, cj);
            if ((e >= 0) != (f >= 0)) {
                return false;
            }
            if (e < 0) {
                continue;
            }
            if (edge_colors[static_cast<std::size_t>(e)] != edge_colors[static_cast<std::size_t>(f)]) {
                return false;
            }
            if (respect_orientation && ((g.edge(e).head == k) != (g.edge(f).head == c))) {
                return false;
            }
        }
        return true;
    }

    void extend(int k) {
        const int n = g.vertex_count();
        if (k == n) {
            found.push_back(image);
            return;
        }
        for (int c = 0; c < n; ++c) {
            if (used[static_cast<std::size_t>(c)] ||
                vertex_colors[static_cast<std::size_t>(c)] != vertex_colors[static_cast<std::size_t>(k)] ||
                g.degree(c) != g.degree(k) || !consistent(k, c)) {
                continue;
            }
            image[static_cast<std::size_t>(k)] = c;
            used[static_cast<std::size_t>(c)] = 1;
            extend(k + 1);
            used[static_cast<std::size_t>(c)] = 0;
        }
    }

    std::vector<std::vector<int>> run_from(int first) {
        const int n = g.vertex_count();
        image.assign(static_cast<std::size_t>(n), -1);
        used.assign(static_cast<std::size_t>(n), 0);
        found.clear();
        if (vertex_colors[static_cast<std::size_t>(first)] != vertex_colors[0] || g.degree(first) != g.degree(0)) {
            return {};
        }
        image[0] = first;
        used[static_cast<std::size_t>(first)] = 1;
        extend(1);
        return std::move(found);
    }
};

// Class ids by first occurrence under an equivalence predicate.
template <typename Same>
std::vector<int> classify(std::size_t count, Same same) {
    std::vector<int> cls(count, -1);
    int next = 0;
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < i && cls[i] < 0; ++j) {
            if (same(i, j)) {
                cls[i] = cls[j];
            }
        }
        if (cls[i] < 0) {
            cls[i] = next++;
        }
    }
    return cls;
}

bool same_attachment(const Attachment& a, const Attachment& b) {
    if (a.label || b.label) {
        return a.label == b.label;
    }
    return weakly_equivalent(a.relation, b.relation);
}

}  // namespace

std::vector<int> Partition::block_index(int vertex_count) const {
    std::vector<int> idx(static_cast<std::size_t>(vertex_count), -1);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        for (int v : blocks[b]) {
            idx[static_cast<std::size_t>(v)] = static_cast<int>(b);
        }
    }
    return idx;
}

bool Partition::refines(const Partition& coarser) const {
    int n = 0;
    for (const auto& b : coarser.blocks) {
        for (int v : b) {
            n = std::max(n, v + 1);
        }
    }
    for (const auto& b : blocks) {
        for (int v : b) {
            n = std::max(n, v + 1);
        }
    }
    const auto idx = coarser.block_index(n);
    for (const auto& b : blocks) {
        for (int v : b) {
            if (idx[static_cast<std::size_t>(v)] != idx[static_cast<std::size_t>(b.front())]) {
                return false;
            }
        }
    }
    return true;
}

std::vector<std::size_t> Partition::sizes() const {
    std::vector<std::size_t> s;
    for (const auto& b : blocks) {
        s.push_back(b.size());
    }
    return s;
}

Partition make_partition(std::vector<std::vector<int>> blocks) {
    for (auto& b : blocks) {
        std::sort(b.begin(), b.end());
    }
    std::erase_if(blocks, [](const auto& b) { return b.empty(); });
    std::sort(blocks.begin(), blocks.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return Partition{std::move(blocks), std::nullopt};
}

AutomorphismSet graph_automorphisms(const Graph& g, std::span<const int> vertex_colors,
                                    std::span<const int> edge_colors, bool respect_orientation,
                                    const AutomorphismOptions& opts) {
    const int n = g.vertex_count();
    if (n > opts.max_vertices) {
        throw TooLarge("automorphism enumeration is limited to " + std::to_string(opts.max_vertices) +
                       " vertices, graph has " + std::to_string(n));
    }
    std::vector<int> vc(vertex_colors.begin(), vertex_colors.end());
    std::vector<int> ec(edge_colors.begin(), edge_colors.end());
    if (vc.empty()) {
        vc.assign(static_cast<std::size_t>(n), 0);
    }
    if (ec.empty()) {
        ec.assign(static_cast<std::size_t>(g.edge_count()), 0);
    }
    if (static_cast<int>(vc.size()) != n || static_cast<int>(ec.size()) != g.edge_count()) {
        throw DimensionMismatch("color vectors do not match the graph");
    }

    std::vector<std::vector<std::vector<int>>> per_first(static_cast<std::size_t>(n));
    auto run = [&](int first) {
        Search s{g, vc, ec, respect_orientation, {}, {}, {}};
        return s.run_from(first);
    };
    if (opts.workers <= 1) {
        for (int first = 0; first < n; ++first) {
            per_first[static_cast<std::size_t>(first)] = run(first);
        }
    } else {
        for (int start = 0; start < n; start += static_cast<int>(opts.workers)) {
            std::vector<std::future<std::vector<std::vector<int>>>> jobs;
            const int stop = std::min(n, start + static_cast<int>(opts.workers));
            for (int first = start; first < stop; ++first) {
                jobs.push_back(std::async(std::launch::async, run, first));
            }
            for (int first = start; first < stop; ++first) {
                per_first[static_cast<std::size_t>(first)] = jobs[static_cast<std::size_t>(first - start)].get();
            }
        }
    }

    AutomorphismSet out;
    for (const auto& chunk : per_first) {
        for (const auto& img : chunk) {
            out.elements.push_back(permutation_triple(img, g));
        }
    }
    return out;
}

VertexPermutation compose(const VertexPermutation& outer, const VertexPermutation& inner, const Graph& g) {
    std::vector<int> img(inner.image.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
        img[i] = outer.image[static_cast<std::size_t>(inner.image[i])];
    }
    return permutation_triple(img, g);
}

bool verify_group(AutomorphismSet& set) {
    std::set<std::vector<int>> members;
    for (const auto& p : set.elements) {
        members.insert(p.image);
    }
    set.closed = false;
    if (set.elements.empty()) {
        return false;
    }
    const std::size_t n = set.elements.front().image.size();
    std::vector<int> id(n);
    std::iota(id.begin(), id.end(), 0);
    if (!members.count(id)) {
        return false;
    }
    std::vector<int> img(n);
    for (const auto& a : set.elements) {
        for (std::size_t i = 0; i < n; ++i) {
            img[static_cast<std::size_t>(a.image[i])] = static_cast<int>(i);
        }
        if (!members.count(img)) {
            return false;
        }
        for (const auto& b : set.elements) {
            for (std::size_t i = 0; i < n; ++i) {
                img[i] = a.image[static_cast<std::size_t>(b.image[i])];
            }
            if (!members.count(img)) {
                return false;
            }
        }
    }
    set.closed = true;
    return true;
}

std::vector<int> agent_classes(const Network& net) {
    const auto& agents = net.agents();
    const auto& w = net.exogenous();
    return classify(agents.size(),
                    [&](std::size_t i, std::size_t j) { return w[i] == w[j] && same_attachment(agents[i], agents[j]); });
}

std::vector<int> controller_classes(const Network& net) {
    const auto& ctrl = net.controllers();
    return classify(ctrl.size(), [&](std::size_t i, std::size_t j) { return same_attachment(ctrl[i], ctrl[j]); });
}

bool assumption3_holds(const Network& net) {
    return std::all_of(net.controllers().begin(), net.controllers().end(),
                       [](const Attachment& c) { return is_odd(c.relation); });
}

bool weakly_homogeneous(const Network& net) {
    const auto a = agent_classes(net);
    const auto c = controller_classes(net);
    return std::all_of(a.begin(), a.end(), [](int x) { return x == 0; }) &&
           std::all_of(c.begin(), c.end(), [](int x) { return x == 0; });
}

AutomorphismSet weak_automorphisms(const Network& net, const AutomorphismOptions& opts) {
    const auto vc = agent_classes(net);
    const auto ec = controller_classes(net);
    return graph_automorphisms(net.graph(), vc, ec, !assumption3_holds(net), opts);
}

Partition orbit_partition(int vertex_count, const AutomorphismSet& group) {
    std::vector<int> parent(static_cast<std::size_t>(vertex_count));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[static_cast<std::size_t>(v)] != v) {
            v = parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
        }
        return v;
    };
    for (const auto& p : group.elements) {
        for (int i = 0; i < vertex_count; ++i) {
            const int a = find(i);
            const int b = find(p.image[static_cast<std::size_t>(i)]);
            if (a != b) {
                parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
            }
        }
    }
    std::map<int, std::vector<int>> blocks;
    for (int i = 0; i < vertex_count; ++i) {
        blocks[find(i)].push_back(i);
    }
    std::vector<std::vector<int>> out;
    for (auto& [root, members] : blocks) {
        out.push_back(std::move(members));
    }
    return make_partition(std::move(out));
}

Partition exchangeability_partition(const Network& net) {
    return orbit_partition(net.vertex_count(), weak_automorphisms(net));
}

Partition predict_clusters(const Network& net, const std::optional<SolveOptions>& solve_with) {
    Partition p;
    if (assumption3_holds(net) && weakly_homogeneous(net)) {
        std::vector<int> all(static_cast<std::size_t>(net.vertex_count()));
        std::iota(all.begin(), all.end(), 0);
        p = make_partition({std::move(all)});
    } else {
        p = exchangeability_partition(net);
    }
    if (solve_with) {
        const SteadyState ss = solve(net, *solve_with);
        std::vector<double> values;
        for (const auto& block : p.blocks) {
            double sum = 0.0;
            for (int v : block) {
                sum += ss.y[static_cast<std::size_t>(v)];
            }
            values.push_back(sum / static_cast<double>(block.size()));
        }
        p.values = std::move(values);
    }
    return p;
}

}  // namespace clustersym
