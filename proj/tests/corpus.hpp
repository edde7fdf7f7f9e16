#pragma once

// Shared fixtures and brute-force oracles for the test binaries.

#include <cstdint>
#include <limits>
#include <set>
#include <utility>
#include <vector>

#include "spmap/evaluator.hpp"
#include "spmap/generators.hpp"
#include "spmap/taskgraph.hpp"

namespace spmap::test {

inline TaskGraph graph_from_edges(std::size_t n, std::vector<std::pair<NodeId, NodeId>> const &edges,
                                  double bytes = 1.0e8) {
    TaskGraph g(n);
    for (auto const &[u, v] : edges) g.add_edge(u, v, bytes);
    return g;
}

/// Six-node series-parallel example: a diamond 1->2->3, 1->3 nested in a
/// series with 0->1 and 3->5, in parallel with the path 0->4->5.
inline TaskGraph sp_example() {
    return graph_from_edges(6, {{0, 1}, {1, 2}, {2, 3}, {1, 3}, {3, 5}, {0, 4}, {4, 5}});
}

/// The same graph plus 1->4, which is no longer series-parallel.
inline TaskGraph cut_example() {
    return graph_from_edges(6, {{0, 1}, {1, 2}, {2, 3}, {1, 3}, {3, 5}, {0, 4}, {4, 5}, {1, 4}});
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a * 0x9e3779b97f4a7c15ULL + b;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::size_t distinct_pairs(std::vector<std::pair<NodeId, NodeId>> const &edges) {
    return std::set<std::pair<NodeId, NodeId>>(edges.begin(), edges.end()).size();
}

/// Random SP graph with sampled attributes, optionally with extra edges.
inline TaskGraph instance(std::size_t n, std::uint64_t seed, std::size_t extra_edges) {
    GenConfig cfg;
    cfg.n_tasks = n;
    cfg.extra_edges = extra_edges;
    cfg.seed = seed;
    return augment_attributes(generate_graph(cfg), {}, mix(seed, 1));
}

/// Minimum internal cost over all m^n mappings.
inline double brute_force_optimum(Evaluator const &evaluator, Mapping *argmin = nullptr) {
    std::size_t const n = evaluator.graph().size();
    std::size_t const m = evaluator.platform().size();
    Mapping current = Mapping::uniform(n, 0);
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        double const c = evaluator.internal_cost(current);
        if (c < best) {
            best = c;
            if (argmin) *argmin = current;
        }
        std::size_t i = 0;
        while (i < n && ++current[i] == m) current[i++] = 0;
        if (i == n) break;
    }
    return best;
}

} // namespace spmap::test
