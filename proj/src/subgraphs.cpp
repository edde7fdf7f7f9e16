#include "spmap/mappers.hpp"

#include <algorithm>
#include <set>

namespace spmap {

SubgraphSet::SubgraphSet(std::vector<std::vector<NodeId>> subgraphs) {
    for (auto &s : subgraphs) {
        std::ranges::sort(s);
        auto const [first, last] = std::ranges::unique(s);
        s.erase(first, last);
    }
    std::erase_if(subgraphs, [](auto const &s) { return s.empty(); });
    std::ranges::sort(subgraphs);
    auto const [first, last] = std::ranges::unique(subgraphs);
    subgraphs.erase(first, last);
    subgraphs_ = std::move(subgraphs);
}

bool SubgraphSet::contains(std::vector<NodeId> const &nodes) const {
    std::vector<NodeId> key = nodes;
    std::ranges::sort(key);
    return std::ranges::binary_search(subgraphs_, key);
}

SubgraphSet single_node_subgraphs(TaskGraph const &g) {
    std::vector<std::vector<NodeId>> sets;
    sets.reserve(g.size());
    for (NodeId v = 0; v < g.size(); ++v) sets.push_back({v});
    return SubgraphSet(std::move(sets));
}

namespace {

// Returns the real nodes touched by `t` and records operation subgraphs.
std::set<NodeId> collect(DecompTree const &t, std::size_t original_size, std::vector<std::vector<NodeId>> &out) {
    auto real = [&](NodeId v) { return v != kVirtualEndpoint && v < original_size; };
    std::set<NodeId> nodes;
    if (t.kind == DecompKind::Leaf) {
        if (real(t.start)) nodes.insert(t.start);
        if (real(t.end)) nodes.insert(t.end);
        return nodes;
    }
    for (auto const &child : t.children) nodes.merge(collect(child, original_size, out));
    if (t.kind == DecompKind::Parallel) {
        out.emplace_back(nodes.begin(), nodes.end());
    } else {
        std::vector<NodeId> inner;
        for (NodeId v : nodes) {
            if (v != t.start && v != t.end) inner.push_back(v);
        }
        out.push_back(std::move(inner));
    }
    return nodes;
}

} // namespace

SubgraphSet subgraphs_from_forest(DecompForest const &forest, std::size_t original_size) {
    std::vector<std::vector<NodeId>> sets;
    for (NodeId v = 0; v < original_size; ++v) sets.push_back({v});
    for (auto const &t : forest.trees) collect(t, original_size, sets);
    return SubgraphSet(std::move(sets));
}

SubgraphSet series_parallel_subgraphs(TaskGraph const &g, CutRule const &cut_rule, std::uint64_t seed) {
    auto const normalized = normalize_endpoints(g, 1.0);
    auto const forest = decompose(normalized, cut_rule, seed);
    return subgraphs_from_forest(forest, g.size());
}

} // namespace spmap
