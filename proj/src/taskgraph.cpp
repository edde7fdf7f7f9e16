#include "spmap/taskgraph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <sstream>

#include "spmap/error.hpp"

namespace spmap {

TaskGraph::TaskGraph(std::size_t node_count)
    : attrs_(node_count), names_(node_count), out_(node_count), in_(node_count) {}

NodeId TaskGraph::add_node(TaskAttributes attrs, std::string name) {
    attrs_.push_back(attrs);
    names_.push_back(std::move(name));
    out_.emplace_back();
    in_.emplace_back();
    return attrs_.size() - 1;
}

EdgeId TaskGraph::add_edge(NodeId src, NodeId dst, double bytes) {
    if (src >= size() || dst >= size()) {
        std::ostringstream msg;
        msg << "edge " << src << "->" << dst << " references a node outside 0.." << size();
        throw GraphError(msg.str());
    }
    EdgeId const id = edges_.size();
    edges_.push_back({src, dst, bytes});
    out_[src].push_back(id);
    in_[dst].push_back(id);
    return id;
}

std::vector<NodeId> TaskGraph::sources() const {
    std::vector<NodeId> result;
    for (NodeId v = 0; v < size(); ++v) {
        if (in_[v].empty()) result.push_back(v);
    }
    return result;
}

std::vector<NodeId> TaskGraph::sinks() const {
    std::vector<NodeId> result;
    for (NodeId v = 0; v < size(); ++v) {
        if (out_[v].empty()) result.push_back(v);
    }
    return result;
}

double TaskGraph::input_bytes(NodeId v) const {
    double total = 0.0;
    for (EdgeId e : in_[v]) total += edges_[e].bytes;
    return total;
}

EdgeId TaskGraph::find_edge(NodeId src, NodeId dst) const {
    for (EdgeId e : out_[src]) {
        if (edges_[e].dst == dst) return e;
    }
    return kNoEdge;
}

namespace {

// Nodes that Kahn's algorithm cannot remove lie on or behind a cycle.
std::vector<NodeId> nodes_not_sorted(TaskGraph const &g) {
    std::vector<std::size_t> indeg(g.size());
    for (NodeId v = 0; v < g.size(); ++v) indeg[v] = g.in_degree(v);
    std::vector<NodeId> stack = g.sources();
    std::vector<bool> removed(g.size(), false);
    while (!stack.empty()) {
        NodeId const v = stack.back();
        stack.pop_back();
        removed[v] = true;
        for (EdgeId e : g.out_edges(v)) {
            if (--indeg[g.edge(e).dst] == 0) stack.push_back(g.edge(e).dst);
        }
    }
    std::vector<NodeId> rest;
    for (NodeId v = 0; v < g.size(); ++v) {
        if (!removed[v]) rest.push_back(v);
    }
    return rest;
}

} // namespace

std::vector<Violation> validate(TaskGraph const &g) {
    std::vector<Violation> out;
    std::map<std::pair<NodeId, NodeId>, EdgeId> seen;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        Edge const &edge = g.edge(e);
        std::ostringstream label;
        label << "edge #" << e << " (" << edge.src << "->" << edge.dst << ")";
        if (edge.src >= g.size() || edge.dst >= g.size()) {
            out.push_back({Violation::Kind::NodeOutOfRange, label.str() + " references a missing node"});
            continue;
        }
        if (edge.src == edge.dst) {
            out.push_back({Violation::Kind::SelfLoop, label.str() + " is a self-loop"});
        }
        if (!(edge.bytes > 0.0)) {
            out.push_back({Violation::Kind::NonPositiveBytes, label.str() + " has non-positive data size"});
        }
        auto [it, inserted] = seen.emplace(std::pair{edge.src, edge.dst}, e);
        if (!inserted) {
            std::ostringstream msg;
            msg << label.str() << " duplicates edge #" << it->second;
            out.push_back({Violation::Kind::DuplicateEdge, msg.str()});
        }
    }
    auto const cyclic = nodes_not_sorted(g);
    if (!cyclic.empty()) {
        std::ostringstream msg;
        msg << "cycle through nodes {";
        for (std::size_t i = 0; i < cyclic.size(); ++i) msg << (i ? "," : "") << cyclic[i];
        msg << "}";
        out.push_back({Violation::Kind::Cycle, msg.str()});
    }
    return out;
}

void require_valid(TaskGraph const &g) {
    auto const violations = validate(g);
    if (!violations.empty()) throw GraphError("invalid task graph: " + violations.front().message);
}

TaskGraph merge_duplicate_edges(TaskGraph const &g) {
    TaskGraph out;
    for (NodeId v = 0; v < g.size(); ++v) out.add_node(g.attributes(v), g.name(v));
    std::map<std::pair<NodeId, NodeId>, std::size_t> index;
    std::vector<Edge> merged;
    for (Edge const &e : g.edges()) {
        auto [it, inserted] = index.emplace(std::pair{e.src, e.dst}, merged.size());
        if (inserted) {
            merged.push_back(e);
        } else {
            merged[it->second].bytes = std::max(merged[it->second].bytes, e.bytes);
        }
    }
    for (Edge const &e : merged) out.add_edge(e.src, e.dst, e.bytes);
    return out;
}

NormalizedGraph normalize_endpoints(TaskGraph const &g, double default_edge_bytes) {
    if (g.empty()) throw GraphError("cannot normalize an empty graph");
    auto const sources = g.sources();
    auto const sinks = g.sinks();
    NormalizedGraph result{g, 0, 0, g.size()};
    if (sources.size() == 1 && sinks.size() == 1 && sources[0] != sinks[0]) {
        result.start = sources[0];
        result.end = sinks[0];
        return result;
    }
    TaskGraph &h = result.graph;
    result.start = h.add_node(kVirtualTaskAttributes, "virtual_start");
    result.end = h.add_node(kVirtualTaskAttributes, "virtual_end");
    for (NodeId s : sources) h.add_edge(result.start, s, default_edge_bytes);
    for (NodeId t : sinks) h.add_edge(t, result.end, default_edge_bytes);
    return result;
}

std::vector<NodeId> bfs_order(TaskGraph const &g) {
    std::vector<std::size_t> indeg(g.size());
    for (NodeId v = 0; v < g.size(); ++v) indeg[v] = g.in_degree(v);
    std::deque<NodeId> ready;
    for (NodeId v : g.sources()) ready.push_back(v);

    std::vector<NodeId> order;
    order.reserve(g.size());
    std::vector<NodeId> released;
    while (!ready.empty()) {
        NodeId const v = ready.front();
        ready.pop_front();
        order.push_back(v);
        released.clear();
        for (EdgeId e : g.out_edges(v)) {
            NodeId const w = g.edge(e).dst;
            if (--indeg[w] == 0) released.push_back(w);
        }
        std::sort(released.begin(), released.end());
        ready.insert(ready.end(), released.begin(), released.end());
    }
    if (order.size() != g.size()) throw GraphError("cycle detected while computing breadth-first order");
    return order;
}

std::vector<NodeId> random_topological_order(TaskGraph const &g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> indeg(g.size());
    for (NodeId v = 0; v < g.size(); ++v) indeg[v] = g.in_degree(v);
    std::vector<NodeId> ready = g.sources();

    std::vector<NodeId> order;
    order.reserve(g.size());
    while (!ready.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, ready.size() - 1);
        std::size_t const i = pick(rng);
        NodeId const v = ready[i];
        ready[i] = ready.back();
        ready.pop_back();
        order.push_back(v);
        for (EdgeId e : g.out_edges(v)) {
            NodeId const w = g.edge(e).dst;
            if (--indeg[w] == 0) ready.push_back(w);
        }
    }
    if (order.size() != g.size()) throw GraphError("cycle detected while computing random topological order");
    return order;
}

bool is_topological_order(TaskGraph const &g, std::span<NodeId const> order) {
    if (order.size() != g.size()) return false;
    std::vector<std::size_t> position(g.size(), g.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (order[i] >= g.size() || position[order[i]] != g.size()) return false;
        position[order[i]] = i;
    }
    return std::ranges::all_of(g.edges(), [&](Edge const &e) { return position[e.src] < position[e.dst]; });
}

} // namespace spmap
