#include "spmap/spdag.hpp"

#include <algorithm>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "spmap/error.hpp"

namespace spmap {

CutRule CutRule::random() {
    return {"random", [](std::span<CutCandidate const> candidates, std::mt19937_64 &rng) {
                std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
                return pick(rng);
            }};
}

CutRule CutRule::smallest_outsize_first() {
    return {"smallest-outsize-first", [](std::span<CutCandidate const> candidates, std::mt19937_64 &) {
                auto const it = std::ranges::min_element(
                    candidates, {}, [](CutCandidate const &c) { return c.outsize; });
                return static_cast<std::size_t>(it - candidates.begin());
            }};
}

CutRule CutRule::from_name(std::string const &name) {
    if (name == "random") return random();
    if (name == "smallest-outsize-first") return smallest_outsize_first();
    throw Error("unknown cut rule '" + name + "'");
}

namespace {

// Appends `next` to the chain `t`, flattening nested series nodes.
DecompTree series(DecompTree t, DecompTree next) {
    if (t.kind != DecompKind::Series) {
        DecompTree s{DecompKind::Series, t.start, t.end, t.outsize, kNoEdge, {}};
        s.children.push_back(std::move(t));
        t = std::move(s);
    }
    t.end = next.end;
    t.outsize = next.outsize;
    if (next.kind == DecompKind::Series) {
        for (auto &child : next.children) t.children.push_back(std::move(child));
    } else {
        t.children.push_back(std::move(next));
    }
    return t;
}

DecompTree parallel(std::vector<DecompTree> group) {
    DecompTree p{DecompKind::Parallel, group.front().start, group.front().end, 0, kNoEdge, {}};
    for (auto &t : group) {
        p.outsize += t.outsize;
        if (t.kind == DecompKind::Parallel) {
            for (auto &child : t.children) p.children.push_back(std::move(child));
        } else {
            p.children.push_back(std::move(t));
        }
    }
    return p;
}

class ForestBuilder {
  public:
    ForestBuilder(TaskGraph const &g, NodeId source, NodeId sink, CutRule const &rule, std::uint64_t seed,
                  DecompositionStats &stats)
        : g_(g), sink_(sink), rule_(rule), rng_(seed), stats_(stats), expected_in_(g.size()) {
        for (NodeId v = 0; v < g.size(); ++v) expected_in_[v] = g.in_degree(v);
        expected_in_[source] += 1; // virtual edge (eps, source)
    }

    DecompForest run(NodeId source) {
        DecompTree core = grow_series(DecompTree::leaf(kNoEdge, kVirtualEndpoint, source));
        if (core.end != kVirtualEndpoint) throw std::logic_error("core decomposition tree did not reach the sink");
        DecompForest forest;
        forest.trees.push_back(strip_virtual(std::move(core)));
        for (auto &t : cut_) forest.trees.push_back(std::move(t));
        return forest;
    }

  private:
    std::size_t out_degree(NodeId v) const { return g_.out_degree(v) + (v == sink_ ? 1 : 0); }

    DecompTree grow_series(DecompTree t) {
        ++stats_.growth_attempts;
        while (t.end != kVirtualEndpoint && expected_in_[t.end] <= t.outsize) {
            NodeId const v = t.end;
            if (out_degree(v) == 1) {
                DecompTree next = v == sink_ ? DecompTree::leaf(kNoEdge, v, kVirtualEndpoint)
                                             : DecompTree::leaf(g_.out_edges(v)[0], v, g_.edge(g_.out_edges(v)[0]).dst);
                t = series(std::move(t), std::move(next));
            } else {
                t = series(std::move(t), grow_parallel(v));
            }
            ++stats_.extensions;
        }
        return t;
    }

    DecompTree grow_parallel(NodeId v) {
        std::vector<DecompTree> wavefront;
        for (EdgeId e : g_.out_edges(v)) wavefront.push_back(DecompTree::leaf(e, v, g_.edge(e).dst));

        for (;;) {
            bool changed;
            do {
                changed = merge_same_endpoints(wavefront);
                if (wavefront.size() == 1) return std::move(wavefront.front());
                for (auto &t : wavefront) {
                    std::size_t const before = stats_.extensions;
                    t = grow_series(std::move(t));
                    if (stats_.extensions != before) changed = true;
                }
                if (std::ranges::any_of(wavefront, [](DecompTree const &t) { return t.end == kVirtualEndpoint; })) {
                    throw std::logic_error("wavefront tree grew past the sink");
                }
            } while (changed);
            cut_one(v, wavefront);
        }
    }

    // Sorts the wavefront by (start,end) and merges every maximal group of
    // trees sharing their endpoints into one parallel node.
    bool merge_same_endpoints(std::vector<DecompTree> &wavefront) {
        std::ranges::stable_sort(wavefront, [](DecompTree const &a, DecompTree const &b) {
            return std::pair{a.start, a.end} < std::pair{b.start, b.end};
        });
        bool merged = false;
        std::vector<DecompTree> next;
        next.reserve(wavefront.size());
        for (std::size_t i = 0; i < wavefront.size();) {
            std::size_t j = i + 1;
            while (j < wavefront.size() && wavefront[j].end == wavefront[i].end) ++j;
            if (j - i >= 2) {
                std::vector<DecompTree> group(std::make_move_iterator(wavefront.begin() + i),
                                              std::make_move_iterator(wavefront.begin() + j));
                next.push_back(parallel(std::move(group)));
                ++stats_.merges;
                merged = true;
            } else {
                next.push_back(std::move(wavefront[i]));
            }
            i = j;
        }
        wavefront = std::move(next);
        return merged;
    }

    void cut_one(NodeId v, std::vector<DecompTree> &wavefront) {
        CutEvent event{v, {}, 0};
        for (auto const &t : wavefront) event.wavefront.push_back({t.start, t.end, t.outsize});
        event.chosen = rule_.choose(event.wavefront, rng_);
        if (event.chosen >= wavefront.size()) throw std::logic_error("cut rule returned an index out of range");

        DecompTree &victim = wavefront[event.chosen];
        expected_in_[victim.end] -= victim.outsize;
        cut_.push_back(std::move(victim));
        wavefront.erase(wavefront.begin() + static_cast<std::ptrdiff_t>(event.chosen));
        ++stats_.cuts;
        stats_.cut_events.push_back(std::move(event));
    }

    static DecompTree strip_virtual(DecompTree t) {
        if (t.kind != DecompKind::Series) return t;
        std::erase_if(t.children, [](DecompTree const &c) { return c.is_virtual_leaf(); });
        if (t.children.size() == 1) return std::move(t.children.front());
        t.start = t.children.front().start;
        t.end = t.children.back().end;
        t.outsize = t.children.back().outsize;
        return t;
    }

    TaskGraph const &g_;
    NodeId sink_;
    CutRule const &rule_;
    std::mt19937_64 rng_;
    DecompositionStats &stats_;
    std::vector<std::size_t> expected_in_;
    std::vector<DecompTree> cut_;
};

} // namespace

DecompForest decompose(TaskGraph const &g, NodeId start, CutRule const &cut_rule, std::uint64_t seed,
                       DecompositionStats *stats) {
    require_valid(g);
    auto const sources = g.sources();
    auto const sinks = g.sinks();
    if (sources.size() != 1 || sinks.size() != 1 || sources[0] == sinks[0]) {
        throw GraphError("decomposition needs exactly one source and one distinct sink; normalize endpoints first");
    }
    if (sources[0] != start) {
        std::ostringstream msg;
        msg << "start node " << start << " is not the graph's source " << sources[0];
        throw GraphError(msg.str());
    }
    DecompositionStats local;
    ForestBuilder builder(g, start, sinks[0], cut_rule, seed, stats ? *stats : local);
    return builder.run(start);
}

DecompForest decompose(NormalizedGraph const &g, CutRule const &cut_rule, std::uint64_t seed,
                       DecompositionStats *stats) {
    return decompose(g.graph, g.start, cut_rule, seed, stats);
}

namespace {

void collect_leaves(DecompTree const &t, std::vector<EdgeId> &out) {
    if (t.kind == DecompKind::Leaf) {
        if (t.edge != kNoEdge) out.push_back(t.edge);
        return;
    }
    for (auto const &c : t.children) collect_leaves(c, out);
}

void collect_nodes(DecompTree const &t, std::set<NodeId> &out) {
    if (t.kind == DecompKind::Leaf) {
        if (t.start != kVirtualEndpoint) out.insert(t.start);
        if (t.end != kVirtualEndpoint) out.insert(t.end);
        return;
    }
    for (auto const &c : t.children) collect_nodes(c, out);
}

// Returns the recomputed outsize, or nullopt after recording an error.
std::optional<std::size_t> check_node(DecompTree const &t, TaskGraph const &g, std::string &err) {
    auto fail = [&](std::string const &what) -> std::optional<std::size_t> {
        std::ostringstream msg;
        msg << kind_name(t.kind) << "[" << t.start << "," << t.end << "]: " << what;
        err = msg.str();
        return std::nullopt;
    };
    std::size_t outsize = 0;
    switch (t.kind) {
    case DecompKind::Leaf:
        if (t.edge == kNoEdge) {
            outsize = 1;
        } else {
            if (t.edge >= g.edge_count()) return fail("edge id out of range");
            if (g.edge(t.edge).src != t.start || g.edge(t.edge).dst != t.end) return fail("endpoints differ from edge");
            outsize = 1;
        }
        break;
    case DecompKind::Series: {
        if (t.children.size() < 2) return fail("series node with fewer than two children");
        if (t.children.front().start != t.start || t.children.back().end != t.end) return fail("chain endpoints");
        for (std::size_t i = 0; i + 1 < t.children.size(); ++i) {
            if (t.children[i].end != t.children[i + 1].start) return fail("children do not form a chain");
        }
        for (auto const &c : t.children) {
            auto const sub = check_node(c, g, err);
            if (!sub) return std::nullopt;
            outsize = *sub;
        }
        break;
    }
    case DecompKind::Parallel:
        if (t.children.size() < 2) return fail("parallel node with fewer than two children");
        for (auto const &c : t.children) {
            if (c.start != t.start || c.end != t.end) return fail("child endpoints differ");
            auto const sub = check_node(c, g, err);
            if (!sub) return std::nullopt;
            outsize += *sub;
        }
        break;
    }
    if (outsize != t.outsize) return fail("stored outsize differs from recomputed edge count");
    return outsize;
}

} // namespace

TreeNodes tree_nodes(DecompTree const &t) {
    TreeNodes result;
    collect_nodes(t, result.with_endpoints);
    result.inner = result.with_endpoints;
    result.inner.erase(t.start);
    result.inner.erase(t.end);
    return result;
}

std::vector<EdgeId> leaf_edges(DecompTree const &t) {
    std::vector<EdgeId> out;
    collect_leaves(t, out);
    return out;
}

std::string check_tree(DecompTree const &t, TaskGraph const &g) {
    std::string err;
    check_node(t, g, err);
    return err;
}

bool is_series_parallel(TaskGraph const &g) {
    auto const normalized = normalize_endpoints(g, 1.0);
    return decompose(normalized, CutRule::smallest_outsize_first(), 0).trees.size() == 1;
}

std::string kind_name(DecompKind kind) {
    switch (kind) {
    case DecompKind::Leaf:
        return "edge";
    case DecompKind::Series:
        return "S";
    case DecompKind::Parallel:
        return "P";
    }
    return "?";
}

namespace {

std::string endpoint_label(NodeId v) { return v == kVirtualEndpoint ? "eps" : std::to_string(v); }

std::size_t emit_dot(DecompTree const &t, std::ostringstream &out, std::size_t &next_id) {
    std::size_t const id = next_id++;
    out << "  n" << id << " [label=\"" << kind_name(t.kind) << " " << endpoint_label(t.start) << "-"
        << endpoint_label(t.end) << "\", shape=" << (t.kind == DecompKind::Parallel ? "ellipse" : "box") << "];\n";
    for (auto const &c : t.children) {
        std::size_t const child = emit_dot(c, out, next_id);
        out << "  n" << id << " -> n" << child << ";\n";
    }
    return id;
}

} // namespace

std::string to_dot(DecompForest const &forest) {
    std::ostringstream out;
    out << "digraph decomposition {\n";
    std::size_t next_id = 0;
    for (std::size_t i = 0; i < forest.trees.size(); ++i) {
        out << "  subgraph cluster_" << i << " {\n  label=\"tree " << i << "\";\n";
        emit_dot(forest.trees[i], out, next_id);
        out << "  }\n";
    }
    out << "}\n";
    return out.str();
}

} // namespace spmap
