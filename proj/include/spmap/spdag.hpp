#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "spmap/taskgraph.hpp"

namespace spmap {

/// Endpoint marker for the virtual edges (eps,s) and (t,eps) that open and
/// close the core decomposition tree. Never collides with a NodeId.
inline constexpr NodeId kVirtualEndpoint = std::numeric_limits<NodeId>::max();

enum class DecompKind { Leaf, Series, Parallel };

/// Series-parallel decomposition tree over the edges of a task graph.
///
/// A Leaf stands for one edge, a Series for a chain of children where each
/// child ends where the next starts, and a Parallel for two or more children
/// sharing both endpoints. `outsize` counts the edges of the subtree that end
/// in `end`.
struct DecompTree {
    DecompKind kind = DecompKind::Leaf;
    NodeId start = 0;
    NodeId end = 0;
    std::size_t outsize = 1;
    EdgeId edge = kNoEdge; ///< Leaf only; kNoEdge for virtual leaves.
    std::vector<DecompTree> children;

    static DecompTree leaf(EdgeId e, NodeId u, NodeId v) { return {DecompKind::Leaf, u, v, 1, e, {}}; }

    bool is_virtual_leaf() const { return kind == DecompKind::Leaf && edge == kNoEdge; }

    friend bool operator==(DecompTree const &, DecompTree const &) = default;
};

struct DecompForest {
    std::vector<DecompTree> trees;

    friend bool operator==(DecompForest const &, DecompForest const &) = default;
};

/// Endpoints and outsize of a wavefront tree offered to a cut rule.
struct CutCandidate {
    NodeId start;
    NodeId end;
    std::size_t outsize;
};

/// Chooses which active tree of a deadlocked wavefront gets cut off.
///
/// Candidates arrive sorted by (start,end). The returned index must be in
/// range.
class CutRule {
  public:
    using Chooser = std::function<std::size_t(std::span<CutCandidate const>, std::mt19937_64 &)>;

    CutRule(std::string name, Chooser choose) : name_(std::move(name)), choose_(std::move(choose)) {}

    /// Uniform choice from the seeded generator.
    static CutRule random();
    /// Fewest edges into the end node; ties go to the first candidate.
    static CutRule smallest_outsize_first();
    /// Looks a rule up by its CLI name ("random", "smallest-outsize-first").
    static CutRule from_name(std::string const &name);

    std::string const &name() const { return name_; }
    std::size_t choose(std::span<CutCandidate const> candidates, std::mt19937_64 &rng) const {
        return choose_(candidates, rng);
    }

  private:
    std::string name_;
    Chooser choose_;
};

struct CutEvent {
    NodeId parallel_start; ///< node whose grow_parallel call deadlocked
    std::vector<CutCandidate> wavefront;
    std::size_t chosen;
};

struct DecompositionStats {
    std::size_t extensions = 0; ///< series extensions by an edge or a parallel subtree
    std::size_t merges = 0;     ///< parallel merges of same-endpoint trees
    std::size_t cuts = 0;
    std::size_t growth_attempts = 0; ///< grow_series calls, including blocked ones
    std::vector<CutEvent> cut_events;

    std::size_t elementary_operations() const { return extensions + merges + cuts; }
};

/// Decomposes a single-source single-sink DAG into a forest of series-parallel
/// trees whose leaves partition the edge set. The first tree is the core tree
/// spanning `start` to the sink; cut-off trees follow in cut order.
///
/// Throws GraphError if `g` is cyclic or `start` is not the unique source of a
/// graph with a unique sink.
DecompForest decompose(TaskGraph const &g, NodeId start, CutRule const &cut_rule, std::uint64_t seed,
                       DecompositionStats *stats = nullptr);

/// Convenience overload for a normalized graph.
DecompForest decompose(NormalizedGraph const &g, CutRule const &cut_rule, std::uint64_t seed,
                       DecompositionStats *stats = nullptr);

struct TreeNodes {
    std::set<NodeId> inner;          ///< without the tree's endpoints
    std::set<NodeId> with_endpoints; ///< every node touched by the tree's edges
};

TreeNodes tree_nodes(DecompTree const &t);

/// Edge ids of all non-virtual leaves, in tree order.
std::vector<EdgeId> leaf_edges(DecompTree const &t);

/// Recomputes every structural invariant of `t` against `g`; returns an error
/// description or an empty string.
std::string check_tree(DecompTree const &t, TaskGraph const &g);

/// True iff the decomposition of the normalized graph is a single tree.
bool is_series_parallel(TaskGraph const &g);

std::string to_dot(DecompForest const &forest);
std::string kind_name(DecompKind kind);

} // namespace spmap
