#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace spmap {

using NodeId = std::size_t;
using EdgeId = std::size_t;

inline constexpr EdgeId kNoEdge = std::numeric_limits<EdgeId>::max();

/// Performance attributes of a single task.
///
/// `complexity` is operations per byte of input, `parallelizability` the
/// Amdahl fraction in [0,1], `streamability` the FPGA speedup factor and
/// `area` the FPGA area the task occupies.
struct TaskAttributes {
    double complexity = 0.0;
    double parallelizability = 1.0;
    double streamability = 1.0;
    double area = 0.0;

    friend bool operator==(TaskAttributes const &, TaskAttributes const &) = default;
};

struct Edge {
    NodeId src = 0;
    NodeId dst = 0;
    double bytes = 0.0;

    friend bool operator==(Edge const &, Edge const &) = default;
};

/// Directed task graph with dense node ids 0..n-1.
///
/// Construction is append-only. Nothing is checked on insertion beyond id
/// range; `validate` reports every invariant violation at once.
class TaskGraph {
  public:
    TaskGraph() = default;
    explicit TaskGraph(std::size_t node_count);

    NodeId add_node(TaskAttributes attrs = {}, std::string name = {});
    EdgeId add_edge(NodeId src, NodeId dst, double bytes);

    std::size_t size() const { return attrs_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    bool empty() const { return attrs_.empty(); }

    std::span<Edge const> edges() const { return edges_; }
    Edge const &edge(EdgeId e) const { return edges_[e]; }

    /// Outgoing edge ids of `v`, in insertion order.
    std::span<EdgeId const> out_edges(NodeId v) const { return out_[v]; }
    std::span<EdgeId const> in_edges(NodeId v) const { return in_[v]; }
    std::size_t out_degree(NodeId v) const { return out_[v].size(); }
    std::size_t in_degree(NodeId v) const { return in_[v].size(); }

    TaskAttributes const &attributes(NodeId v) const { return attrs_[v]; }
    void set_attributes(NodeId v, TaskAttributes attrs) { attrs_[v] = attrs; }
    std::string const &name(NodeId v) const { return names_[v]; }
    void set_name(NodeId v, std::string name) { names_[v] = std::move(name); }

    std::vector<NodeId> sources() const;
    std::vector<NodeId> sinks() const;

    /// Summed bytes over all incoming edges of `v`.
    double input_bytes(NodeId v) const;

    EdgeId find_edge(NodeId src, NodeId dst) const;

    friend bool operator==(TaskGraph const &a, TaskGraph const &b) {
        return a.attrs_ == b.attrs_ && a.names_ == b.names_ && a.edges_ == b.edges_;
    }

  private:
    std::vector<TaskAttributes> attrs_;
    std::vector<std::string> names_;
    std::vector<Edge> edges_;
    std::vector<std::vector<EdgeId>> out_;
    std::vector<std::vector<EdgeId>> in_;
};

struct Violation {
    enum class Kind { NodeOutOfRange, SelfLoop, DuplicateEdge, NonPositiveBytes, Cycle };
    Kind kind;
    std::string message;
};

std::vector<Violation> validate(TaskGraph const &g);

/// Throws GraphError with the first violation if `g` is not a valid DAG.
void require_valid(TaskGraph const &g);

/// Returns a copy of `g` in which duplicate (src,dst) edges are merged into one
/// edge carrying the larger byte count. Edge order follows first occurrence.
TaskGraph merge_duplicate_edges(TaskGraph const &g);

/// Graph with a unique source `start` and unique sink `end`.
///
/// Nodes with id >= `original_size` are virtual endpoints added by
/// `normalize_endpoints`.
struct NormalizedGraph {
    TaskGraph graph;
    NodeId start = 0;
    NodeId end = 0;
    std::size_t original_size = 0;

    bool is_virtual(NodeId v) const { return v >= original_size; }
};

/// Attributes carried by virtual endpoint tasks: they cost nothing anywhere.
inline constexpr TaskAttributes kVirtualTaskAttributes{0.0, 1.0, 1.0, 0.0};

NormalizedGraph normalize_endpoints(TaskGraph const &g, double default_edge_bytes);

/// Kahn's algorithm with a FIFO ready queue; sources and newly ready
/// successors are enqueued in ascending id order.
std::vector<NodeId> bfs_order(TaskGraph const &g);

/// Kahn's algorithm picking uniformly from the ready set.
std::vector<NodeId> random_topological_order(TaskGraph const &g, std::uint64_t seed);

/// True if every edge goes forward in `order` and `order` is a permutation.
bool is_topological_order(TaskGraph const &g, std::span<NodeId const> order);

} // namespace spmap
