#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spmap/json.hpp"

#include "spmap/taskgraph.hpp"

namespace spmap {

struct GenConfig {
    std::size_t n_tasks = 10;
    std::size_t series_weight = 1;
    std::size_t parallel_weight = 2;
    std::size_t extra_edges = 0;
    double edge_bytes = 1.0e8;
    std::uint64_t seed = 0;

    /// Throws Error on n_tasks < 2 or a zero ratio component.
    void validate() const;
};

/// One step of the series-parallel construction. A series step splits edge
/// `edge` (u,v) into (u,w),(w,v) reusing slot `edge` for (u,w); a parallel
/// step appends a copy of edge `edge`.
struct SpOperation {
    enum class Kind { Series, Parallel };
    Kind kind;
    std::size_t edge;
    NodeId new_node = 0; ///< Series only
};

struct SpConstruction {
    TaskGraph graph;                           ///< after duplicate merging
    std::vector<std::pair<NodeId, NodeId>> raw_edges; ///< before merging
    std::vector<SpOperation> trace;
};

/// Grows a graph from the single edge 0->1 by random series and parallel
/// operations in the configured ratio until it has n_tasks nodes. Node 0 is
/// the source and node 1 the sink. `extra_edges` is ignored here.
SpConstruction random_sp_graph(GenConfig const &cfg);

/// Inserts k new edges oriented by a random topological order. Throws
/// GraphError if fewer than k node pairs are still unconnected.
TaskGraph add_random_edges(TaskGraph const &g, std::size_t k, std::uint64_t seed, double bytes = 1.0e8);

/// random_sp_graph followed by add_random_edges(extra_edges).
TaskGraph generate_graph(GenConfig const &cfg);

struct AttributeDistribution {
    double lognormal_mu = 2.0;
    double lognormal_sigma = 0.5;
    double perfect_parallel_prob = 0.5;
    double area_per_complexity = 1.0;
    bool preserve_complexity = false; ///< keep existing complexity, e.g. from a workflow

    void validate() const;
};

/// Draws complexity and streamability from a lognormal, parallelizability as
/// 1 with the configured probability and uniform in [0,1) otherwise, and area
/// proportional to complexity.
TaskGraph augment_attributes(TaskGraph const &g, AttributeDistribution const &dist, std::uint64_t seed);

struct WorkflowOptions {
    double reference_rate = 1.0e9;      ///< operations per second behind declared runtimes
    double source_input_bytes = 1.0e8;  ///< assumed input of tasks without predecessors
    bool allow_external_inputs = false; ///< accept input files that no task produces
};

/// Builds a task graph from a workflow instance document.
///
/// Accepted subset: `workflow.tasks[]` with `name` (or `id`), `runtime` or
/// `runtimeInSeconds` or `operations`, optional `parents`/`children` name
/// lists and `files[]` of `{link: input|output, name, size}`. Other fields
/// are ignored. Files between the same pair of tasks add up; parent links
/// without a file become 1-byte control edges.
TaskGraph ingest_workflow(json const &doc, WorkflowOptions const &options = {});

} // namespace spmap
