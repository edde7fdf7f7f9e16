#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spmap/evaluator.hpp"
#include "spmap/platform.hpp"
#include "spmap/spdag.hpp"
#include "spmap/taskgraph.hpp"

namespace spmap {

/// Candidate subgraphs for the greedy engine, each a sorted node list.
/// Kept sorted lexicographically and free of duplicates.
class SubgraphSet {
  public:
    SubgraphSet() = default;
    explicit SubgraphSet(std::vector<std::vector<NodeId>> subgraphs);

    std::vector<std::vector<NodeId>> const &subgraphs() const { return subgraphs_; }
    std::size_t size() const { return subgraphs_.size(); }
    bool contains(std::vector<NodeId> const &nodes) const;

    friend bool operator==(SubgraphSet const &, SubgraphSet const &) = default;

  private:
    std::vector<std::vector<NodeId>> subgraphs_;
};

SubgraphSet single_node_subgraphs(TaskGraph const &g);

/// Singletons plus the inner nodes of every series operation and the
/// endpoint-inclusive nodes of every parallel operation of the decomposition
/// forest, with virtual endpoint tasks removed.
SubgraphSet series_parallel_subgraphs(TaskGraph const &g, CutRule const &cut_rule, std::uint64_t seed);

/// Same as above for an already computed forest over `g` (or its normalized
/// form with `original_size` real tasks).
SubgraphSet subgraphs_from_forest(DecompForest const &forest, std::size_t original_size);

struct MapperConfig {
    double gamma = 1.0;
    std::optional<std::size_t> iteration_cap; ///< defaults to the task count
    std::uint64_t seed = 0;
    EvalConfig eval{};
};

struct MapResult {
    Mapping mapping;
    double makespan = 0.0; ///< internal cost of `mapping`
    double baseline = 0.0; ///< internal cost of the all-default mapping
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    std::vector<double> trajectory; ///< internal cost after each applied move
};

/// Greedy engine: from the all-default mapping, repeatedly evaluate every
/// (subgraph, unit) remapping and apply the best strictly improving one.
MapResult decomposition_map(TaskGraph const &g, Platform const &platform, SubgraphSet const &subgraphs,
                            MapperConfig const &cfg);

/// Gamma-threshold variant with a priority queue of stale expected
/// improvements. gamma = 1 is FirstFit.
MapResult threshold_map(TaskGraph const &g, Platform const &platform, SubgraphSet const &subgraphs,
                        MapperConfig const &cfg);

/// Mapping plus the list scheduler's own insertion-based timeline.
struct ListSchedule {
    Mapping mapping;
    std::vector<double> start;
    std::vector<double> finish;
    double makespan = 0.0;
};

/// Upward rank computed from unit-averaged compute and pair-averaged transfer
/// costs.
std::vector<double> upward_ranks(TaskGraph const &g, CostModel const &costs);

/// Optimistic cost table, row-major [task][unit].
std::vector<double> optimistic_cost_table(TaskGraph const &g, CostModel const &costs);

ListSchedule heft(TaskGraph const &g, Platform const &platform, EvalConfig const &eval = {});
ListSchedule peft(TaskGraph const &g, Platform const &platform, EvalConfig const &eval = {});

struct GAConfig {
    std::size_t population = 100;
    std::size_t generations = 500;
    double crossover_rate = 0.9;
    std::optional<double> mutation_rate; ///< per gene; defaults to 1/n
    std::uint64_t seed = 0;
};

struct GAResult {
    Mapping mapping;
    double makespan = 0.0;
    std::vector<double> best_per_generation; ///< index 0 is the initial population
    std::size_t evaluations = 0;
};

/// Single-objective elitist GA over a topologically ordered genome.
GAResult nsga2_map(TaskGraph const &g, Platform const &platform, GAConfig const &ga, EvalConfig const &eval = {});

/// Moves FPGA tasks back to the default unit, largest area first, until every
/// FPGA fits. Returns the number of reassigned tasks.
std::size_t repair_area(Mapping &m, TaskGraph const &g, Platform const &platform);

/// Algorithm names accepted by `run_algorithm` and the CLI.
std::vector<std::string> const &algorithm_names();

struct AlgorithmRun {
    Mapping mapping;
    std::size_t evaluations = 0;
    std::size_t iterations = 0;
    double internal_makespan = 0.0;
    double internal_baseline = 0.0;
};

struct AlgorithmOptions {
    MapperConfig mapper{};
    GAConfig ga{};
    std::string cut_rule = "random";
};

/// Dispatches one of `algorithm_names()`; throws Error for unknown names.
AlgorithmRun run_algorithm(std::string const &name, TaskGraph const &g, Platform const &platform,
                           AlgorithmOptions const &options);

} // namespace spmap
