#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spmap/evaluator.hpp"
#include "spmap/generators.hpp"
#include "spmap/json.hpp"
#include "spmap/mappers.hpp"
#include "spmap/platform.hpp"

namespace spmap {

enum class SweepAxis { NTasks, ExtraEdges, Workflow };

/// One sweep: every axis value times `repetitions` instances, each mapped by
/// every algorithm.
struct ExperimentSpec {
    std::vector<std::string> algorithms;
    SweepAxis axis = SweepAxis::NTasks;
    std::vector<std::size_t> values;          ///< n_tasks or extra_edges per point
    std::vector<std::filesystem::path> workflows; ///< Workflow axis only
    GenConfig generator{};                    ///< fixed fields of generated graphs
    AttributeDistribution attributes{};
    WorkflowOptions workflow_options{};
    std::size_t repetitions = 30;
    std::uint64_t seed = 0;
    std::optional<std::filesystem::path> platform; ///< default platform if unset
    EvalConfig eval{};
    double gamma = 1.0;
    GAConfig ga{};
    std::string cut_rule = "random";
    std::size_t timing_runs = 3; ///< mapper timing is the median over this many runs

    /// Throws Error on an empty algorithm list, unknown names, zero
    /// repetitions or an empty sweep.
    void validate() const;
    std::size_t point_count() const;
    std::string axis_label(std::size_t point) const;
};

/// Parses a spec document. Relative file paths resolve against `base_dir`.
ExperimentSpec experiment_from_json(json const &doc, std::filesystem::path const &base_dir = {});

/// Result of one algorithm on one instance.
struct InstanceResult {
    std::size_t point = 0;
    std::size_t repetition = 0;
    std::string algorithm;
    std::uint64_t instance_seed = 0;
    double makespan_baseline = 0.0;
    double makespan_mapped = 0.0;
    double rel_improvement = 0.0;
    double mapper_ms = 0.0;
    std::size_t eval_calls = 0;
};

/// Mean over the repetitions of one (axis point, algorithm) cell.
struct ResultRow {
    std::string axis;
    std::string algorithm;
    std::uint64_t seed = 0;
    double makespan_baseline = 0.0;
    double makespan_mapped = 0.0;
    double rel_improvement = 0.0;
    double mapper_ms = 0.0;
    double eval_calls = 0.0;
};

struct ExperimentResult {
    std::vector<ResultRow> rows; ///< sorted by axis point, then algorithm name
    std::vector<InstanceResult> instances;
};

/// Seed of instance `repetition` at sweep point `point`.
std::uint64_t instance_seed(std::uint64_t base, std::size_t point, std::size_t repetition);

/// Builds the attributed task graph of one instance.
TaskGraph build_instance(ExperimentSpec const &spec, std::size_t point, std::uint64_t seed);

ExperimentResult run_experiment(ExperimentSpec const &spec);

inline constexpr char const *kResultColumns =
    "axis,algorithm,seed,makespan_baseline,makespan_mapped,rel_improvement,mapper_ms,eval_calls";

std::string rows_to_csv(std::vector<ResultRow> const &rows);
json rows_to_json(std::vector<ResultRow> const &rows);

} // namespace spmap
