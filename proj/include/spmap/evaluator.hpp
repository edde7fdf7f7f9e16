#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "spmap/platform.hpp"
#include "spmap/taskgraph.hpp"

namespace spmap {

inline constexpr double kInfeasible = std::numeric_limits<double>::infinity();

struct EvalConfig {
    std::size_t random_schedules = 100;  ///< random orders added to the BFS order when reporting
    std::uint64_t seed = 0;
    std::size_t internal_schedules = 1;  ///< orders used inside mappers; 1 = BFS only
    double source_input_bytes = 1.0e8;   ///< virtual input of tasks without predecessors
};

/// Per (task, unit) compute times and per (edge, unit pair) transfer times.
class CostModel {
  public:
    CostModel(TaskGraph const &g, Platform const &platform, double source_input_bytes);

    double compute(NodeId v, UnitId u) const { return compute_[v * units_ + u]; }
    double transfer(EdgeId e, UnitId from, UnitId to) const {
        return from == to ? 0.0 : bytes_[e] * inv_bandwidth_[from * units_ + to];
    }
    /// Mean compute time over all units.
    double mean_compute(NodeId v) const;
    /// Mean transfer time over all ordered pairs of distinct units.
    double mean_transfer(EdgeId e) const;
    std::size_t unit_count() const { return units_; }

  private:
    std::size_t units_;
    std::vector<double> compute_;
    std::vector<double> bytes_;
    std::vector<double> inv_bandwidth_;
};

/// A task of the execution graph: one graph task or a streamed FPGA chain.
struct ExecTask {
    std::vector<NodeId> members; ///< chain order
    UnitId unit;
    double duration;
};

struct ExecEdge {
    std::size_t src;
    std::size_t dst;
    EdgeId edge;
};

struct ExecutionGraph {
    std::vector<ExecTask> tasks;
    std::vector<std::size_t> task_of; ///< graph node -> execution task
    std::vector<ExecEdge> edges;      ///< edges that were not streamed away
};

/// True if the edge is streamed when both ends sit on the same FPGA, the
/// producer has no other consumer and the consumer no other producer.
bool is_streamed_edge(TaskGraph const &g, Platform const &platform, Mapping const &m, EdgeId e);

/// Collapses maximal streamed FPGA chains into composite tasks whose duration
/// is the slowest stage plus one pipeline startup per additional stage.
ExecutionGraph coalesce_streams(TaskGraph const &g, Platform const &platform, Mapping const &m,
                                CostModel const &costs);

struct EvalResult {
    double makespan = 0.0;
    std::vector<double> start;
    std::vector<double> finish;
    std::vector<NodeId> group; ///< first chain member of the execution task each node ran in
    std::string schedule_used;
};

/// Model-based list simulation of a (graph, platform, mapping) triple.
///
/// Every unit runs one execution task at a time in the order induced by the
/// schedule; composites take the position of their first member. The graph
/// and platform must outlive the evaluator.
class Evaluator {
  public:
    Evaluator(TaskGraph const &g, Platform const &platform, EvalConfig cfg = {});

    TaskGraph const &graph() const { return g_; }
    Platform const &platform() const { return platform_; }
    CostModel const &costs() const { return costs_; }
    EvalConfig const &config() const { return cfg_; }

    /// Throws InfeasibleMapping on FPGA area overflow and GraphError if
    /// `order` is not a topological order.
    EvalResult simulate(Mapping const &m, std::span<NodeId const> order) const;

    /// Minimum makespan over the BFS order and the configured random orders.
    double evaluate(Mapping const &m) const;
    /// The simulation achieving `evaluate`.
    EvalResult best_result(Mapping const &m) const;

    /// Deterministic cost used inside mappers: minimum over the internal
    /// orders, +inf for area-infeasible mappings.
    double internal_cost(Mapping const &m) const;

    std::span<std::vector<NodeId> const> reporting_orders() const { return reporting_orders_; }
    std::span<std::vector<NodeId> const> internal_orders() const { return internal_orders_; }

  private:
    double run(Mapping const &m, std::span<NodeId const> order, EvalResult *out) const;
    void require_feasible(Mapping const &m) const;

    TaskGraph const &g_;
    Platform const &platform_;
    EvalConfig cfg_;
    CostModel costs_;
    std::vector<std::vector<NodeId>> reporting_orders_;
    std::vector<std::vector<NodeId>> internal_orders_;
};

/// Seed of the i-th random schedule derived from the configured seed.
std::uint64_t schedule_seed(std::uint64_t base, std::size_t index);

double simulate_makespan(TaskGraph const &g, Platform const &platform, Mapping const &m,
                         std::span<NodeId const> order, EvalConfig const &cfg = {});

/// Reporting metric: min over the BFS order and `cfg.random_schedules` orders.
double evaluate(TaskGraph const &g, Platform const &platform, Mapping const &m, EvalConfig const &cfg = {});

/// max(0, (baseline - candidate) / baseline). Throws Error if baseline <= 0.
double relative_improvement(double baseline, double candidate);

/// Checks precedence on non-streamed edges and per-unit exclusivity of
/// execution tasks. Returns an error description or an empty string.
std::string check_timeline(TaskGraph const &g, Platform const &platform, Mapping const &m,
                           std::span<double const> start, std::span<double const> finish,
                           std::span<NodeId const> group, double tolerance = 1e-9);

} // namespace spmap
