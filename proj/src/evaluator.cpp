#include "spmap/evaluator.hpp"

#include <algorithm>
#include <sstream>

#include "spmap/error.hpp"

namespace spmap {

CostModel::CostModel(TaskGraph const &g, Platform const &platform, double source_input_bytes)
    : units_(platform.size()), compute_(g.size() * platform.size()), bytes_(g.edge_count()),
      inv_bandwidth_(platform.size() * platform.size(), 0.0) {
    for (NodeId v = 0; v < g.size(); ++v) {
        double const input = g.in_degree(v) == 0 ? source_input_bytes : g.input_bytes(v);
        for (UnitId u = 0; u < units_; ++u) compute_[v * units_ + u] = compute_time(g.attributes(v), input, platform.unit(u));
    }
    for (EdgeId e = 0; e < g.edge_count(); ++e) bytes_[e] = g.edge(e).bytes;
    for (UnitId a = 0; a < units_; ++a) {
        for (UnitId b = 0; b < units_; ++b) {
            if (a != b) inv_bandwidth_[a * units_ + b] = 1.0 / platform.bandwidth(a, b);
        }
    }
}

double CostModel::mean_compute(NodeId v) const {
    double sum = 0.0;
    for (UnitId u = 0; u < units_; ++u) sum += compute(v, u);
    return sum / static_cast<double>(units_);
}

double CostModel::mean_transfer(EdgeId e) const {
    if (units_ < 2) return 0.0;
    double sum = 0.0;
    for (UnitId a = 0; a < units_; ++a) {
        for (UnitId b = 0; b < units_; ++b) {
            if (a != b) sum += transfer(e, a, b);
        }
    }
    return sum / static_cast<double>(units_ * (units_ - 1));
}

bool is_streamed_edge(TaskGraph const &g, Platform const &platform, Mapping const &m, EdgeId e) {
    Edge const &edge = g.edge(e);
    UnitId const u = m[edge.src];
    return u == m[edge.dst] && platform.unit(u).kind == UnitKind::FPGA && g.out_degree(edge.src) == 1 &&
           g.in_degree(edge.dst) == 1;
}

ExecutionGraph coalesce_streams(TaskGraph const &g, Platform const &platform, Mapping const &m,
                                CostModel const &costs) {
    ExecutionGraph xg;
    xg.task_of.assign(g.size(), 0);
    // Streamed edges form vertex-disjoint paths, so every chain has a unique
    // head without a streamed in-edge.
    std::vector<bool> streamed_in(g.size(), false);
    std::vector<EdgeId> streamed_out(g.size(), kNoEdge);
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        if (is_streamed_edge(g, platform, m, e)) {
            streamed_in[g.edge(e).dst] = true;
            streamed_out[g.edge(e).src] = e;
        }
    }
    for (NodeId head = 0; head < g.size(); ++head) {
        if (streamed_in[head]) continue;
        ExecTask task{{}, m[head], 0.0};
        double slowest = 0.0;
        for (NodeId v = head;;) {
            task.members.push_back(v);
            xg.task_of[v] = xg.tasks.size();
            slowest = std::max(slowest, costs.compute(v, m[v]));
            if (streamed_out[v] == kNoEdge) break;
            v = g.edge(streamed_out[v]).dst;
        }
        task.duration = slowest + platform.unit(task.unit).stream_startup * static_cast<double>(task.members.size() - 1);
        xg.tasks.push_back(std::move(task));
    }
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        std::size_t const a = xg.task_of[g.edge(e).src];
        std::size_t const b = xg.task_of[g.edge(e).dst];
        if (a != b) xg.edges.push_back({a, b, e});
    }
    return xg;
}

std::uint64_t schedule_seed(std::uint64_t base, std::size_t index) {
    // splitmix64 finalizer over (base, index)
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Evaluator::Evaluator(TaskGraph const &g, Platform const &platform, EvalConfig cfg)
    : g_(g), platform_(platform), cfg_(cfg), costs_(g, platform, cfg.source_input_bytes) {
    if (cfg_.internal_schedules < 1) throw Error("internal_schedules must be >= 1");
    auto bfs = bfs_order(g);
    reporting_orders_.push_back(bfs);
    internal_orders_.push_back(std::move(bfs));
    std::size_t const randoms = std::max(cfg_.random_schedules, cfg_.internal_schedules - 1);
    for (std::size_t i = 0; i < randoms; ++i) {
        auto order = random_topological_order(g, schedule_seed(cfg_.seed, i));
        if (i < cfg_.random_schedules) reporting_orders_.push_back(order);
        if (i + 1 < cfg_.internal_schedules) internal_orders_.push_back(std::move(order));
    }
}

void Evaluator::require_feasible(Mapping const &m) const {
    require_total(m, g_, platform_);
    if (!area_feasible(m, g_, platform_)) throw InfeasibleMapping("mapping exceeds the FPGA area capacity");
}

double Evaluator::run(Mapping const &m, std::span<NodeId const> order, EvalResult *out) const {
    std::size_t const n = g_.size();
    // Chain heads: a node is its own head unless its single in-edge is streamed.
    std::vector<NodeId> head(n);
    std::vector<double> slowest(n, 0.0);
    std::vector<std::size_t> length(n, 0);
    for (NodeId v : order) {
        head[v] = v;
        if (g_.in_degree(v) == 1) {
            EdgeId const e = g_.in_edges(v)[0];
            if (is_streamed_edge(g_, platform_, m, e)) head[v] = head[g_.edge(e).src];
        }
        NodeId const h = head[v];
        slowest[h] = std::max(slowest[h], costs_.compute(v, m[v]));
        ++length[h];
    }

    std::vector<double> unit_free(platform_.size(), 0.0);
    std::vector<double> start(n, 0.0);
    std::vector<double> finish(n, 0.0);
    double makespan = 0.0;
    for (NodeId v : order) {
        if (head[v] != v) continue;
        UnitId const u = m[v];
        double ready = unit_free[u];
        for (EdgeId e : g_.in_edges(v)) {
            NodeId const q = g_.edge(e).src;
            ready = std::max(ready, finish[head[q]] + costs_.transfer(e, m[q], u));
        }
        double const duration =
            slowest[v] + platform_.unit(u).stream_startup * static_cast<double>(length[v] - 1);
        start[v] = ready;
        finish[v] = ready + duration;
        unit_free[u] = finish[v];
        makespan = std::max(makespan, finish[v]);
    }

    if (out) {
        out->makespan = makespan;
        out->start.resize(n);
        out->finish.resize(n);
        out->group = head;
        for (NodeId v = 0; v < n; ++v) {
            out->start[v] = start[head[v]];
            out->finish[v] = finish[head[v]];
        }
    }
    return makespan;
}

EvalResult Evaluator::simulate(Mapping const &m, std::span<NodeId const> order) const {
    require_feasible(m);
    if (!is_topological_order(g_, order)) throw GraphError("schedule order is not a topological order");
    EvalResult result;
    run(m, order, &result);
    result.schedule_used = "custom";
    return result;
}

double Evaluator::evaluate(Mapping const &m) const {
    require_feasible(m);
    double best = kInfeasible;
    for (auto const &order : reporting_orders_) best = std::min(best, run(m, order, nullptr));
    return best;
}

EvalResult Evaluator::best_result(Mapping const &m) const {
    require_feasible(m);
    std::size_t best_index = 0;
    double best = kInfeasible;
    for (std::size_t i = 0; i < reporting_orders_.size(); ++i) {
        double const ms = run(m, reporting_orders_[i], nullptr);
        if (ms < best) {
            best = ms;
            best_index = i;
        }
    }
    EvalResult result;
    run(m, reporting_orders_[best_index], &result);
    result.schedule_used = best_index == 0 ? "bfs" : "random:" + std::to_string(best_index - 1);
    return result;
}

double Evaluator::internal_cost(Mapping const &m) const {
    if (!area_feasible(m, g_, platform_)) return kInfeasible;
    double best = kInfeasible;
    for (auto const &order : internal_orders_) best = std::min(best, run(m, order, nullptr));
    return best;
}

double simulate_makespan(TaskGraph const &g, Platform const &platform, Mapping const &m,
                         std::span<NodeId const> order, EvalConfig const &cfg) {
    EvalConfig local = cfg;
    local.random_schedules = 0;
    local.internal_schedules = 1;
    return Evaluator(g, platform, local).simulate(m, order).makespan;
}

double evaluate(TaskGraph const &g, Platform const &platform, Mapping const &m, EvalConfig const &cfg) {
    return Evaluator(g, platform, cfg).evaluate(m);
}

double relative_improvement(double baseline, double candidate) {
    if (!(baseline > 0.0)) throw Error("relative improvement needs a positive baseline makespan");
    return std::max(0.0, (baseline - candidate) / baseline);
}

std::string check_timeline(TaskGraph const &g, Platform const &platform, Mapping const &m,
                           std::span<double const> start, std::span<double const> finish,
                           std::span<NodeId const> group, double tolerance) {
    std::ostringstream err;
    for (NodeId v = 0; v < g.size(); ++v) {
        if (finish[v] + tolerance < start[v]) {
            err << "task " << v << " finishes before it starts";
            return err.str();
        }
    }
    for (Edge const &e : g.edges()) {
        if (group[e.src] == group[e.dst]) continue;
        if (start[e.dst] + tolerance < finish[e.src]) {
            err << "edge " << e.src << "->" << e.dst << " violates precedence";
            return err.str();
        }
    }
    struct Interval {
        double start, finish;
        NodeId group;
    };
    std::vector<std::vector<Interval>> per_unit(platform.size());
    for (NodeId v = 0; v < g.size(); ++v) {
        if (group[v] == v) per_unit[m[v]].push_back({start[v], finish[v], v});
    }
    for (UnitId u = 0; u < per_unit.size(); ++u) {
        auto &intervals = per_unit[u];
        std::ranges::sort(intervals, {}, [](Interval const &i) { return std::pair{i.start, i.finish}; });
        for (std::size_t i = 1; i < intervals.size(); ++i) {
            if (intervals[i].start + tolerance < intervals[i - 1].finish) {
                err << "unit " << u << " runs " << intervals[i - 1].group << " and " << intervals[i].group
                    << " concurrently";
                return err.str();
            }
        }
    }
    return {};
}

} // namespace spmap
