#include "spmap/mappers.hpp"

#include <algorithm>
#include <limits>

namespace spmap {

std::vector<double> upward_ranks(TaskGraph const &g, CostModel const &costs) {
    auto const order = bfs_order(g);
    std::vector<double> rank(g.size(), 0.0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        NodeId const v = *it;
        double tail = 0.0;
        for (EdgeId e : g.out_edges(v)) tail = std::max(tail, costs.mean_transfer(e) + rank[g.edge(e).dst]);
        rank[v] = costs.mean_compute(v) + tail;
    }
    return rank;
}

std::vector<double> optimistic_cost_table(TaskGraph const &g, CostModel const &costs) {
    std::size_t const m = costs.unit_count();
    auto const order = bfs_order(g);
    std::vector<double> oct(g.size() * m, 0.0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        NodeId const v = *it;
        for (UnitId u = 0; u < m; ++u) {
            double worst = 0.0;
            for (EdgeId e : g.out_edges(v)) {
                NodeId const s = g.edge(e).dst;
                double best = std::numeric_limits<double>::infinity();
                for (UnitId w = 0; w < m; ++w) {
                    double const comm = w == u ? 0.0 : costs.mean_transfer(e);
                    best = std::min(best, oct[s * m + w] + costs.compute(s, w) + comm);
                }
                worst = std::max(worst, best);
            }
            oct[v * m + u] = worst;
        }
    }
    return oct;
}

namespace {

struct Slot {
    double start;
    double finish;
};

// Insertion-based list scheduling shared by HEFT and PEFT. Tasks are taken
// from the ready set by descending priority (ties to the lower id); each goes
// to the unit minimising EFT + bias(task, unit).
template <typename Bias>
ListSchedule list_schedule(TaskGraph const &g, Platform const &platform, CostModel const &costs,
                           std::vector<double> const &priority, Bias bias) {
    std::size_t const n = g.size();
    std::size_t const m = platform.size();
    ListSchedule out{Mapping::uniform(n, platform.default_unit()), std::vector<double>(n, 0.0),
                     std::vector<double>(n, 0.0), 0.0};
    std::vector<std::vector<Slot>> busy(m);
    std::vector<double> area_used(m, 0.0);

    std::vector<std::size_t> pending(n);
    std::vector<NodeId> ready;
    for (NodeId v = 0; v < n; ++v) {
        pending[v] = g.in_degree(v);
        if (pending[v] == 0) ready.push_back(v);
    }
    auto const higher = [&priority](NodeId a, NodeId b) {
        return priority[a] < priority[b] || (priority[a] == priority[b] && a > b);
    };

    while (!ready.empty()) {
        auto const pick = std::ranges::max_element(ready, higher);
        NodeId const v = *pick;
        ready.erase(pick);

        double const area = g.attributes(v).area;
        UnitId best_unit = platform.default_unit();
        double best_score = std::numeric_limits<double>::infinity();
        double best_start = 0.0;
        double best_finish = 0.0;
        for (UnitId u = 0; u < m; ++u) {
            auto const &unit = platform.unit(u);
            if (unit.kind == UnitKind::FPGA && area_used[u] + area > unit.area_capacity) continue;
            double ready_time = 0.0;
            for (EdgeId e : g.in_edges(v)) {
                NodeId const q = g.edge(e).src;
                ready_time = std::max(ready_time, out.finish[q] + costs.transfer(e, out.mapping[q], u));
            }
            double const duration = costs.compute(v, u);
            double start = ready_time;
            for (Slot const &s : busy[u]) {
                if (start + duration <= s.start) break;
                start = std::max(start, s.finish);
            }
            double const score = start + duration + bias(v, u);
            if (score < best_score) {
                best_score = score;
                best_unit = u;
                best_start = start;
                best_finish = start + duration;
            }
        }

        out.mapping[v] = best_unit;
        out.start[v] = best_start;
        out.finish[v] = best_finish;
        area_used[best_unit] += area;
        auto &slots = busy[best_unit];
        auto const pos = std::ranges::upper_bound(slots, best_start, {}, &Slot::start);
        slots.insert(pos, {best_start, best_finish});
        out.makespan = std::max(out.makespan, best_finish);

        for (EdgeId e : g.out_edges(v)) {
            NodeId const w = g.edge(e).dst;
            if (--pending[w] == 0) ready.push_back(w);
        }
    }
    return out;
}

} // namespace

ListSchedule heft(TaskGraph const &g, Platform const &platform, EvalConfig const &eval) {
    CostModel const costs(g, platform, eval.source_input_bytes);
    auto const rank = upward_ranks(g, costs);
    return list_schedule(g, platform, costs, rank, [](NodeId, UnitId) { return 0.0; });
}

ListSchedule peft(TaskGraph const &g, Platform const &platform, EvalConfig const &eval) {
    CostModel const costs(g, platform, eval.source_input_bytes);
    std::size_t const m = platform.size();
    auto const oct = optimistic_cost_table(g, costs);
    std::vector<double> rank(g.size(), 0.0);
    for (NodeId v = 0; v < g.size(); ++v) {
        for (UnitId u = 0; u < m; ++u) rank[v] += oct[v * m + u];
        rank[v] /= static_cast<double>(m);
    }
    return list_schedule(g, platform, costs, rank, [&](NodeId v, UnitId u) { return oct[v * m + u]; });
}

} // namespace spmap
