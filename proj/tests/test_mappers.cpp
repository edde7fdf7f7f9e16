#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <functional>
#include <numeric>

#include "corpus.hpp"
#include "spmap/error.hpp"
#include "spmap/mappers.hpp"

using namespace spmap;
using test::graph_from_edges;

namespace {

Platform two_units(UnitKind second, double rate, double bandwidth, double capacity = 0.0) {
    Platform p({{0, UnitKind::CPU, 1, 1e9, 0.0, 0.0}, {1, second, 1, rate, capacity, 1e-3}}, 0);
    p.set_bandwidth(0, 1, bandwidth);
    p.set_bandwidth(1, 0, bandwidth);
    return p;
}

Platform small_fpga_platform() {
    Platform p({{0, UnitKind::CPU, 4, 1e9, 0.0, 0.0},
                {1, UnitKind::GPU, 64, 1e8, 0.0, 0.0},
                {2, UnitKind::FPGA, 1, 1e9, 15.0, 1e-3}},
               0);
    double const bw[3][3] = {{0, 5e9, 2e9}, {5e9, 0, 1e9}, {2e9, 1e9, 0}};
    for (UnitId a = 0; a < 3; ++a) {
        for (UnitId b = 0; b < 3; ++b) {
            if (a != b) p.set_bandwidth(a, b, bw[a][b]);
        }
    }
    return p;
}

std::set<std::vector<NodeId>> as_set(SubgraphSet const &s) { return {s.subgraphs().begin(), s.subgraphs().end()}; }

// x -> a -> b -> c -> y with a 1-byte shortcut x -> y. x and y are hopeless
// on the FPGA; a, b, c each gain 0.05 s there but sit between two 0.1 s
// transfers, so only the whole chain a..c pays off.
TaskGraph fpga_chain() {
    TaskGraph g(5);
    g.add_edge(0, 1, 1e8);
    g.add_edge(1, 2, 1e8);
    g.add_edge(2, 3, 1e8);
    g.add_edge(3, 4, 1e8);
    g.add_edge(0, 4, 1.0);
    for (NodeId v : {0, 4}) g.set_attributes(v, {1.0, 0.0, 1e-3, 1.0});
    for (NodeId v : {1, 2, 3}) g.set_attributes(v, {1.0, 0.0, 2.0, 1.0});
    return g;
}

// Independent HEFT: global rank order, explicit gap search over all idle
// intervals, lowest unit on EFT ties.
struct HeftOracle {
    Mapping mapping;
    std::vector<double> finish;
};

HeftOracle heft_oracle(TaskGraph const &g, Platform const &p) {
    std::size_t const n = g.size();
    std::size_t const m = p.size();
    CostModel const c(g, p, 1e8);
    auto mean_compute = [&](NodeId v) {
        double s = 0.0;
        for (UnitId u = 0; u < m; ++u) s += c.compute(v, u);
        return s / static_cast<double>(m);
    };
    auto mean_transfer = [&](EdgeId e) {
        double s = 0.0;
        for (UnitId a = 0; a < m; ++a) {
            for (UnitId b = 0; b < m; ++b) {
                if (a != b) s += c.transfer(e, a, b);
            }
        }
        return s / static_cast<double>(m * (m - 1));
    };
    std::function<double(NodeId)> rank = [&](NodeId v) {
        double tail = 0.0;
        for (EdgeId e : g.out_edges(v)) tail = std::max(tail, mean_transfer(e) + rank(g.edge(e).dst));
        return mean_compute(v) + tail;
    };
    std::vector<double> r(n);
    for (NodeId v = 0; v < n; ++v) r[v] = rank(v);
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::ranges::stable_sort(order, [&](NodeId a, NodeId b) { return r[a] > r[b]; });

    HeftOracle out{Mapping::uniform(n, 0), std::vector<double>(n, 0.0)};
    std::vector<std::vector<std::pair<double, double>>> busy(m);
    std::vector<double> area(m, 0.0);
    for (NodeId v : order) {
        double best = std::numeric_limits<double>::infinity();
        UnitId best_u = 0;
        for (UnitId u = 0; u < m; ++u) {
            if (p.unit(u).kind == UnitKind::FPGA && area[u] + g.attributes(v).area > p.unit(u).area_capacity) continue;
            double ready = 0.0;
            for (EdgeId e : g.in_edges(v)) {
                NodeId const q = g.edge(e).src;
                ready = std::max(ready, out.finish[q] + c.transfer(e, out.mapping[q], u));
            }
            double const d = c.compute(v, u);
            std::vector<double> starts{ready};
            for (auto const &[s, f] : busy[u]) {
                if (f >= ready) starts.push_back(f);
            }
            std::ranges::sort(starts);
            for (double s : starts) {
                bool const free = std::ranges::none_of(
                    busy[u], [&](auto const &iv) { return s < iv.second && iv.first < s + d; });
                if (free) {
                    if (s + d < best) {
                        best = s + d;
                        best_u = u;
                    }
                    break;
                }
            }
        }
        out.mapping[v] = best_u;
        out.finish[v] = best;
        busy[best_u].emplace_back(best - c.compute(v, best_u), best);
        area[best_u] += g.attributes(v).area;
    }
    return out;
}

// OCT by plain recursion over every successor and unit choice.
double oct_oracle(TaskGraph const &g, CostModel const &c, NodeId v, UnitId u) {
    std::size_t const m = c.unit_count();
    double worst = 0.0;
    for (EdgeId e : g.out_edges(v)) {
        NodeId const s = g.edge(e).dst;
        double best = std::numeric_limits<double>::infinity();
        for (UnitId w = 0; w < m; ++w) {
            double comm = 0.0;
            if (w != u) {
                for (UnitId a = 0; a < m; ++a) {
                    for (UnitId b = 0; b < m; ++b) {
                        if (a != b) comm += c.transfer(e, a, b);
                    }
                }
                comm /= static_cast<double>(m * (m - 1));
            }
            best = std::min(best, oct_oracle(g, c, s, w) + c.compute(s, w) + comm);
        }
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace

TEST_CASE("single-node subgraphs") {
    CHECK(as_set(single_node_subgraphs(TaskGraph(3))) == std::set<std::vector<NodeId>>{{0}, {1}, {2}});
    CHECK(single_node_subgraphs(test::sp_example()).size() == 6);
    CHECK(as_set(single_node_subgraphs(TaskGraph(1))) == std::set<std::vector<NodeId>>{{0}});
}

TEST_CASE("series-parallel subgraphs") {
    std::set<std::vector<NodeId>> const expected{{0}, {1}, {2}, {3}, {4}, {5}, {1, 2, 3}, {0, 1, 2, 3, 4, 5}};
    CHECK(as_set(series_parallel_subgraphs(test::sp_example(), CutRule::random(), 0)) == expected);
    CHECK(as_set(series_parallel_subgraphs(graph_from_edges(2, {{0, 1}}), CutRule::random(), 0)) ==
          std::set<std::vector<NodeId>>{{0}, {1}});

    auto const cut_14 = CutRule("cut-14", [](std::span<CutCandidate const> cs, std::mt19937_64 &) {
        for (std::size_t i = 0; i < cs.size(); ++i) {
            if (cs[i].end == 4) return i;
        }
        return std::size_t{0};
    });
    auto const g = test::cut_example();
    CHECK(as_set(subgraphs_from_forest(decompose(g, 0, cut_14, 0), g.size())) == expected);
}

TEST_CASE("SubgraphSet normalises its input") {
    SubgraphSet const s({{2, 1}, {1, 2}, {}, {0}});
    CHECK(s.size() == 2);
    CHECK(s.contains({2, 1}));
    CHECK_FALSE(s.contains({2}));
}

TEST_CASE("greedy moves a lone task to the faster unit") {
    TaskGraph g(1);
    g.set_attributes(0, {10.0, 0.0, 1.0, 0.0});
    auto const p = two_units(UnitKind::GPU, 2e9, 1e10);
    auto const r = decomposition_map(g, p, single_node_subgraphs(g), {});
    CHECK(r.mapping == Mapping{{1}});
    CHECK(relative_improvement(r.baseline, r.makespan) == doctest::Approx(0.5));
    CHECK(r.iterations == 1);

    auto const ff = threshold_map(g, p, single_node_subgraphs(g), {});
    CHECK(ff.mapping == r.mapping);
    CHECK(ff.makespan == r.makespan);
}

TEST_CASE("greedy keeps cheap tasks next to expensive transfers") {
    auto g = graph_from_edges(3, {{0, 1}, {1, 2}});
    for (NodeId v = 0; v < 3; ++v) g.set_attributes(v, {1e-3, 0.0, 1.0, 0.0});
    auto const p = two_units(UnitKind::GPU, 2e9, 1e9);
    auto const r = decomposition_map(g, p, single_node_subgraphs(g), {});
    CHECK(r.mapping == Mapping::uniform(3, 0));
    CHECK(r.iterations == 0);
    CHECK(r.makespan == r.baseline);
}

TEST_CASE("only the series-parallel set moves the FPGA chain") {
    auto const g = fpga_chain();
    auto const p = two_units(UnitKind::FPGA, 1e9, 1e9, 100.0);
    Evaluator const e(g, p);
    double const base = e.internal_cost(Mapping::uniform(5, 0));

    // No single-task move improves on the all-CPU mapping.
    for (NodeId v = 0; v < 5; ++v) {
        Mapping m = Mapping::uniform(5, 0);
        m[v] = 1;
        CHECK(e.internal_cost(m) > base);
    }
    Mapping optimum;
    double const best = test::brute_force_optimum(e, &optimum);
    CHECK(optimum == Mapping{{0, 1, 1, 1, 0}});
    CHECK(best < base);

    auto const sets = series_parallel_subgraphs(g, CutRule::random(), 0);
    REQUIRE(sets.contains({1, 2, 3}));
    auto const sn = decomposition_map(g, p, single_node_subgraphs(g), {});
    auto const sp = decomposition_map(g, p, sets, {});
    CHECK(sn.mapping == Mapping::uniform(5, 0));
    CHECK(sp.mapping == optimum);
    CHECK(sp.makespan == best);
}

TEST_CASE("greedy trajectories are strictly decreasing and bounded") {
    auto const p = default_platform();
    for (std::uint64_t s = 0; s < 15; ++s) {
        auto const g = test::instance(30, 300 + s, s % 4);
        for (auto const *name : {"single_node", "series_parallel", "sn_firstfit", "sp_firstfit", "nsga2"}) {
            AlgorithmOptions opt;
            opt.mapper.seed = s;
            opt.ga.population = 20;
            opt.ga.generations = 20;
            opt.ga.seed = s;
            auto const run = run_algorithm(name, g, p, opt);
            CHECK(run.internal_makespan <= run.internal_baseline);
            if (std::string(name) != "nsga2") CHECK(run.iterations <= g.size());
        }
        auto const r = decomposition_map(g, p, single_node_subgraphs(g), {});
        double prev = r.baseline;
        for (double c : r.trajectory) {
            CHECK(c < prev);
            prev = c;
        }
        CHECK(r.trajectory.size() == r.iterations);
    }
}

TEST_CASE("iteration cap") {
    auto const g = test::instance(30, 5, 0);
    MapperConfig cfg;
    cfg.iteration_cap = 2;
    auto const r = decomposition_map(g, default_platform(), single_node_subgraphs(g), cfg);
    CHECK(r.iterations <= 2);
}

TEST_CASE("FirstFit needs fewer evaluations for similar quality") {
    auto const p = default_platform();
    double ratio = 0.0;
    std::size_t evals_basic = 0;
    std::size_t evals_ff = 0;
    int const count = 10;
    for (int s = 0; s < count; ++s) {
        auto const g = test::instance(50, 500 + s, 0);
        auto const sets = single_node_subgraphs(g);
        auto const basic = decomposition_map(g, p, sets, {});
        auto const ff = threshold_map(g, p, sets, {});
        CHECK(ff.evaluations <= basic.evaluations);
        CHECK(ff.makespan <= ff.baseline);
        ratio += ff.makespan / basic.makespan;
        evals_basic += basic.evaluations;
        evals_ff += ff.evaluations;
    }
    CHECK(ratio / count <= 1.05);
    CHECK(2 * evals_ff <= evals_basic);
}

TEST_CASE("gamma above one stays no worse and bounded") {
    auto const g = test::instance(40, 77, 0);
    auto const sets = single_node_subgraphs(g);
    MapperConfig cfg;
    cfg.gamma = 4.0;
    auto const r = threshold_map(g, default_platform(), sets, cfg);
    CHECK(r.makespan <= r.baseline);
    CHECK(r.iterations <= g.size());
}

TEST_CASE("HEFT on a single task picks the fastest unit") {
    TaskGraph g(1);
    g.set_attributes(0, {10.0, 0.0, 1.0, 0.0});
    Platform p({{0, UnitKind::CPU, 1, 1e9, 0.0, 0.0},
                {1, UnitKind::CPU, 1, 2e9, 0.0, 0.0},
                {2, UnitKind::CPU, 1, 0.5e9, 0.0, 0.0}},
               0);
    for (UnitId a = 0; a < 3; ++a) {
        for (UnitId b = 0; b < 3; ++b) {
            if (a != b) p.set_bandwidth(a, b, 1e9);
        }
    }
    auto const h = heft(g, p);
    CHECK(h.mapping == Mapping{{1}});
    CHECK(h.makespan == doctest::Approx(0.5));
    CHECK(peft(g, p).mapping == h.mapping);
}

TEST_CASE("HEFT spreads equal independent tasks") {
    TaskGraph g(2);
    for (NodeId v = 0; v < 2; ++v) g.set_attributes(v, {10.0, 0.0, 1.0, 0.0});
    auto const h = heft(g, two_units(UnitKind::CPU, 1e9, 1e9));
    CHECK(h.mapping[0] != h.mapping[1]);
    CHECK(h.makespan == doctest::Approx(1.0));
}

TEST_CASE("HEFT matches the insertion-EFT oracle") {
    for (auto const &p : {default_platform(), small_fpga_platform()}) {
        for (std::uint64_t s = 0; s < 20; ++s) {
            auto const g = test::instance(6, 40 + s, s % 3);
            auto const h = heft(g, p);
            auto const o = heft_oracle(g, p);
            CHECK(h.mapping == o.mapping);
            for (NodeId v = 0; v < g.size(); ++v) CHECK(h.finish[v] == doctest::Approx(o.finish[v]));
            CHECK(area_feasible(h.mapping, g, p));
        }
    }
}

TEST_CASE("PEFT optimistic cost table matches the recursive oracle") {
    for (auto const &p : {default_platform(), small_fpga_platform()}) {
        for (std::uint64_t s = 0; s < 20; ++s) {
            auto const g = test::instance(6, 60 + s, s % 3);
            CostModel const c(g, p, 1e8);
            auto const oct = optimistic_cost_table(g, c);
            for (NodeId v = 0; v < g.size(); ++v) {
                for (UnitId u = 0; u < p.size(); ++u) {
                    CHECK(oct[v * p.size() + u] == doctest::Approx(oct_oracle(g, c, v, u)));
                }
                if (g.out_degree(v) == 0) {
                    for (UnitId u = 0; u < p.size(); ++u) CHECK(oct[v * p.size() + u] == 0.0);
                }
            }
            CHECK(area_feasible(peft(g, p).mapping, g, p));
        }
    }
}

TEST_CASE("GA finds the optimum of a one-task graph in one generation") {
    TaskGraph g(1);
    g.set_attributes(0, {10.0, 1.0, 1.0, 1.0});
    auto const p = default_platform();
    Evaluator const e(g, p);
    double const opt = test::brute_force_optimum(e);
    for (std::uint64_t s = 0; s < 5; ++s) {
        auto const r = nsga2_map(g, p, {10, 1, 0.9, std::nullopt, s});
        REQUIRE(r.best_per_generation.size() == 2);
        CHECK(r.best_per_generation[1] == opt);
    }
}

TEST_CASE("GA reaches the exhaustive optimum and is elitist") {
    auto const p = default_platform();
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto const g = test::instance(6, 700 + s, 0);
        Evaluator const e(g, p);
        double const opt = test::brute_force_optimum(e);
        auto const r = nsga2_map(g, p, {100, 200, 0.9, std::nullopt, s});
        CHECK(r.makespan == doctest::Approx(opt));
        CHECK(r.best_per_generation.size() == 201);
        CHECK(std::ranges::is_sorted(r.best_per_generation, std::greater<>{}));
        CHECK(r.makespan == e.internal_cost(r.mapping));
    }
}

TEST_CASE("GA rejects bad settings") {
    auto const g = test::instance(6, 1, 0);
    CHECK_THROWS_AS(nsga2_map(g, default_platform(), {1, 10, 0.9, std::nullopt, 0}), Error);
    CHECK_THROWS_AS(nsga2_map(g, default_platform(), {10, 10, 1.5, std::nullopt, 0}), Error);
}

TEST_CASE("repair_area evicts the largest FPGA tasks first") {
    TaskGraph g(3);
    g.set_attributes(0, {1.0, 1.0, 1.0, 10.0});
    g.set_attributes(1, {1.0, 1.0, 1.0, 8.0});
    g.set_attributes(2, {1.0, 1.0, 1.0, 5.0});
    auto const p = small_fpga_platform();
    Mapping m{{2, 2, 2}};
    CHECK(repair_area(m, g, p) == 1);
    CHECK(m == Mapping{{0, 2, 2}});
    CHECK(repair_area(m, g, p) == 0);
}

TEST_CASE("run_algorithm") {
    auto const g = test::instance(12, 3, 1);
    auto const p = default_platform();
    AlgorithmOptions opt;
    opt.ga.generations = 5;
    opt.ga.population = 10;
    for (auto const &name : algorithm_names()) {
        auto const a = run_algorithm(name, g, p, opt);
        auto const b = run_algorithm(name, g, p, opt);
        CHECK(a.mapping == b.mapping);
        CHECK(area_feasible(a.mapping, g, p));
    }
    CHECK(run_algorithm("heft", g, p, opt).evaluations == 0);
    CHECK_THROWS_AS(run_algorithm("tabu", g, p, opt), Error);
}
