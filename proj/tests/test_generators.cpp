#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "corpus.hpp"
#include "spmap/error.hpp"
#include "spmap/generators.hpp"
#include "spmap/spdag.hpp"

using namespace spmap;

namespace {

GenConfig config(std::size_t n, std::uint64_t seed, std::size_t extra = 0) {
    GenConfig cfg;
    cfg.n_tasks = n;
    cfg.seed = seed;
    cfg.extra_edges = extra;
    return cfg;
}

std::vector<std::pair<NodeId, NodeId>> edge_pairs(TaskGraph const &g) {
    std::vector<std::pair<NodeId, NodeId>> out;
    for (auto const &e : g.edges()) out.emplace_back(e.src, e.dst);
    std::ranges::sort(out);
    return out;
}

json task(std::string name, double runtime, json files) {
    return {{"name", std::move(name)}, {"runtime", runtime}, {"files", std::move(files)}};
}

json file(char const *link, char const *name, double size) { return {{"link", link}, {"name", name}, {"size", size}}; }

json workflow(json tasks) { return {{"workflow", {{"tasks", std::move(tasks)}}}}; }

} // namespace

TEST_CASE("random_sp_graph") {
    SUBCASE("n = 2 is a single edge") {
        auto const c = random_sp_graph(config(2, 1));
        CHECK(edge_pairs(c.graph) == std::vector<std::pair<NodeId, NodeId>>{{0, 1}});
        CHECK(c.trace.empty());
    }
    SUBCASE("n = 3 is a chain or a triangle") {
        for (std::uint64_t s = 0; s < 30; ++s) {
            auto const c = random_sp_graph(config(3, s));
            CHECK(c.graph.size() == 3);
            auto const pairs = edge_pairs(c.graph);
            bool const chain = pairs == std::vector<std::pair<NodeId, NodeId>>{{0, 2}, {2, 1}};
            bool const triangle = pairs == std::vector<std::pair<NodeId, NodeId>>{{0, 1}, {0, 2}, {2, 1}};
            CHECK((chain || triangle));
        }
    }
    SUBCASE("the trace replays to the raw edge list") {
        for (std::uint64_t s = 0; s < 20; ++s) {
            auto const c = random_sp_graph(config(25, s));
            std::vector<std::pair<NodeId, NodeId>> edges{{0, 1}};
            for (auto const &op : c.trace) {
                auto const [u, v] = edges.at(op.edge);
                if (op.kind == SpOperation::Kind::Series) {
                    edges[op.edge] = {u, op.new_node};
                    edges.emplace_back(op.new_node, v);
                } else {
                    edges.emplace_back(u, v);
                }
            }
            CHECK(edges == c.raw_edges);
            CHECK(c.graph.edge_count() == test::distinct_pairs(c.raw_edges));
            CHECK(c.graph.sources() == std::vector<NodeId>{0});
            CHECK(c.graph.sinks() == std::vector<NodeId>{1});
        }
    }
}

TEST_CASE("generated graphs are series-parallel and reproducible") {
    for (std::uint64_t s = 0; s < 40; ++s) {
        auto const g = generate_graph(config(30, s));
        CHECK(g.size() == 30);
        CHECK(validate(g).empty());
        CHECK(decompose(normalize_endpoints(g, 1.0), CutRule::random(), s).trees.size() == 1);
        CHECK(g == generate_graph(config(30, s)));
    }
    CHECK_FALSE(generate_graph(config(30, 1)) == generate_graph(config(30, 2)));
}

TEST_CASE("GenConfig validation") {
    CHECK_THROWS_AS(config(1, 0).validate(), Error);
    GenConfig zero = config(10, 0);
    zero.parallel_weight = 0;
    CHECK_THROWS_AS(zero.validate(), Error);
}

TEST_CASE("add_random_edges") {
    auto const base = test::sp_example();
    CHECK(add_random_edges(base, 0, 5) == base);

    bool saw_cut_example = false;
    for (std::uint64_t s = 0; s < 200; ++s) {
        auto const g = add_random_edges(base, 1, s);
        REQUIRE(g.edge_count() == base.edge_count() + 1);
        CHECK(validate(g).empty());
        for (EdgeId e = 0; e < base.edge_count(); ++e) CHECK(g.edge(e) == base.edge(e));
        if (g == test::cut_example()) saw_cut_example = true;
    }
    CHECK(saw_cut_example);

    for (std::uint64_t s = 0; s < 30; ++s) {
        auto const g = generate_graph(config(40, s, 60));
        CHECK(g.edge_count() == generate_graph(config(40, s)).edge_count() + 60);
        CHECK(validate(g).empty());
    }
    // A 3-node graph has room for 3 edges at most.
    CHECK_THROWS_AS(add_random_edges(test::graph_from_edges(3, {{0, 1}}), 3, 0), GraphError);
    CHECK(add_random_edges(test::graph_from_edges(3, {{0, 1}}), 2, 0).edge_count() == 3);
}

TEST_CASE("attribute distribution") {
    TaskGraph const g(100000);
    auto const a = augment_attributes(g, {}, 42);
    std::vector<double> cs;
    std::size_t perfect = 0;
    for (NodeId v = 0; v < g.size(); ++v) {
        auto const &t = a.attributes(v);
        cs.push_back(t.complexity);
        if (t.parallelizability == 1.0) ++perfect;
        CHECK(t.parallelizability >= 0.0);
        CHECK(t.parallelizability <= 1.0);
        CHECK(t.area == t.complexity);
    }
    std::ranges::sort(cs);
    double const median = cs[cs.size() / 2];
    CHECK(std::abs(median / std::exp(2.0) - 1.0) <= 0.02);
    auto const in_band = std::ranges::count_if(cs, [](double c) { return c >= 3.0 && c <= 17.0; });
    CHECK(static_cast<double>(in_band) / cs.size() == doctest::Approx(0.9).epsilon(0.04));
    CHECK(static_cast<double>(perfect) / cs.size() == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("augment_attributes is seeded and can keep complexities") {
    auto const g = generate_graph(config(20, 3));
    CHECK(augment_attributes(g, {}, 9) == augment_attributes(g, {}, 9));
    CHECK_FALSE(augment_attributes(g, {}, 9) == augment_attributes(g, {}, 10));

    TaskGraph h(2);
    h.set_attributes(0, {123.0, 1.0, 1.0, 0.0});
    AttributeDistribution keep;
    keep.preserve_complexity = true;
    keep.area_per_complexity = 2.0;
    auto const out = augment_attributes(h, keep, 1);
    CHECK(out.attributes(0).complexity == 123.0);
    CHECK(out.attributes(0).area == 246.0);

    AttributeDistribution bad;
    bad.perfect_parallel_prob = 1.5;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("workflow ingestion") {
    SUBCASE("a produced file becomes an edge") {
        auto const g = ingest_workflow(workflow({task("A", 1.0, {file("output", "f", 5e7)}),
                                                 task("B", 2.0, {file("input", "f", 5e7)})}));
        REQUIRE(g.edge_count() == 1);
        CHECK(g.edge(0) == Edge{0, 1, 5e7});
        CHECK(g.name(1) == "B");
        // runtime * reference rate / input bytes
        CHECK(g.attributes(0).complexity == doctest::Approx(1.0 * 1e9 / 1e8));
        CHECK(g.attributes(1).complexity == doctest::Approx(2.0 * 1e9 / 5e7));
    }
    SUBCASE("fork-join becomes a diamond") {
        auto const g = ingest_workflow(workflow({
            task("split", 1.0, {file("output", "a", 10), file("output", "b", 20)}),
            task("left", 1.0, {file("input", "a", 10), file("output", "c", 30)}),
            task("right", 1.0, {file("input", "b", 20), file("output", "d", 40)}),
            task("join", 1.0, {file("input", "c", 30), file("input", "d", 40)}),
        }));
        CHECK(edge_pairs(g) == std::vector<std::pair<NodeId, NodeId>>{{0, 1}, {0, 2}, {1, 3}, {2, 3}});
        CHECK(g.input_bytes(3) == 70.0);
    }
    SUBCASE("files between the same tasks add up and parent links cost one byte") {
        json tasks{task("A", 1.0, {file("output", "x", 5), file("output", "y", 7)}),
                   task("B", 1.0, {file("input", "x", 5), file("input", "y", 7)}),
                   {{"name", "C"}, {"runtime", 1.0}, {"parents", {"B"}}}};
        auto const g = ingest_workflow(workflow(tasks));
        CHECK(g.edge(0) == Edge{0, 1, 12.0});
        CHECK(g.edge(1) == Edge{1, 2, 1.0});
    }
    SUBCASE("a file nobody produces is an error naming the file") {
        auto const doc = workflow({task("A", 1.0, {file("input", "missing.dat", 5)})});
        try {
            ingest_workflow(doc);
            FAIL("expected an error");
        } catch (FormatError const &e) {
            CHECK(std::string(e.what()).find("missing.dat") != std::string::npos);
        }
        WorkflowOptions lenient;
        lenient.allow_external_inputs = true;
        CHECK(ingest_workflow(doc, lenient).size() == 1);
    }
    SUBCASE("malformed documents") {
        CHECK_THROWS_AS(ingest_workflow(json::object()), FormatError);
        CHECK_THROWS_AS(ingest_workflow(workflow({{{"name", "A"}}})), FormatError);
        CHECK_THROWS_AS(ingest_workflow(workflow({task("A", 1, {}), task("A", 1, {})})), FormatError);
        json cyclic{{{"name", "A"}, {"runtime", 1}, {"parents", {"B"}}},
                    {{"name", "B"}, {"runtime", 1}, {"parents", {"A"}}}};
        CHECK_THROWS_AS(ingest_workflow(workflow(cyclic)), GraphError);
    }
}
