// spmap command line: graph generation, decomposition, mapping, evaluation
// and benchmark sweeps.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "spmap/bench.hpp"
#include "spmap/error.hpp"
#include "spmap/evaluator.hpp"
#include "spmap/generators.hpp"
#include "spmap/json_io.hpp"
#include "spmap/mappers.hpp"
#include "spmap/spdag.hpp"

namespace {

using namespace spmap;

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::optional<std::uint64_t> seed;
    std::string platform;
    std::string out;
    std::string format;

    std::uint64_t seed_or(std::uint64_t fallback) const { return seed.value_or(fallback); }

    Platform load_platform() const {
        if (platform.empty()) return default_platform();
        return platform_from_json(read_json_file(platform));
    }

    std::string format_or(std::string const &fallback, std::initializer_list<char const *> allowed) const {
        std::string const f = format.empty() ? fallback : format;
        for (char const *a : allowed) {
            if (f == a) return f;
        }
        throw UsageError("--format " + f + " is not supported by this command");
    }

    void emit(std::string const &text) const {
        if (out.empty()) {
            std::cout << text;
            return;
        }
        std::ofstream file(out, std::ios::binary);
        if (!file) throw Error("cannot write " + out);
        file << text;
    }

    void emit(json const &doc) const { emit(doc.dump(2) + "\n"); }
};

TaskGraph load_graph(std::string const &path) {
    TaskGraph g = graph_from_json(read_json_file(path));
    require_valid(g);
    return g;
}

Mapping load_mapping(std::string const &path, TaskGraph const &g, Platform const &platform) {
    Mapping m = mapping_from_json(read_json_file(path)).mapping;
    require_total(m, g, platform);
    return m;
}

struct GenArgs {
    std::size_t n = 10;
    std::size_t extra_edges = 0;
    std::vector<std::size_t> ratio{1, 2};
    double edge_bytes = 1.0e8;
    double area_per_complexity = 1.0;
    bool bare = false;
    std::string workflow;
    bool allow_external = false;
    double reference_rate = 1.0e9;
};

void run_gen(Globals const &g, GenArgs const &a) {
    g.format_or("json", {"json"});
    std::uint64_t const seed = g.seed_or(0);
    AttributeDistribution dist;
    dist.area_per_complexity = a.area_per_complexity;
    TaskGraph graph;
    if (!a.workflow.empty()) {
        WorkflowOptions options;
        options.allow_external_inputs = a.allow_external;
        options.reference_rate = a.reference_rate;
        graph = ingest_workflow(read_json_file(a.workflow), options);
        dist.preserve_complexity = true;
    } else {
        if (a.ratio.size() != 2) throw UsageError("--ratio takes two values");
        GenConfig cfg{a.n, a.ratio[0], a.ratio[1], a.extra_edges, a.edge_bytes, seed};
        graph = generate_graph(cfg);
    }
    if (!a.bare) graph = augment_attributes(graph, dist, seed);
    g.emit(graph_to_json(graph));
}

struct DecomposeArgs {
    std::string graph;
    std::string cut_rule = "random";
};

void run_decompose(Globals const &g, DecomposeArgs const &a) {
    std::string const format = g.format_or("json", {"json", "dot"});
    TaskGraph const graph = load_graph(a.graph);
    auto const normalized = normalize_endpoints(graph, 1.0);
    auto const forest = decompose(normalized, CutRule::from_name(a.cut_rule), g.seed_or(0));
    if (format == "dot") {
        g.emit(to_dot(forest));
        return;
    }
    json doc = forest_to_json(forest);
    doc["original_size"] = graph.size();
    doc["start"] = normalized.start;
    doc["end"] = normalized.end;
    g.emit(doc);
}

struct MapArgs {
    std::string algo;
    std::string graph;
    double gamma = 1.0;
    std::string cut_rule = "random";
    std::size_t population = 100;
    std::size_t generations = 500;
    std::size_t schedules = 100;
};

void run_map(Globals const &g, MapArgs const &a) {
    g.format_or("json", {"json"});
    auto const &names = algorithm_names();
    if (std::ranges::find(names, a.algo) == names.end()) throw UsageError("unknown algorithm: " + a.algo);
    TaskGraph const graph = load_graph(a.graph);
    Platform const platform = g.load_platform();
    std::uint64_t const seed = g.seed_or(0);

    AlgorithmOptions options;
    options.mapper.gamma = a.gamma;
    options.mapper.seed = seed;
    options.mapper.eval.seed = seed;
    options.mapper.eval.random_schedules = a.schedules;
    options.ga.population = a.population;
    options.ga.generations = a.generations;
    options.ga.seed = seed;
    options.cut_rule = a.cut_rule;
    auto run = run_algorithm(a.algo, graph, platform, options);
    double const makespan = evaluate(graph, platform, run.mapping, options.mapper.eval);
    g.emit(mapping_to_json({std::move(run.mapping), a.algo, seed, makespan}));
}

struct EvalArgs {
    std::string graph;
    std::string mapping;
    std::size_t schedules = 100;
};

void run_eval(Globals const &g, EvalArgs const &a) {
    std::string const format = g.format_or("json", {"json", "csv"});
    TaskGraph const graph = load_graph(a.graph);
    Platform const platform = g.load_platform();
    Mapping const m = load_mapping(a.mapping, graph, platform);
    EvalConfig cfg;
    cfg.seed = g.seed_or(0);
    cfg.random_schedules = a.schedules;
    Evaluator const evaluator(graph, platform, cfg);
    auto const result = evaluator.best_result(m);
    if (format == "csv") {
        g.emit(eval_result_to_csv(result, m));
    } else {
        g.emit(eval_result_to_json(result, m));
    }
}

struct BenchArgs {
    std::string spec;
};

void run_bench(Globals const &g, BenchArgs const &a) {
    std::string const format = g.format_or("csv", {"csv", "json"});
    std::filesystem::path const path(a.spec);
    ExperimentSpec spec = experiment_from_json(read_json_file(path), path.parent_path());
    if (g.seed) spec.seed = *g.seed;
    if (!g.platform.empty()) spec.platform = g.platform;
    auto const result = run_experiment(spec);
    if (format == "csv") {
        g.emit(rows_to_csv(result.rows));
    } else {
        g.emit(rows_to_json(result.rows));
    }
}

struct CompareArgs {
    std::string graph;
    std::vector<std::string> mappings;
    std::size_t schedules = 100;
};

void run_compare(Globals const &g, CompareArgs const &a) {
    std::string const format = g.format_or("csv", {"csv", "json"});
    TaskGraph const graph = load_graph(a.graph);
    Platform const platform = g.load_platform();
    EvalConfig cfg;
    cfg.seed = g.seed_or(0);
    cfg.random_schedules = a.schedules;
    Evaluator const evaluator(graph, platform, cfg);
    double const baseline = evaluator.evaluate(Mapping::uniform(graph.size(), platform.default_unit()));

    json rows = json::array();
    std::ostringstream csv;
    csv << "mapping,algorithm,makespan_baseline,makespan,rel_improvement\n";
    for (auto const &path : a.mappings) {
        auto const doc = mapping_from_json(read_json_file(path));
        require_total(doc.mapping, graph, platform);
        double const makespan = evaluator.evaluate(doc.mapping);
        double const rel = relative_improvement(baseline, makespan);
        csv << path << ',' << doc.algorithm << ',' << format_number(baseline) << ',' << format_number(makespan)
            << ',' << format_number(rel) << '\n';
        rows.push_back({{"mapping", path},
                        {"algorithm", doc.algorithm},
                        {"makespan_baseline", baseline},
                        {"makespan", makespan},
                        {"rel_improvement", rel}});
    }
    if (format == "csv") {
        g.emit(csv.str());
    } else {
        g.emit(rows);
    }
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Task mapping for heterogeneous CPU/GPU/FPGA platforms"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals globals;
    app.add_option("--seed", globals.seed, "Random seed");
    app.add_option("--platform", globals.platform, "Platform JSON file (default: built-in platform)");
    app.add_option("--out", globals.out, "Write output to this file instead of stdout");
    app.add_option("--format", globals.format, "Output format: json or csv (dot for decompose)");

    GenArgs gen;
    auto *gen_cmd = app.add_subcommand("gen", "Generate a random task graph or ingest a workflow");
    gen_cmd->add_option("-n,--tasks", gen.n, "Number of tasks")->check(CLI::Range(2, 1 << 20));
    gen_cmd->add_option("--extra-edges", gen.extra_edges, "Random edges added after construction");
    gen_cmd->add_option("--ratio", gen.ratio, "Series and parallel weights")->expected(2);
    gen_cmd->add_option("--edge-bytes", gen.edge_bytes, "Bytes per edge");
    gen_cmd->add_option("--area-per-complexity", gen.area_per_complexity, "FPGA area per unit of complexity");
    gen_cmd->add_flag("--bare", gen.bare, "Skip random task attributes");
    gen_cmd->add_option("--workflow", gen.workflow, "Ingest a workflow instance JSON instead of generating");
    gen_cmd->add_flag("--allow-external-inputs", gen.allow_external, "Accept workflow inputs nobody produces");
    gen_cmd->add_option("--reference-rate", gen.reference_rate, "Operations per second behind workflow runtimes");

    DecomposeArgs dec;
    auto *dec_cmd = app.add_subcommand("decompose", "Series-parallel decomposition forest of a graph");
    dec_cmd->add_option("--graph", dec.graph, "Graph JSON file")->required();
    dec_cmd->add_option("--cut-rule", dec.cut_rule, "random or smallest-outsize-first");

    MapArgs map;
    auto *map_cmd = app.add_subcommand("map", "Map one graph with one algorithm");
    map_cmd->add_option("--algo", map.algo, "Algorithm name")->required();
    map_cmd->add_option("--graph", map.graph, "Graph JSON file")->required();
    map_cmd->add_option("--gamma", map.gamma, "Threshold for the firstfit variants")->check(CLI::Range(1.0, 1e9));
    map_cmd->add_option("--cut-rule", map.cut_rule, "random or smallest-outsize-first");
    map_cmd->add_option("--population", map.population, "GA population");
    map_cmd->add_option("--generations", map.generations, "GA generations");
    map_cmd->add_option("--schedules", map.schedules, "Random schedules for the reported makespan");

    EvalArgs ev;
    auto *eval_cmd = app.add_subcommand("eval", "Simulate a mapping and print its timeline");
    eval_cmd->add_option("--graph", ev.graph, "Graph JSON file")->required();
    eval_cmd->add_option("--mapping", ev.mapping, "Mapping JSON file")->required();
    eval_cmd->add_option("--schedules", ev.schedules, "Random schedules besides breadth-first");

    BenchArgs bench;
    auto *bench_cmd = app.add_subcommand("bench", "Run an experiment sweep");
    bench_cmd->add_option("--spec", bench.spec, "Experiment JSON file")->required();

    CompareArgs cmp;
    auto *cmp_cmd = app.add_subcommand("compare", "Score several mappings of one graph side by side");
    cmp_cmd->add_option("--graph", cmp.graph, "Graph JSON file")->required();
    cmp_cmd->add_option("--mapping", cmp.mappings, "Mapping JSON files")->required();
    cmp_cmd->add_option("--schedules", cmp.schedules, "Random schedules besides breadth-first");

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const &e) {
        int const code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        if (*gen_cmd) run_gen(globals, gen);
        if (*dec_cmd) run_decompose(globals, dec);
        if (*map_cmd) run_map(globals, map);
        if (*eval_cmd) run_eval(globals, ev);
        if (*bench_cmd) run_bench(globals, bench);
        if (*cmp_cmd) run_compare(globals, cmp);
    } catch (UsageError const &e) {
        std::cerr << "spmap: " << e.what() << '\n';
        return kUsageError;
    } catch (spmap::Error const &e) {
        std::cerr << "spmap: " << e.what() << '\n';
        return kDataError;
    } catch (json::exception const &e) {
        std::cerr << "spmap: " << e.what() << '\n';
        return kDataError;
    }
    return 0;
}
