#include "spmap/mappers.hpp"

#include "spmap/error.hpp"

namespace spmap {

std::vector<std::string> const &algorithm_names() {
    static std::vector<std::string> const names{"single_node", "series_parallel", "sn_firstfit", "sp_firstfit",
                                                "heft",        "peft",            "nsga2"};
    return names;
}

namespace {

AlgorithmRun from_greedy(MapResult r) {
    return {std::move(r.mapping), r.evaluations, r.iterations, r.makespan, r.baseline};
}

AlgorithmRun from_mapping(Mapping m, TaskGraph const &g, Platform const &platform, EvalConfig const &eval,
                          std::size_t evaluations, std::size_t iterations) {
    Evaluator const evaluator(g, platform, eval);
    double const cost = evaluator.internal_cost(m);
    double const baseline = evaluator.internal_cost(Mapping::uniform(g.size(), platform.default_unit()));
    return {std::move(m), evaluations, iterations, cost, baseline};
}

} // namespace

AlgorithmRun run_algorithm(std::string const &name, TaskGraph const &g, Platform const &platform,
                           AlgorithmOptions const &options) {
    auto const &cfg = options.mapper;
    auto const sp_set = [&] { return series_parallel_subgraphs(g, CutRule::from_name(options.cut_rule), cfg.seed); };

    if (name == "single_node") return from_greedy(decomposition_map(g, platform, single_node_subgraphs(g), cfg));
    if (name == "series_parallel") return from_greedy(decomposition_map(g, platform, sp_set(), cfg));
    if (name == "sn_firstfit") return from_greedy(threshold_map(g, platform, single_node_subgraphs(g), cfg));
    if (name == "sp_firstfit") return from_greedy(threshold_map(g, platform, sp_set(), cfg));
    if (name == "heft") return from_mapping(heft(g, platform, cfg.eval).mapping, g, platform, cfg.eval, 0, 0);
    if (name == "peft") return from_mapping(peft(g, platform, cfg.eval).mapping, g, platform, cfg.eval, 0, 0);
    if (name == "nsga2") {
        auto r = nsga2_map(g, platform, options.ga, cfg.eval);
        return from_mapping(std::move(r.mapping), g, platform, cfg.eval, r.evaluations,
                            r.best_per_generation.size() - 1);
    }
    throw Error("unknown algorithm: " + name);
}

} // namespace spmap
