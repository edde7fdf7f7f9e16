#include "spmap/mappers.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "spmap/error.hpp"

namespace spmap {

std::size_t repair_area(Mapping &m, TaskGraph const &g, Platform const &platform) {
    std::size_t moved = 0;
    for (auto const &unit : platform.units()) {
        if (unit.kind != UnitKind::FPGA) continue;
        std::vector<NodeId> on_unit;
        double used = 0.0;
        for (NodeId v = 0; v < g.size(); ++v) {
            if (m[v] == unit.id) {
                on_unit.push_back(v);
                used += g.attributes(v).area;
            }
        }
        if (used <= unit.area_capacity) continue;
        std::ranges::stable_sort(on_unit, [&g](NodeId a, NodeId b) {
            return g.attributes(a).area > g.attributes(b).area;
        });
        for (NodeId v : on_unit) {
            if (used <= unit.area_capacity) break;
            m[v] = platform.default_unit();
            used -= g.attributes(v).area;
            ++moved;
        }
    }
    return moved;
}

namespace {

using Genome = std::vector<UnitId>;

class Population {
  public:
    Population(TaskGraph const &g, Platform const &platform, EvalConfig const &eval, std::vector<NodeId> gene_order)
        : g_(g), platform_(platform), evaluator_(g, platform, eval), gene_order_(std::move(gene_order)) {}

    // Repairs in place and returns the internal cost.
    double fitness(Genome &genome) {
        Mapping m = Mapping::uniform(g_.size(), platform_.default_unit());
        for (std::size_t i = 0; i < genome.size(); ++i) m[gene_order_[i]] = genome[i];
        if (repair_area(m, g_, platform_) > 0) {
            for (std::size_t i = 0; i < genome.size(); ++i) genome[i] = m[gene_order_[i]];
        }
        ++evaluations;
        return evaluator_.internal_cost(m);
    }

    Mapping to_mapping(Genome const &genome) const {
        Mapping m = Mapping::uniform(g_.size(), platform_.default_unit());
        for (std::size_t i = 0; i < genome.size(); ++i) m[gene_order_[i]] = genome[i];
        return m;
    }

    std::size_t evaluations = 0;

  private:
    TaskGraph const &g_;
    Platform const &platform_;
    Evaluator evaluator_;
    std::vector<NodeId> gene_order_;
};

} // namespace

GAResult nsga2_map(TaskGraph const &g, Platform const &platform, GAConfig const &ga, EvalConfig const &eval) {
    if (ga.population < 2) throw Error("GA population must be >= 2");
    if (ga.crossover_rate < 0.0 || ga.crossover_rate > 1.0) throw Error("crossover rate must be in [0,1]");
    std::size_t const n = g.size();
    std::size_t const m = platform.size();
    double const mutation_rate = ga.mutation_rate.value_or(n > 0 ? 1.0 / static_cast<double>(n) : 0.0);
    if (mutation_rate < 0.0 || mutation_rate > 1.0) throw Error("mutation rate must be in [0,1]");

    std::mt19937_64 rng(ga.seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<UnitId> any_unit(0, m - 1);
    Population pop(g, platform, eval, bfs_order(g));

    std::vector<Genome> genomes;
    std::vector<double> fitness;
    genomes.reserve(2 * ga.population);
    fitness.reserve(2 * ga.population);
    // The all-default individual anchors the search at the baseline.
    genomes.emplace_back(n, platform.default_unit());
    while (genomes.size() < ga.population) {
        Genome genome(n);
        for (auto &gene : genome) gene = any_unit(rng);
        genomes.push_back(std::move(genome));
    }
    for (auto &genome : genomes) fitness.push_back(pop.fitness(genome));

    auto const survivors = [&]() {
        std::vector<std::size_t> idx(genomes.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::ranges::stable_sort(idx, [&](std::size_t a, std::size_t b) { return fitness[a] < fitness[b]; });
        idx.resize(ga.population);
        std::vector<Genome> next_genomes;
        std::vector<double> next_fitness;
        for (std::size_t i : idx) {
            next_genomes.push_back(std::move(genomes[i]));
            next_fitness.push_back(fitness[i]);
        }
        genomes = std::move(next_genomes);
        fitness = std::move(next_fitness);
    };
    survivors();

    GAResult result;
    result.best_per_generation.push_back(fitness.front());

    std::uniform_int_distribution<std::size_t> any_individual(0, ga.population - 1);
    auto const tournament = [&]() {
        std::size_t const a = any_individual(rng);
        std::size_t const b = any_individual(rng);
        return fitness[b] < fitness[a] ? b : a;
    };
    auto const mutate = [&](Genome &genome) {
        if (m < 2) return;
        std::uniform_int_distribution<UnitId> other(0, m - 2);
        for (auto &gene : genome) {
            if (coin(rng) < mutation_rate) {
                UnitId const pick = other(rng);
                gene = pick >= gene ? pick + 1 : pick;
            }
        }
    };

    for (std::size_t gen = 0; gen < ga.generations; ++gen) {
        std::size_t const parents = genomes.size();
        while (genomes.size() < parents + ga.population) {
            Genome a = genomes[tournament()];
            Genome b = genomes[tournament()];
            if (n >= 2 && coin(rng) < ga.crossover_rate) {
                std::uniform_int_distribution<std::size_t> cut(1, n - 1);
                std::size_t const point = cut(rng);
                std::swap_ranges(a.begin() + static_cast<std::ptrdiff_t>(point), a.end(),
                                 b.begin() + static_cast<std::ptrdiff_t>(point));
            }
            mutate(a);
            mutate(b);
            for (Genome *child : {&a, &b}) {
                if (genomes.size() == parents + ga.population) break;
                double const f = pop.fitness(*child);
                genomes.push_back(std::move(*child));
                fitness.push_back(f);
            }
        }
        survivors();
        result.best_per_generation.push_back(fitness.front());
    }

    result.mapping = pop.to_mapping(genomes.front());
    result.makespan = fitness.front();
    result.evaluations = pop.evaluations;
    return result;
}

} // namespace spmap
