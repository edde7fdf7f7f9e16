#include "spmap/mappers.hpp"

#include <algorithm>
#include <numeric>

#include "spmap/error.hpp"

namespace spmap {

namespace {

// Enumerates (subgraph, unit) remappings of a current mapping. Candidate k
// moves subgraph k / m to unit k % m, so ascending k follows the
// (subgraph lexicographic order, unit id) tie-break.
class MoveSpace {
  public:
    MoveSpace(TaskGraph const &g, Platform const &platform, SubgraphSet const &subgraphs, EvalConfig const &eval)
        : evaluator_(g, platform, eval), subgraphs_(subgraphs.subgraphs()), units_(platform.size()),
          current_(Mapping::uniform(g.size(), platform.default_unit())) {
        for (auto const &s : subgraphs_) {
            for (NodeId v : s) {
                if (v >= g.size()) throw Error("subgraph references a node outside the graph");
            }
        }
        cost_ = evaluator_.internal_cost(current_);
    }

    std::size_t size() const { return subgraphs_.size() * units_; }
    double cost() const { return cost_; }
    Mapping const &mapping() const { return current_; }
    std::size_t evaluations() const { return evaluations_; }

    double evaluate(std::size_t k) {
        auto const &nodes = subgraphs_[k / units_];
        UnitId const target = k % units_;
        saved_.clear();
        for (NodeId v : nodes) {
            saved_.push_back(current_[v]);
            current_[v] = target;
        }
        double const c = evaluator_.internal_cost(current_);
        for (std::size_t i = 0; i < nodes.size(); ++i) current_[nodes[i]] = saved_[i];
        ++evaluations_;
        return c;
    }

    void apply(std::size_t k, double new_cost) {
        for (NodeId v : subgraphs_[k / units_]) current_[v] = k % units_;
        cost_ = new_cost;
    }

  private:
    Evaluator evaluator_;
    std::vector<std::vector<NodeId>> const &subgraphs_;
    std::size_t units_;
    Mapping current_;
    double cost_ = 0.0;
    std::size_t evaluations_ = 0;
    std::vector<UnitId> saved_;
};

MapResult finish(MoveSpace const &space, double baseline, std::size_t iterations, std::vector<double> trajectory) {
    return {space.mapping(), space.cost(), baseline, iterations, space.evaluations(), std::move(trajectory)};
}

} // namespace

MapResult decomposition_map(TaskGraph const &g, Platform const &platform, SubgraphSet const &subgraphs,
                            MapperConfig const &cfg) {
    MoveSpace space(g, platform, subgraphs, cfg.eval);
    double const baseline = space.cost();
    std::size_t const cap = cfg.iteration_cap.value_or(g.size());
    std::size_t iterations = 0;
    std::vector<double> trajectory;

    while (iterations < cap) {
        double best = space.cost();
        std::optional<std::size_t> best_move;
        for (std::size_t k = 0; k < space.size(); ++k) {
            double const c = space.evaluate(k);
            if (c < best) {
                best = c;
                best_move = k;
            }
        }
        if (!best_move) break;
        space.apply(*best_move, best);
        ++iterations;
        trajectory.push_back(best);
    }
    return finish(space, baseline, iterations, std::move(trajectory));
}

MapResult threshold_map(TaskGraph const &g, Platform const &platform, SubgraphSet const &subgraphs,
                        MapperConfig const &cfg) {
    if (!(cfg.gamma >= 1.0)) throw Error("gamma must be >= 1");
    MoveSpace space(g, platform, subgraphs, cfg.eval);
    double const baseline = space.cost();
    std::size_t const cap = cfg.iteration_cap.value_or(g.size());
    std::size_t iterations = 0;
    std::vector<double> trajectory;
    if (cap == 0) return finish(space, baseline, iterations, std::move(trajectory));

    // First iteration: full sweep, which seeds every expected improvement.
    std::vector<double> expected(space.size());
    std::vector<double> last_cost(space.size());
    {
        std::optional<std::size_t> best_move;
        double best = space.cost();
        for (std::size_t k = 0; k < space.size(); ++k) {
            last_cost[k] = space.evaluate(k);
            expected[k] = space.cost() - last_cost[k];
            if (last_cost[k] < best) {
                best = last_cost[k];
                best_move = k;
            }
        }
        if (!best_move) return finish(space, baseline, iterations, std::move(trajectory));
        space.apply(*best_move, best);
        ++iterations;
        trajectory.push_back(best);
    }

    // Max-heap on expected improvement; lower candidate index wins ties.
    auto const before = [&expected](std::size_t a, std::size_t b) {
        return expected[a] < expected[b] || (expected[a] == expected[b] && a > b);
    };
    std::vector<std::size_t> heap;
    while (iterations < cap) {
        heap.resize(space.size());
        std::iota(heap.begin(), heap.end(), std::size_t{0});
        std::ranges::make_heap(heap, before);

        std::optional<std::size_t> best_move;
        double best_gain = 0.0;
        while (!heap.empty()) {
            if (best_move && !(expected[heap.front()] > best_gain / cfg.gamma)) break;
            std::ranges::pop_heap(heap, before);
            std::size_t const k = heap.back();
            heap.pop_back();
            last_cost[k] = space.evaluate(k);
            double const gain = space.cost() - last_cost[k];
            expected[k] = gain;
            if (gain > best_gain) {
                best_gain = gain;
                best_move = k;
            }
        }
        // An empty heap without a move means every candidate was re-evaluated
        // against the current mapping: converged.
        if (!best_move) break;
        space.apply(*best_move, last_cost[*best_move]);
        ++iterations;
        trajectory.push_back(last_cost[*best_move]);
    }
    return finish(space, baseline, iterations, std::move(trajectory));
}

} // namespace spmap
