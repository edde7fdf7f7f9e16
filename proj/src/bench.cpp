#include "spmap/bench.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <sstream>

#include "spmap/error.hpp"
#include "spmap/json_io.hpp"

namespace spmap {

namespace {

void check_keys(json const &obj, std::set<std::string> const &allowed, std::string const &where) {
    if (!obj.is_object()) throw FormatError(where + " must be an object");
    for (auto const &[key, value] : obj.items()) {
        if (!allowed.contains(key)) throw FormatError(where + ": unknown field '" + key + "'");
    }
}

template <typename T>
void read_field(json const &obj, char const *key, T &out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

SweepAxis axis_from_string(std::string const &name) {
    if (name == "n_tasks") return SweepAxis::NTasks;
    if (name == "extra_edges") return SweepAxis::ExtraEdges;
    if (name == "workflow") return SweepAxis::Workflow;
    throw FormatError("unknown sweep axis '" + name + "'");
}

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

ExperimentSpec parse(json const &doc, std::filesystem::path const &base_dir) {
    check_keys(doc,
               {"algorithms", "axis", "values", "workflows", "generator", "attributes", "workflow_options",
                "repetitions", "seed", "platform", "eval", "gamma", "ga", "cut_rule", "timing_runs"},
               "experiment");
    ExperimentSpec spec;
    read_field(doc, "algorithms", spec.algorithms);
    if (doc.contains("axis")) spec.axis = axis_from_string(doc["axis"].get<std::string>());
    read_field(doc, "values", spec.values);
    if (doc.contains("workflows")) {
        for (auto const &w : doc["workflows"]) spec.workflows.push_back(base_dir / w.get<std::string>());
    }
    if (doc.contains("generator")) {
        auto const &g = doc["generator"];
        check_keys(g, {"n_tasks", "ratio", "extra_edges", "edge_bytes"}, "generator");
        read_field(g, "n_tasks", spec.generator.n_tasks);
        read_field(g, "extra_edges", spec.generator.extra_edges);
        read_field(g, "edge_bytes", spec.generator.edge_bytes);
        if (g.contains("ratio")) {
            auto const ratio = g["ratio"].get<std::vector<std::size_t>>();
            if (ratio.size() != 2) throw FormatError("generator: ratio must be [series, parallel]");
            spec.generator.series_weight = ratio[0];
            spec.generator.parallel_weight = ratio[1];
        }
    }
    if (doc.contains("attributes")) {
        auto const &a = doc["attributes"];
        check_keys(a, {"mu", "sigma", "perfect_parallel_prob", "area_per_complexity"}, "attributes");
        read_field(a, "mu", spec.attributes.lognormal_mu);
        read_field(a, "sigma", spec.attributes.lognormal_sigma);
        read_field(a, "perfect_parallel_prob", spec.attributes.perfect_parallel_prob);
        read_field(a, "area_per_complexity", spec.attributes.area_per_complexity);
    }
    if (doc.contains("workflow_options")) {
        auto const &w = doc["workflow_options"];
        check_keys(w, {"reference_rate", "source_input_bytes", "allow_external_inputs"}, "workflow_options");
        read_field(w, "reference_rate", spec.workflow_options.reference_rate);
        read_field(w, "source_input_bytes", spec.workflow_options.source_input_bytes);
        read_field(w, "allow_external_inputs", spec.workflow_options.allow_external_inputs);
    }
    read_field(doc, "repetitions", spec.repetitions);
    read_field(doc, "seed", spec.seed);
    if (doc.contains("platform")) spec.platform = base_dir / doc["platform"].get<std::string>();
    if (doc.contains("eval")) {
        auto const &e = doc["eval"];
        check_keys(e, {"random_schedules", "internal_schedules", "source_input_bytes"}, "eval");
        read_field(e, "random_schedules", spec.eval.random_schedules);
        read_field(e, "internal_schedules", spec.eval.internal_schedules);
        read_field(e, "source_input_bytes", spec.eval.source_input_bytes);
    }
    read_field(doc, "gamma", spec.gamma);
    if (doc.contains("ga")) {
        auto const &g = doc["ga"];
        check_keys(g, {"population", "generations", "crossover_rate", "mutation_rate"}, "ga");
        read_field(g, "population", spec.ga.population);
        read_field(g, "generations", spec.ga.generations);
        read_field(g, "crossover_rate", spec.ga.crossover_rate);
        if (g.contains("mutation_rate")) spec.ga.mutation_rate = g["mutation_rate"].get<double>();
    }
    read_field(doc, "cut_rule", spec.cut_rule);
    read_field(doc, "timing_runs", spec.timing_runs);
    return spec;
}

template <typename T>
T median(std::vector<T> xs) {
    std::ranges::sort(xs);
    return xs[xs.size() / 2];
}

} // namespace

void ExperimentSpec::validate() const {
    if (algorithms.empty()) throw Error("experiment needs at least one algorithm");
    auto const &known = algorithm_names();
    for (auto const &a : algorithms) {
        if (std::ranges::find(known, a) == known.end()) throw Error("unknown algorithm: " + a);
    }
    if (repetitions == 0) throw Error("repetitions must be >= 1");
    if (timing_runs == 0) throw Error("timing_runs must be >= 1");
    if (point_count() == 0) throw Error("experiment sweep has no points");
    if (!(gamma >= 1.0)) throw Error("gamma must be >= 1");
    CutRule::from_name(cut_rule);
    attributes.validate();
    GenConfig probe = generator;
    if (axis == SweepAxis::NTasks) {
        for (std::size_t n : values) {
            probe.n_tasks = n;
            probe.validate();
        }
    } else {
        probe.validate();
    }
}

std::size_t ExperimentSpec::point_count() const {
    return axis == SweepAxis::Workflow ? workflows.size() : values.size();
}

std::string ExperimentSpec::axis_label(std::size_t point) const {
    if (axis == SweepAxis::Workflow) return workflows.at(point).stem().string();
    return std::to_string(values.at(point));
}

ExperimentSpec experiment_from_json(json const &doc, std::filesystem::path const &base_dir) {
    try {
        return parse(doc, base_dir);
    } catch (json::exception const &e) {
        throw FormatError(std::string("experiment spec: ") + e.what());
    }
}

std::uint64_t instance_seed(std::uint64_t base, std::size_t point, std::size_t repetition) {
    return splitmix(splitmix(base ^ splitmix(point)) + repetition);
}

TaskGraph build_instance(ExperimentSpec const &spec, std::size_t point, std::uint64_t seed) {
    if (spec.axis == SweepAxis::Workflow) {
        TaskGraph const g = ingest_workflow(read_json_file(spec.workflows.at(point)), spec.workflow_options);
        AttributeDistribution dist = spec.attributes;
        dist.preserve_complexity = true;
        return augment_attributes(g, dist, seed);
    }
    GenConfig cfg = spec.generator;
    cfg.seed = seed;
    if (spec.axis == SweepAxis::NTasks) cfg.n_tasks = spec.values.at(point);
    if (spec.axis == SweepAxis::ExtraEdges) cfg.extra_edges = spec.values.at(point);
    return augment_attributes(generate_graph(cfg), spec.attributes, splitmix(seed));
}

ExperimentResult run_experiment(ExperimentSpec const &spec) {
    spec.validate();
    Platform const platform = spec.platform ? platform_from_json(read_json_file(*spec.platform)) : default_platform();
    platform.validate();

    ExperimentResult result;
    for (std::size_t point = 0; point < spec.point_count(); ++point) {
        for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
            std::uint64_t const seed = instance_seed(spec.seed, point, rep);
            TaskGraph const g = build_instance(spec, point, seed);
            require_valid(g);

            AlgorithmOptions options;
            options.mapper.gamma = spec.gamma;
            options.mapper.seed = seed;
            options.mapper.eval = spec.eval;
            options.mapper.eval.seed = seed;
            options.ga = spec.ga;
            options.ga.seed = seed;
            options.cut_rule = spec.cut_rule;

            Evaluator const evaluator(g, platform, options.mapper.eval);
            double const baseline = evaluator.evaluate(Mapping::uniform(g.size(), platform.default_unit()));

            for (auto const &algorithm : spec.algorithms) {
                std::vector<double> times;
                AlgorithmRun run;
                for (std::size_t t = 0; t < spec.timing_runs; ++t) {
                    auto const t0 = std::chrono::steady_clock::now();
                    run = run_algorithm(algorithm, g, platform, options);
                    auto const t1 = std::chrono::steady_clock::now();
                    times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
                }
                double const mapped = evaluator.evaluate(run.mapping);
                result.instances.push_back({point, rep, algorithm, seed, baseline, mapped,
                                            relative_improvement(baseline, mapped), median(times),
                                            run.evaluations});
            }
        }
    }

    std::map<std::pair<std::size_t, std::string>, std::vector<InstanceResult const *>> cells;
    for (auto const &r : result.instances) cells[{r.point, r.algorithm}].push_back(&r);
    for (auto const &[key, members] : cells) {
        ResultRow row{spec.axis_label(key.first), key.second, spec.seed};
        for (auto const *r : members) {
            row.makespan_baseline += r->makespan_baseline;
            row.makespan_mapped += r->makespan_mapped;
            row.rel_improvement += r->rel_improvement;
            row.mapper_ms += r->mapper_ms;
            row.eval_calls += static_cast<double>(r->eval_calls);
        }
        double const k = static_cast<double>(members.size());
        row.makespan_baseline /= k;
        row.makespan_mapped /= k;
        row.rel_improvement /= k;
        row.mapper_ms /= k;
        row.eval_calls /= k;
        result.rows.push_back(std::move(row));
    }
    return result;
}

std::string rows_to_csv(std::vector<ResultRow> const &rows) {
    std::ostringstream out;
    out << kResultColumns << '\n';
    for (auto const &r : rows) {
        out << r.axis << ',' << r.algorithm << ',' << r.seed << ',' << format_number(r.makespan_baseline) << ','
            << format_number(r.makespan_mapped) << ',' << format_number(r.rel_improvement) << ','
            << format_number(r.mapper_ms) << ',' << format_number(r.eval_calls) << '\n';
    }
    return out.str();
}

json rows_to_json(std::vector<ResultRow> const &rows) {
    json out = json::array();
    for (auto const &r : rows) {
        out.push_back({{"axis", r.axis},
                       {"algorithm", r.algorithm},
                       {"seed", r.seed},
                       {"makespan_baseline", r.makespan_baseline},
                       {"makespan_mapped", r.makespan_mapped},
                       {"rel_improvement", r.rel_improvement},
                       {"mapper_ms", r.mapper_ms},
                       {"eval_calls", r.eval_calls}});
    }
    return out;
}

} // namespace spmap
