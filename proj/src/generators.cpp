#include "spmap/generators.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "spmap/error.hpp"

namespace spmap {

void GenConfig::validate() const {
    if (n_tasks < 2) throw Error("n_tasks must be >= 2");
    if (series_weight == 0 || parallel_weight == 0) throw Error("series/parallel ratio components must be >= 1");
    if (!(edge_bytes > 0.0)) throw Error("edge_bytes must be positive");
}

SpConstruction random_sp_graph(GenConfig const &cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    std::bernoulli_distribution series_step(static_cast<double>(cfg.series_weight) /
                                            static_cast<double>(cfg.series_weight + cfg.parallel_weight));
    SpConstruction out;
    auto &edges = out.raw_edges;
    edges.emplace_back(0, 1);
    NodeId next = 2;
    while (next < cfg.n_tasks) {
        std::uniform_int_distribution<std::size_t> pick(0, edges.size() - 1);
        std::size_t const e = pick(rng);
        if (series_step(rng)) {
            auto const [u, v] = edges[e];
            edges[e] = {u, next};
            edges.emplace_back(next, v);
            out.trace.push_back({SpOperation::Kind::Series, e, next});
            ++next;
        } else {
            edges.push_back(edges[e]);
            out.trace.push_back({SpOperation::Kind::Parallel, e, 0});
        }
    }

    TaskGraph g(cfg.n_tasks);
    std::set<std::pair<NodeId, NodeId>> seen;
    for (auto const &[u, v] : edges) {
        if (seen.insert({u, v}).second) g.add_edge(u, v, cfg.edge_bytes);
    }
    out.graph = std::move(g);
    return out;
}

TaskGraph add_random_edges(TaskGraph const &g, std::size_t k, std::uint64_t seed, double bytes) {
    if (k == 0) return g;
    if (!(bytes > 0.0)) throw Error("edge bytes must be positive");
    std::size_t const n = g.size();
    auto const order = random_topological_order(g, seed);
    std::vector<std::size_t> pos(n);
    for (std::size_t i = 0; i < n; ++i) pos[order[i]] = i;

    std::set<std::pair<NodeId, NodeId>> present;
    for (auto const &e : g.edges()) present.insert({e.src, e.dst});
    std::size_t const capacity = n * (n - 1) / 2;
    if (present.size() + k > capacity) {
        throw GraphError("graph too dense to place " + std::to_string(k) + " new edges");
    }

    TaskGraph out = g;
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_int_distribution<NodeId> any(0, n - 1);
    auto const oriented = [&](NodeId a, NodeId b) { return pos[a] < pos[b] ? std::pair{a, b} : std::pair{b, a}; };

    std::size_t added = 0;
    std::size_t retries = 0;
    std::size_t const max_retries = 64 * k + 1024;
    while (added < k && retries < max_retries) {
        NodeId const a = any(rng);
        NodeId const b = any(rng);
        auto const edge = oriented(a, b);
        if (a == b || present.contains(edge)) {
            ++retries;
            continue;
        }
        present.insert(edge);
        out.add_edge(edge.first, edge.second, bytes);
        ++added;
    }
    if (added < k) {
        // Dense leftovers: draw from the explicit list of free pairs.
        std::vector<std::pair<NodeId, NodeId>> free;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!present.contains({order[i], order[j]})) free.emplace_back(order[i], order[j]);
            }
        }
        std::ranges::sort(free);
        std::shuffle(free.begin(), free.end(), rng);
        for (std::size_t i = 0; added < k; ++i, ++added) out.add_edge(free[i].first, free[i].second, bytes);
    }
    return out;
}

TaskGraph generate_graph(GenConfig const &cfg) {
    auto sp = random_sp_graph(cfg);
    if (cfg.extra_edges == 0) return std::move(sp.graph);
    return add_random_edges(sp.graph, cfg.extra_edges, cfg.seed, cfg.edge_bytes);
}

void AttributeDistribution::validate() const {
    if (!(lognormal_sigma > 0.0)) throw Error("lognormal sigma must be positive");
    if (!(perfect_parallel_prob >= 0.0 && perfect_parallel_prob <= 1.0)) {
        throw Error("perfect_parallel_prob must be in [0,1]");
    }
    if (!(area_per_complexity >= 0.0)) throw Error("area_per_complexity must be >= 0");
}

TaskGraph augment_attributes(TaskGraph const &g, AttributeDistribution const &dist, std::uint64_t seed) {
    dist.validate();
    std::mt19937_64 rng(seed);
    std::lognormal_distribution<double> lognormal(dist.lognormal_mu, dist.lognormal_sigma);
    std::bernoulli_distribution perfect(dist.perfect_parallel_prob);
    std::uniform_real_distribution<double> fraction(0.0, 1.0);

    TaskGraph out = g;
    for (NodeId v = 0; v < g.size(); ++v) {
        TaskAttributes a = g.attributes(v);
        double const drawn = lognormal(rng);
        if (!dist.preserve_complexity) a.complexity = drawn;
        a.streamability = lognormal(rng);
        a.parallelizability = perfect(rng) ? 1.0 : fraction(rng);
        a.area = dist.area_per_complexity * a.complexity;
        out.set_attributes(v, a);
    }
    return out;
}

namespace {


std::string task_key(json const &task) {
    if (task.contains("name") && task["name"].is_string()) return task["name"].get<std::string>();
    if (task.contains("id") && task["id"].is_string()) return task["id"].get<std::string>();
    throw FormatError("workflow task without a string name or id");
}

double number_field(json const &obj, char const *key, std::string const &where) {
    auto const &v = obj.at(key);
    if (!v.is_number()) throw FormatError(where + ": field '" + key + "' must be a number");
    double const x = v.get<double>();
    if (!(x >= 0.0)) throw FormatError(where + ": field '" + key + "' must be non-negative");
    return x;
}

TaskGraph ingest(json const &doc, WorkflowOptions const &options) {
    if (!doc.is_object() || !doc.contains("workflow") || !doc["workflow"].is_object()) {
        throw FormatError("workflow document needs a 'workflow' object");
    }
    auto const &wf = doc["workflow"];
    if (!wf.contains("tasks") || !wf["tasks"].is_array()) throw FormatError("workflow needs a 'tasks' array");
    auto const &tasks = wf["tasks"];

    std::map<std::string, NodeId> index;
    TaskGraph g;
    for (auto const &task : tasks) {
        if (!task.is_object()) throw FormatError("workflow task must be an object");
        std::string key = task_key(task);
        if (index.contains(key)) throw FormatError("duplicate workflow task '" + key + "'");
        index.emplace(key, g.add_node({}, key));
    }

    // file name -> producer, and (producer, consumer) -> summed bytes
    std::map<std::string, NodeId> producer;
    std::map<std::string, double> file_size;
    for (auto const &task : tasks) {
        NodeId const v = index.at(task_key(task));
        if (!task.contains("files")) continue;
        for (auto const &f : task["files"]) {
            std::string const where = "task '" + g.name(v) + "'";
            std::string const link = f.at("link").get<std::string>();
            std::string const name = f.at("name").get<std::string>();
            double const size = number_field(f, "size", where + " file '" + name + "'");
            if (link == "output") {
                auto const [it, fresh] = producer.emplace(name, v);
                if (!fresh && it->second != v) throw FormatError("file '" + name + "' is produced by two tasks");
                file_size[name] = size;
            } else if (link != "input") {
                throw FormatError(where + ": file link must be 'input' or 'output'");
            }
        }
    }

    std::map<std::pair<NodeId, NodeId>, double> flow;
    for (auto const &task : tasks) {
        NodeId const v = index.at(task_key(task));
        if (!task.contains("files")) continue;
        for (auto const &f : task["files"]) {
            if (f.at("link").get<std::string>() != "input") continue;
            std::string const name = f.at("name").get<std::string>();
            auto const it = producer.find(name);
            if (it == producer.end()) {
                if (options.allow_external_inputs) continue;
                throw FormatError("task '" + g.name(v) + "' reads file '" + name + "' that no task produces");
            }
            if (it->second == v) continue;
            // Zero-byte files still order the tasks.
            flow[{it->second, v}] += std::max(file_size.at(name), 1.0);
        }
    }
    auto const link_tasks = [&](std::string const &from, std::string const &to) {
        auto const a = index.find(from);
        auto const b = index.find(to);
        if (a == index.end()) throw FormatError("unknown task '" + from + "' in parent/child link");
        if (b == index.end()) throw FormatError("unknown task '" + to + "' in parent/child link");
        flow.try_emplace({a->second, b->second}, 1.0);
    };
    for (auto const &task : tasks) {
        std::string const key = task_key(task);
        if (task.contains("parents")) {
            for (auto const &p : task["parents"]) link_tasks(p.get<std::string>(), key);
        }
        if (task.contains("children")) {
            for (auto const &c : task["children"]) link_tasks(key, c.get<std::string>());
        }
    }
    for (auto const &[pair, bytes] : flow) g.add_edge(pair.first, pair.second, bytes);

    auto const violations = validate(g);
    if (!violations.empty()) throw GraphError("workflow graph is invalid: " + violations.front().message);

    for (auto const &task : tasks) {
        NodeId const v = index.at(task_key(task));
        std::string const where = "task '" + g.name(v) + "'";
        double const input = g.in_degree(v) == 0 ? options.source_input_bytes : g.input_bytes(v);
        TaskAttributes a = g.attributes(v);
        if (task.contains("operations")) {
            a.complexity = number_field(task, "operations", where) / input;
        } else if (task.contains("runtime")) {
            a.complexity = number_field(task, "runtime", where) * options.reference_rate / input;
        } else if (task.contains("runtimeInSeconds")) {
            a.complexity = number_field(task, "runtimeInSeconds", where) * options.reference_rate / input;
        } else {
            throw FormatError(where + " declares neither runtime nor operations");
        }
        g.set_attributes(v, a);
    }
    return g;
}

} // namespace

TaskGraph ingest_workflow(json const &doc, WorkflowOptions const &options) {
    try {
        return ingest(doc, options);
    } catch (json::exception const &e) {
        throw FormatError(std::string("workflow schema violation: ") + e.what());
    }
}

} // namespace spmap
