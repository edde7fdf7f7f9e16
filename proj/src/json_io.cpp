#include "spmap/json_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "spmap/error.hpp"

namespace spmap {

namespace {

void require_keys(json const &obj, std::set<std::string> const &allowed, std::set<std::string> const &required,
                  std::string const &where) {
    if (!obj.is_object()) throw FormatError(where + " must be an object");
    for (auto const &[key, value] : obj.items()) {
        if (!allowed.contains(key)) throw FormatError(where + ": unknown field '" + key + "'");
    }
    for (auto const &key : required) {
        if (!obj.contains(key)) throw FormatError(where + ": missing field '" + key + "'");
    }
}

double get_number(json const &obj, std::string const &key, std::string const &where) {
    auto const &v = obj.at(key);
    if (!v.is_number()) throw FormatError(where + ": field '" + key + "' must be a number");
    return v.get<double>();
}

std::size_t get_index(json const &obj, std::string const &key, std::string const &where) {
    auto const &v = obj.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw FormatError(where + ": field '" + key + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

json const &get_array(json const &obj, std::string const &key, std::string const &where) {
    auto const &v = obj.at(key);
    if (!v.is_array()) throw FormatError(where + ": field '" + key + "' must be an array");
    return v;
}

json tree_to_json(DecompTree const &t) {
    json out{{"kind", kind_name(t.kind)}, {"start", t.start}, {"end", t.end}, {"outsize", t.outsize}};
    if (t.kind == DecompKind::Leaf) {
        out["edge"] = t.edge;
    } else {
        json children = json::array();
        for (auto const &c : t.children) children.push_back(tree_to_json(c));
        out["children"] = std::move(children);
    }
    return out;
}

} // namespace

std::string format_number(double x) {
    char buf[64];
    auto const [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

json graph_to_json(TaskGraph const &g) {
    json nodes = json::array();
    for (NodeId v = 0; v < g.size(); ++v) {
        auto const &a = g.attributes(v);
        json node{{"id", v}};
        if (!g.name(v).empty()) node["name"] = g.name(v);
        node["complexity"] = a.complexity;
        node["parallelizability"] = a.parallelizability;
        node["streamability"] = a.streamability;
        node["area"] = a.area;
        nodes.push_back(std::move(node));
    }
    json edges = json::array();
    for (auto const &e : g.edges()) edges.push_back({{"src", e.src}, {"dst", e.dst}, {"bytes", e.bytes}});
    return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

TaskGraph graph_from_json(json const &doc) {
    require_keys(doc, {"nodes", "edges"}, {"nodes", "edges"}, "graph");
    auto const &nodes = get_array(doc, "nodes", "graph");
    std::vector<std::pair<std::size_t, json const *>> by_id;
    for (auto const &node : nodes) {
        require_keys(node, {"id", "name", "complexity", "parallelizability", "streamability", "area"},
                     {"id", "complexity", "parallelizability", "streamability", "area"}, "graph node");
        by_id.emplace_back(get_index(node, "id", "graph node"), &node);
    }
    std::ranges::sort(by_id, {}, &std::pair<std::size_t, json const *>::first);
    TaskGraph g;
    for (std::size_t i = 0; i < by_id.size(); ++i) {
        if (by_id[i].first != i) throw FormatError("graph node ids must be dense 0..n-1");
        json const &node = *by_id[i].second;
        std::string const where = "graph node " + std::to_string(i);
        TaskAttributes a{get_number(node, "complexity", where), get_number(node, "parallelizability", where),
                         get_number(node, "streamability", where), get_number(node, "area", where)};
        std::string name;
        if (node.contains("name")) {
            if (!node["name"].is_string()) throw FormatError(where + ": field 'name' must be a string");
            name = node["name"].get<std::string>();
        }
        g.add_node(a, std::move(name));
    }
    for (auto const &edge : get_array(doc, "edges", "graph")) {
        require_keys(edge, {"src", "dst", "bytes"}, {"src", "dst", "bytes"}, "graph edge");
        std::size_t const src = get_index(edge, "src", "graph edge");
        std::size_t const dst = get_index(edge, "dst", "graph edge");
        if (src >= g.size() || dst >= g.size()) {
            throw FormatError("graph edge " + std::to_string(src) + "->" + std::to_string(dst) +
                              " references a missing node");
        }
        g.add_edge(src, dst, get_number(edge, "bytes", "graph edge"));
    }
    return g;
}

json platform_to_json(Platform const &p) {
    json units = json::array();
    for (auto const &u : p.units()) {
        units.push_back({{"id", u.id},
                         {"kind", to_string(u.kind)},
                         {"cores", u.cores},
                         {"per_core_rate", u.per_core_rate},
                         {"area_capacity", u.area_capacity},
                         {"stream_startup", u.stream_startup}});
    }
    json bandwidth = json::array();
    for (UnitId a = 0; a < p.size(); ++a) {
        for (UnitId b = 0; b < p.size(); ++b) {
            if (a != b && p.has_bandwidth(a, b)) {
                bandwidth.push_back({{"from", a}, {"to", b}, {"bytes_per_sec", p.bandwidth(a, b)}});
            }
        }
    }
    return {{"units", std::move(units)}, {"default_unit", p.default_unit()}, {"bandwidth", std::move(bandwidth)}};
}

Platform platform_from_json(json const &doc) {
    require_keys(doc, {"units", "default_unit", "bandwidth"}, {"units", "default_unit", "bandwidth"}, "platform");
    std::vector<ProcessingUnit> units;
    for (auto const &u : get_array(doc, "units", "platform")) {
        require_keys(u, {"id", "kind", "cores", "per_core_rate", "area_capacity", "stream_startup"},
                     {"id", "kind", "cores", "per_core_rate"}, "platform unit");
        ProcessingUnit unit;
        unit.id = get_index(u, "id", "platform unit");
        if (!u["kind"].is_string()) throw FormatError("platform unit: field 'kind' must be a string");
        try {
            unit.kind = unit_kind_from_string(u["kind"].get<std::string>());
        } catch (PlatformError const &e) {
            throw FormatError(e.what());
        }
        unit.cores = get_index(u, "cores", "platform unit");
        unit.per_core_rate = get_number(u, "per_core_rate", "platform unit");
        if (u.contains("area_capacity")) unit.area_capacity = get_number(u, "area_capacity", "platform unit");
        if (u.contains("stream_startup")) unit.stream_startup = get_number(u, "stream_startup", "platform unit");
        units.push_back(unit);
    }
    std::ranges::sort(units, {}, &ProcessingUnit::id);
    Platform p(std::move(units), get_index(doc, "default_unit", "platform"));
    for (auto const &b : get_array(doc, "bandwidth", "platform")) {
        require_keys(b, {"from", "to", "bytes_per_sec"}, {"from", "to", "bytes_per_sec"}, "platform bandwidth");
        std::size_t const from = get_index(b, "from", "platform bandwidth");
        std::size_t const to = get_index(b, "to", "platform bandwidth");
        if (from >= p.size() || to >= p.size()) throw PlatformError("bandwidth entry references a missing unit");
        p.set_bandwidth(from, to, get_number(b, "bytes_per_sec", "platform bandwidth"));
    }
    p.validate();
    return p;
}

json mapping_to_json(MappingDocument const &doc) {
    json assignment = json::array();
    for (NodeId v = 0; v < doc.mapping.size(); ++v) assignment.push_back({{"task", v}, {"unit", doc.mapping[v]}});
    return {{"assignment", std::move(assignment)},
            {"algorithm", doc.algorithm},
            {"seed", doc.seed},
            {"makespan", doc.makespan}};
}

MappingDocument mapping_from_json(json const &doc) {
    require_keys(doc, {"assignment", "algorithm", "seed", "makespan"}, {"assignment"}, "mapping");
    MappingDocument out;
    auto const &entries = get_array(doc, "assignment", "mapping");
    out.mapping.assignment.assign(entries.size(), 0);
    std::vector<bool> seen(entries.size(), false);
    for (auto const &a : entries) {
        require_keys(a, {"task", "unit"}, {"task", "unit"}, "mapping entry");
        std::size_t const task = get_index(a, "task", "mapping entry");
        if (task >= entries.size() || seen[task]) throw FormatError("mapping tasks must be dense 0..n-1");
        seen[task] = true;
        out.mapping[task] = get_index(a, "unit", "mapping entry");
    }
    if (doc.contains("algorithm")) {
        if (!doc["algorithm"].is_string()) throw FormatError("mapping: field 'algorithm' must be a string");
        out.algorithm = doc["algorithm"].get<std::string>();
    }
    if (doc.contains("seed")) out.seed = get_index(doc, "seed", "mapping");
    if (doc.contains("makespan")) out.makespan = get_number(doc, "makespan", "mapping");
    return out;
}

json eval_result_to_json(EvalResult const &r, Mapping const &m) {
    json tasks = json::array();
    for (NodeId v = 0; v < r.start.size(); ++v) {
        tasks.push_back({{"task", v}, {"unit", m[v]}, {"start", r.start[v]}, {"finish", r.finish[v]},
                         {"group", r.group[v]}});
    }
    return {{"makespan", r.makespan}, {"schedule", r.schedule_used}, {"tasks", std::move(tasks)}};
}

std::string eval_result_to_csv(EvalResult const &r, Mapping const &m) {
    std::ostringstream out;
    out << "task,unit,start,finish\n";
    for (NodeId v = 0; v < r.start.size(); ++v) {
        out << v << ',' << m[v] << ',' << format_number(r.start[v]) << ',' << format_number(r.finish[v]) << '\n';
    }
    return out.str();
}

json forest_to_json(DecompForest const &forest) {
    json trees = json::array();
    for (auto const &t : forest.trees) trees.push_back(tree_to_json(t));
    return {{"trees", std::move(trees)}};
}

json read_json_file(std::filesystem::path const &path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (json::parse_error const &e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_json_file(std::filesystem::path const &path, json const &doc) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

} // namespace spmap
