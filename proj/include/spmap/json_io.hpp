#pragma once

#include <filesystem>
#include <string>

#include "spmap/evaluator.hpp"
#include "spmap/json.hpp"
#include "spmap/platform.hpp"
#include "spmap/spdag.hpp"
#include "spmap/taskgraph.hpp"

namespace spmap {

// Graph: {"nodes": [{"id", "name"?, "complexity", "parallelizability",
// "streamability", "area"}], "edges": [{"src", "dst", "bytes"}]}.
json graph_to_json(TaskGraph const &g);
/// Throws FormatError on unknown fields, missing fields or non-dense ids.
TaskGraph graph_from_json(json const &doc);

json platform_to_json(Platform const &p);
/// Throws FormatError on malformed documents and PlatformError if the
/// platform is inconsistent.
Platform platform_from_json(json const &doc);

struct MappingDocument {
    Mapping mapping;
    std::string algorithm;
    std::uint64_t seed = 0;
    double makespan = 0.0;
};

json mapping_to_json(MappingDocument const &doc);
MappingDocument mapping_from_json(json const &doc);

/// Timeline of one simulation, one record per task.
json eval_result_to_json(EvalResult const &r, Mapping const &m);
/// CSV with header `task,unit,start,finish`.
std::string eval_result_to_csv(EvalResult const &r, Mapping const &m);

json forest_to_json(DecompForest const &forest);

json read_json_file(std::filesystem::path const &path);
/// Writes `doc` indented by two spaces with a trailing newline.
void write_json_file(std::filesystem::path const &path, json const &doc);

/// Shortest round-trip decimal form, as used for every number we print.
std::string format_number(double x);

} // namespace spmap
