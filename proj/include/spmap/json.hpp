#pragma once

#include <json.hpp>

namespace spmap {

/// Documents keep their keys in insertion order when written.
using json = nlohmann::ordered_json;

} // namespace spmap
