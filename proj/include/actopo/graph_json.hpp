#pragma once

#include <string>

#include <json.hpp>

#include "actopo/mapper.hpp"
#include "actopo/purity.hpp"

namespace actopo {

using Json = nlohmann::ordered_json;

// {"params":{...},"noise_count":n,"nodes":[...],"edges":[...]}
Json graph_to_json(const MapperGraph& graph, bool include_members = true);
// Compact serialization used verbatim by both the CLI and the HTTP service.
std::string graph_to_string(const MapperGraph& graph, bool include_members = true);
// Throws FormatError on schema violations. Nodes written without members come
// back with empty member lists.
MapperGraph graph_from_json(const Json& json);

// {mean_node_purity, per_class, noise_count, ...}
Json purity_summary_json(const PurityReport& report, const MapperGraph& graph);

}  // namespace actopo
