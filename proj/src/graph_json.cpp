#include "actopo/graph_json.hpp"

#include "actopo/error.hpp"

namespace actopo {

Json graph_to_json(const MapperGraph& graph, bool include_members) {
  Json params = Json::object();
  params["filter"] = graph.filter;
  params["num_intervals"] = graph.num_intervals;
  params["overlap"] = graph.overlap;
  params["eps"] = graph.eps;
  params["eps_mode"] = graph.eps_auto ? "auto" : "manual";
  params["min_samples"] = graph.min_samples;
  params["num_points"] = graph.num_points;

  Json nodes = Json::array();
  for (const auto& node : graph.nodes) {
    Json j = Json::object();
    j["id"] = node.id;
    j["interval"] = node.interval;
    j["size"] = node.members.size();
    if (include_members) j["members"] = node.members;
    Json labels = Json::object();
    for (const auto& [label, count] : node.label_counts) labels[std::to_string(label)] = count;
    j["labels"] = std::move(labels);
    j["avg_filter"] = node.mean_filter;
    nodes.push_back(std::move(j));
  }
  Json edges = Json::array();
  for (const auto& e : graph.edges) edges.push_back(Json{{"a", e.a}, {"b", e.b}, {"w", e.weight}});

  Json out = Json::object();
  out["params"] = std::move(params);
  out["noise_count"] = graph.noise_count;
  out["nodes"] = std::move(nodes);
  out["edges"] = std::move(edges);
  return out;
}

std::string graph_to_string(const MapperGraph& graph, bool include_members) {
  return graph_to_json(graph, include_members).dump() + "\n";
}

MapperGraph graph_from_json(const Json& json) {
  try {
    MapperGraph graph;
    const auto& params = json.at("params");
    graph.filter = params.value("filter", std::string("l2"));
    graph.num_intervals = params.at("num_intervals").get<std::size_t>();
    graph.overlap = params.at("overlap").get<double>();
    graph.eps = params.at("eps").get<double>();
    graph.eps_auto = params.value("eps_mode", std::string("manual")) == "auto";
    graph.min_samples = params.at("min_samples").get<std::size_t>();
    graph.num_points = params.at("num_points").get<std::size_t>();
    graph.noise_count = json.at("noise_count").get<std::size_t>();
    for (const auto& j : json.at("nodes")) {
      MapperNode node;
      node.id = j.at("id").get<std::size_t>();
      node.interval = j.at("interval").get<std::size_t>();
      if (j.contains("members")) node.members = j.at("members").get<std::vector<std::size_t>>();
      for (const auto& [label, count] : j.at("labels").items()) {
        node.label_counts[static_cast<Label>(std::stol(label))] = count.get<std::size_t>();
      }
      node.mean_filter = j.at("avg_filter").get<double>();
      if (node.id != graph.nodes.size()) throw FormatError("graph node ids must be 0..n-1 in order");
      graph.nodes.push_back(std::move(node));
    }
    for (const auto& j : json.at("edges")) {
      MapperEdge e{j.at("a").get<std::size_t>(), j.at("b").get<std::size_t>(), j.at("w").get<std::size_t>()};
      if (e.a >= graph.nodes.size() || e.b >= graph.nodes.size()) throw FormatError("edge refers to a missing node");
      graph.edges.push_back(e);
    }
    return graph;
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("malformed mapper graph JSON: ") + ex.what());
  } catch (const std::logic_error& ex) {
    throw FormatError(std::string("malformed mapper graph JSON: ") + ex.what());
  }
}

Json purity_summary_json(const PurityReport& report, const MapperGraph& graph) {
  Json per_class = Json::object();
  for (const auto& [k, g] : report.per_class) per_class[std::to_string(k)] = g ? Json(*g) : Json(nullptr);
  Json out = Json::object();
  out["mean_node_purity"] = report.mean_node_purity;
  out["per_class"] = std::move(per_class);
  out["noise_count"] = graph.noise_count;
  out["num_nodes"] = graph.nodes.size();
  out["unclustered_points"] = report.unclustered.size();
  out["node_purity"] = report.node;
  return out;
}

}  // namespace actopo
