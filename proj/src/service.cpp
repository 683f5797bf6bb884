#include "actopo/service.hpp"

#include <httplib.h>

#include <cmath>

#include "actopo/error.hpp"
#include "actopo/purity.hpp"

namespace actopo {

namespace {

Service::Response error_response(int status, const std::string& message) {
  return {status, Json{{"error", message}}.dump() + "\n"};
}

std::size_t positive_count(const Json& body, const char* key, std::size_t fallback) {
  if (!body.contains(key)) return fallback;
  const auto& v = body.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) throw ArgumentError(std::string(key) + " must be a positive integer");
  return v.get<std::size_t>();
}

}  // namespace

std::string run_mapper_json(const PointCloud& cloud, const MapperParams& params, bool include_members) {
  return graph_to_string(build_mapper(cloud, params), include_members);
}

MapperParams mapper_params_from_json(const Json& body) {
  if (!body.is_object()) throw ArgumentError("request body must be a JSON object");
  MapperParams params;
  params.num_intervals = positive_count(body, "num_intervals", params.num_intervals);
  params.min_samples = positive_count(body, "min_samples", params.min_samples);
  if (body.contains("filter")) {
    if (!body.at("filter").is_string()) throw ArgumentError("filter must be a string");
    params.filter = body.at("filter").get<std::string>();
  }
  if (body.contains("overlap")) {
    if (!body.at("overlap").is_number()) throw ArgumentError("overlap must be a number");
    params.overlap = body.at("overlap").get<double>();
  }
  if (body.contains("eps")) {
    const auto& eps = body.at("eps");
    if (eps.is_string() && eps.get<std::string>() == "auto") {
      params.eps.reset();
    } else if (eps.is_number()) {
      params.eps = eps.get<double>();
    } else {
      throw ArgumentError("eps must be a number or \"auto\"");
    }
  }
  params.validate();
  return params;
}

void Service::register_cloud(std::string id, PointCloud cloud) {
  cloud.validate();
  clouds_.insert_or_assign(std::move(id), std::move(cloud));
}

const PointCloud* Service::find(const Json& request) const {
  if (!request.contains("cloud_id") || !request.at("cloud_id").is_string()) {
    throw ArgumentError("cloud_id (string) is required");
  }
  const auto it = clouds_.find(request.at("cloud_id").get<std::string>());
  return it == clouds_.end() ? nullptr : &it->second;
}

Service::Response Service::list_clouds() const {
  Json out = Json::array();
  for (const auto& [id, cloud] : clouds_) out.push_back(Json{{"id", id}, {"dim", cloud.dim}, {"size", cloud.size()}});
  return {200, out.dump() + "\n"};
}

Service::Response Service::mapper(const Json& request) const {
  const auto* cloud = find(request);
  if (!cloud) return error_response(404, "unknown cloud id");
  const auto params = mapper_params_from_json(request);
  bool members = true;
  if (request.contains("include_members")) {
    if (!request.at("include_members").is_boolean()) throw ArgumentError("include_members must be a boolean");
    members = request.at("include_members").get<bool>();
  }
  return {200, run_mapper_json(*cloud, params, members)};
}

Service::Response Service::purity(const Json& request) const {
  const auto* cloud = find(request);
  if (!cloud) return error_response(404, "unknown cloud id");
  if (!request.contains("graph")) throw ArgumentError("graph is required");
  const auto graph = graph_from_json(request.at("graph"));
  if (graph.num_points != cloud->size()) throw ArgumentError("graph was built over a different number of points");
  for (const auto& node : graph.nodes) {
    if (node.members.empty()) throw ArgumentError("purity needs a graph with node members");
  }
  const auto report = purity_report(graph, cloud->labels);
  return {200, purity_summary_json(report, graph).dump() + "\n"};
}

Service::Response Service::handle(std::string_view method, std::string_view path, std::string_view body) const {
  try {
    if (method == "GET" && path == "/health") return {200, Json{{"status", "ok"}}.dump() + "\n"};
    if (method == "GET" && path == "/clouds") return list_clouds();
    if (method == "POST" && (path == "/mapper" || path == "/purity")) {
      Json request;
      try {
        request = Json::parse(body);
      } catch (const nlohmann::json::exception& ex) {
        return error_response(400, std::string("invalid JSON: ") + ex.what());
      }
      if (!request.is_object()) return error_response(400, "request body must be a JSON object");
      return path == "/mapper" ? mapper(request) : purity(request);
    }
    return error_response(404, "no such endpoint");
  } catch (const Error& ex) {
    return error_response(400, ex.what());
  } catch (const nlohmann::json::exception& ex) {
    return error_response(400, ex.what());
  }
}

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(const Service& service) : impl_(std::make_unique<Impl>()) {
  const auto route = [&service](const httplib::Request& req, httplib::Response& res) {
    const auto r = service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  impl_->server.Get("/health", route);
  impl_->server.Get("/clouds", route);
  impl_->server.Post("/mapper", route);
  impl_->server.Post("/purity", route);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::listen() {
  impl_->server.listen_after_bind();
}

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace actopo
