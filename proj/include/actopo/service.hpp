#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "actopo/graph_json.hpp"
#include "actopo/mapper.hpp"
#include "actopo/tensor_io.hpp"

namespace actopo {

// Mapper graph JSON for a cloud; the single code path behind `actopo mapper`
// and `POST /mapper`.
std::string run_mapper_json(const PointCloud& cloud, const MapperParams& params, bool include_members = true);

// Reads {filter, num_intervals, overlap, eps (number or "auto"), min_samples}; absent
// fields keep their defaults. Throws ArgumentError on bad values.
MapperParams mapper_params_from_json(const Json& body);

// Read-only analysis service over clouds registered at startup.
class Service {
 public:
  struct Response {
    int status = 200;
    std::string body;
  };

  void register_cloud(std::string id, PointCloud cloud);
  const std::map<std::string, PointCloud>& clouds() const { return clouds_; }

  // GET /health, GET /clouds, POST /mapper, POST /purity.
  Response handle(std::string_view method, std::string_view path, std::string_view body) const;

 private:
  Response list_clouds() const;
  Response mapper(const Json& request) const;
  Response purity(const Json& request) const;
  const PointCloud* find(const Json& request) const;

  std::map<std::string, PointCloud> clouds_;
};

// HTTP front end for a Service. Requests are handled concurrently; the
// service is only read.
class HttpServer {
 public:
  explicit HttpServer(const Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 binds any free port. Returns the bound port.
  int bind(const std::string& host, int port);
  // Blocks until stop() is called.
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace actopo
