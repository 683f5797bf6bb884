#include "actopo/mapper.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "actopo/error.hpp"
#include "actopo/kernels.hpp"

namespace actopo {

namespace {

void check_dbscan_args(double eps, std::size_t min_samples) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ArgumentError("eps must be a positive finite number");
  if (min_samples == 0) throw ArgumentError("min_samples must be at least 1");
}

std::vector<int> cluster_from_neighborhoods(const std::vector<std::vector<std::size_t>>& nbrs, std::size_t min_samples) {
  const std::size_t n = nbrs.size();
  std::vector<bool> core(n);
  for (std::size_t i = 0; i < n; ++i) core[i] = nbrs[i].size() >= min_samples;

  std::vector<int> label(n, kNoise);
  int next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (!core[seed] || label[seed] != kNoise) continue;
    label[seed] = next;
    stack.assign(1, seed);
    while (!stack.empty()) {
      const auto p = stack.back();
      stack.pop_back();
      for (const auto q : nbrs[p]) {
        if (core[q] && label[q] == kNoise) {
          label[q] = next;
          stack.push_back(q);
        }
      }
    }
    ++next;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    for (const auto q : nbrs[i]) {
      if (core[q]) {
        label[i] = label[q];
        break;
      }
    }
  }
  return label;
}

}  // namespace

Cover1D uniform_cover(double fmin, double fmax, std::size_t num_intervals, double overlap) {
  if (!std::isfinite(fmin) || !std::isfinite(fmax) || fmin > fmax) throw ArgumentError("cover range must satisfy fmin <= fmax");
  if (num_intervals < 1) throw ArgumentError("cover needs at least one interval");
  if (!(overlap >= 0.0 && overlap < 1.0)) throw ArgumentError("overlap rate must lie in [0, 1)");
  Cover1D cover;
  cover.overlap = overlap;
  if (fmin == fmax) {
    cover.num_intervals = 1;
    cover.intervals.push_back({fmin - 0.5, fmin + 0.5});
    return cover;
  }
  cover.num_intervals = num_intervals;
  const double base = (fmax - fmin) / double(num_intervals);
  const double length = base / (1.0 - overlap);
  for (std::size_t i = 0; i < num_intervals; ++i) {
    const double centre = fmin + (double(i) + 0.5) * base;
    cover.intervals.push_back({centre - 0.5 * length, centre + 0.5 * length});
  }
  // Rounding must not leave the extremes of the range uncovered.
  cover.intervals.front().lo = std::min(cover.intervals.front().lo, fmin);
  cover.intervals.back().hi = std::max(cover.intervals.back().hi, fmax);
  return cover;
}

std::vector<double> l2_filter(const PointCloud& cloud) {
  std::vector<double> out(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    double s = 0.0;
    for (float x : cloud.point(i)) s += double(x) * double(x);
    out[i] = std::sqrt(s);
  }
  return out;
}

std::vector<int> dbscan(const PointCloud& points, double eps, std::size_t min_samples) {
  check_dbscan_args(eps, min_samples);
  return cluster_from_neighborhoods(eps_neighborhoods(points, eps), min_samples);
}

namespace serial {
std::vector<int> dbscan(const PointCloud& points, double eps, std::size_t min_samples) {
  check_dbscan_args(eps, min_samples);
  return cluster_from_neighborhoods(serial::eps_neighborhoods(points, eps), min_samples);
}
}  // namespace serial

std::size_t elbow_index(std::span<const double> curve) {
  if (curve.empty()) throw ArgumentError("elbow of an empty curve");
  const std::size_t n = curve.size();
  if (n < 3) return 0;
  const double dx = double(n - 1);
  const double dy = curve.back() - curve.front();
  const double norm = std::hypot(dx, dy);
  std::size_t best = 0;
  double best_dist = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dist = std::abs(dy * double(i) - dx * (curve[i] - curve.front())) / norm;
    if (dist > best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  return best;
}

double elbow_eps(const PointCloud& cloud, std::size_t k) {
  auto curve = kth_neighbor_distances(cloud, k);
  std::sort(curve.begin(), curve.end());
  return curve[elbow_index(curve)];
}

void MapperParams::validate() const {
  if (num_intervals < 1) throw ArgumentError("num_intervals must be at least 1");
  if (!(overlap >= 0.0 && overlap < 1.0)) throw ArgumentError("overlap must lie in [0, 1)");
  if (eps && (!(*eps > 0.0) || !std::isfinite(*eps))) throw ArgumentError("eps must be a positive finite number");
  if (min_samples < 1) throw ArgumentError("min_samples must be at least 1");
  if (filter != "l2" && filter.rfind("coord:", 0) != 0) throw ArgumentError("filter must be l2 or coord:<j>");
}

std::vector<double> coordinate_filter(const PointCloud& cloud, std::size_t coordinate) {
  if (coordinate >= cloud.dim) {
    throw ArgumentError("filter coordinate " + std::to_string(coordinate) + " outside dimension " + std::to_string(cloud.dim));
  }
  std::vector<double> out(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) out[i] = cloud.point(i)[coordinate];
  return out;
}

std::vector<double> filter_values(const PointCloud& cloud, const std::string& filter) {
  if (filter == "l2") return l2_filter(cloud);
  if (filter.rfind("coord:", 0) == 0) {
    const auto digits = filter.substr(6);
    if (!digits.empty() && digits.find_first_not_of("0123456789") == std::string::npos && digits.size() < 10) {
      return coordinate_filter(cloud, std::stoul(digits));
    }
  }
  throw ArgumentError("filter must be l2 or coord:<j>, got '" + filter + "'");
}

PointCloud subset(const PointCloud& cloud, std::span<const std::size_t> indices) {
  PointCloud out;
  out.dim = cloud.dim;
  out.coords.reserve(indices.size() * cloud.dim);
  for (const auto i : indices) {
    out.push_back(cloud.point(i), cloud.labels[i], cloud.image_ids[i]);
    if (!cloud.positions.empty()) out.positions.push_back(cloud.positions[i]);
  }
  return out;
}

MapperGraph mapper_graph(const PointCloud& cloud, std::span<const double> filter_values, const Cover1D& cover,
                         double eps, std::size_t min_samples) {
  check_dbscan_args(eps, min_samples);
  if (filter_values.size() != cloud.size()) throw ArgumentError("need one filter value per point");
  if (cover.intervals.empty()) throw ArgumentError("cover has no intervals");

  const std::size_t num_intervals = cover.intervals.size();
  std::vector<std::vector<MapperNode>> per_interval(num_intervals);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t iv = 0; iv < static_cast<std::int64_t>(num_intervals); ++iv) {
    const auto& interval = cover.intervals[static_cast<std::size_t>(iv)];
    std::vector<std::size_t> preimage;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (interval.contains(filter_values[i])) preimage.push_back(i);
    }
    if (preimage.empty()) continue;
    const auto labels = serial::dbscan(subset(cloud, preimage), eps, min_samples);
    const int clusters = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<MapperNode> nodes(static_cast<std::size_t>(std::max(clusters, 0)));
    for (std::size_t k = 0; k < preimage.size(); ++k) {
      if (labels[k] == kNoise) continue;
      nodes[static_cast<std::size_t>(labels[k])].members.push_back(preimage[k]);
    }
    for (auto& node : nodes) node.interval = static_cast<std::size_t>(iv);
    per_interval[static_cast<std::size_t>(iv)] = std::move(nodes);
  }

  MapperGraph graph;
  graph.filter = "custom";
  graph.num_points = cloud.size();
  graph.num_intervals = cover.num_intervals;
  graph.overlap = cover.overlap;
  graph.eps = eps;
  graph.min_samples = min_samples;
  for (auto& nodes : per_interval) {
    std::sort(nodes.begin(), nodes.end(),
              [](const MapperNode& x, const MapperNode& y) { return x.members.front() < y.members.front(); });
    for (auto& node : nodes) graph.nodes.push_back(std::move(node));
  }

  std::vector<std::vector<std::size_t>> containing(cloud.size());
  for (std::size_t id = 0; id < graph.nodes.size(); ++id) {
    auto& node = graph.nodes[id];
    node.id = id;
    double sum = 0.0;
    for (const auto m : node.members) {
      ++node.label_counts[cloud.labels[m]];
      sum += filter_values[m];
      containing[m].push_back(id);
    }
    node.mean_filter = sum / double(node.members.size());
  }

  std::map<std::pair<std::size_t, std::size_t>, std::size_t> shared;
  for (const auto& nodes : containing) {
    if (nodes.empty()) ++graph.noise_count;
    for (std::size_t x = 0; x < nodes.size(); ++x) {
      for (std::size_t y = x + 1; y < nodes.size(); ++y) ++shared[{nodes[x], nodes[y]}];
    }
  }
  for (const auto& [ends, weight] : shared) graph.edges.push_back({ends.first, ends.second, weight});
  return graph;
}

MapperGraph build_mapper(const PointCloud& cloud, const MapperParams& params) {
  params.validate();
  cloud.validate();
  const auto filter = filter_values(cloud, params.filter);
  const auto [lo, hi] = std::minmax_element(filter.begin(), filter.end());
  const auto cover = uniform_cover(*lo, *hi, params.num_intervals, params.overlap);
  const double eps = params.eps ? *params.eps : elbow_eps(cloud, params.min_samples);
  auto graph = mapper_graph(cloud, filter, cover, eps, params.min_samples);
  graph.eps_auto = !params.eps.has_value();
  graph.filter = params.filter;
  graph.num_intervals = params.num_intervals;
  return graph;
}

std::size_t connected_components(const MapperGraph& graph) {
  std::vector<std::size_t> parent(graph.nodes.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = graph.nodes.size();
  for (const auto& e : graph.edges) {
    const auto a = find(e.a), b = find(e.b);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components;
}

long long cycle_rank(const MapperGraph& graph) {
  return static_cast<long long>(graph.edges.size()) - static_cast<long long>(graph.nodes.size()) +
         static_cast<long long>(connected_components(graph));
}

}  // namespace actopo
