#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "actopo/tensor_io.hpp"

namespace actopo {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return lo <= v && v <= hi; }
};

// Uniform cover of a filter range. Interval i is centred at
// fmin + (i + 0.5) * b with length L = b / (1 - overlap), b = range / n, so
// neighbouring intervals share exactly overlap * L.
struct Cover1D {
  std::vector<Interval> intervals;
  std::size_t num_intervals = 0;
  double overlap = 0.0;
};

Cover1D uniform_cover(double fmin, double fmax, std::size_t num_intervals, double overlap);

std::vector<double> l2_filter(const PointCloud& cloud);
// Projection onto one coordinate; coordinate 1 of a planar cloud is height.
std::vector<double> coordinate_filter(const PointCloud& cloud, std::size_t coordinate);
// "l2" or "coord:<j>". Throws ArgumentError for anything else.
std::vector<double> filter_values(const PointCloud& cloud, const std::string& filter);

inline constexpr int kNoise = -1;

// Density clustering. A point is core when its closed eps-ball (itself
// included) holds at least min_samples points; clusters are the components
// of core points under eps-reachability, numbered by their smallest core
// point. A border point joins the cluster of its lowest-index core neighbour.
std::vector<int> dbscan(const PointCloud& points, double eps, std::size_t min_samples);

namespace serial {
std::vector<int> dbscan(const PointCloud& points, double eps, std::size_t min_samples);
}

// Index of the point of a sorted curve farthest from the chord joining its
// endpoints (first index on ties).
std::size_t elbow_index(std::span<const double> sorted_curve);

// Elbow of the sorted k-th-nearest-neighbour distance curve.
double elbow_eps(const PointCloud& cloud, std::size_t k);

struct MapperNode {
  std::size_t id = 0;
  std::size_t interval = 0;
  std::vector<std::size_t> members;  // ascending point indices
  std::map<Label, std::size_t> label_counts;
  double mean_filter = 0.0;
};

struct MapperEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t weight = 0;  // shared members
};

struct MapperParams {
  std::string filter = "l2";
  std::size_t num_intervals = 40;
  double overlap = 0.25;
  std::optional<double> eps;  // unset: elbow_eps(cloud, min_samples)
  std::size_t min_samples = 5;

  void validate() const;
};

struct MapperGraph {
  std::vector<MapperNode> nodes;  // sorted by (interval, smallest member)
  std::vector<MapperEdge> edges;  // sorted by (a, b)
  std::size_t num_points = 0;
  std::size_t noise_count = 0;    // points in no node
  // Echo of the parameters the graph was built with.
  std::string filter = "l2";
  std::size_t num_intervals = 0;
  double overlap = 0.0;
  double eps = 0.0;
  bool eps_auto = false;
  std::size_t min_samples = 0;
};

MapperGraph mapper_graph(const PointCloud& cloud, std::span<const double> filter_values, const Cover1D& cover,
                         double eps, std::size_t min_samples);

// Filter, uniform cover over the filter range, and eps from the elbow when
// not given.
MapperGraph build_mapper(const PointCloud& cloud, const MapperParams& params);

std::size_t connected_components(const MapperGraph& graph);
// |E| - |V| + #components.
long long cycle_rank(const MapperGraph& graph);

PointCloud subset(const PointCloud& cloud, std::span<const std::size_t> indices);

}  // namespace actopo
