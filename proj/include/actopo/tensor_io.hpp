#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace actopo {

using Label = std::int32_t;

// c x n x m activations of one layer for one image, row-major
// (channel, row, col).
struct ActivationTensor {
  std::uint32_t channels = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<float> values;

  ActivationTensor() = default;
  ActivationTensor(std::uint32_t c, std::uint32_t n, std::uint32_t m, std::vector<float> v);

  std::size_t grid_size() const { return std::size_t{height} * width; }
  float at(std::uint32_t channel, std::uint32_t row, std::uint32_t col) const {
    return values[(std::size_t{channel} * height + row) * width + col];
  }

  bool operator==(const ActivationTensor&) const = default;
};

struct GridPos {
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  bool operator==(const GridPos&) const = default;
};

// N points in R^dim with per-point class label and source image. `positions`
// is the spatial provenance of each point when it came from a sampler and is
// empty for clouds read from CSV.
struct PointCloud {
  std::size_t dim = 0;
  std::vector<float> coords;  // N * dim, row-major
  std::vector<Label> labels;
  std::vector<std::size_t> image_ids;
  std::vector<GridPos> positions;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
  std::span<const float> point(std::size_t i) const { return {coords.data() + i * dim, dim}; }
  std::span<float> point(std::size_t i) { return {coords.data() + i * dim, dim}; }

  void push_back(std::span<const float> p, Label label, std::size_t image_id);

  // Throws ValidationError when the invariants do not hold.
  void validate() const;

  bool operator==(const PointCloud&) const = default;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct PersistenceFeature {
  int dim = 0;
  double birth = 0.0;
  double death = kInfinity;

  bool essential() const { return death == kInfinity; }
  double persistence() const { return death - birth; }
  bool operator==(const PersistenceFeature&) const = default;
  auto operator<=>(const PersistenceFeature&) const = default;
};

struct PersistenceDiagram {
  std::vector<PersistenceFeature> features;

  std::size_t size() const { return features.size(); }
  bool empty() const { return features.empty(); }

  // Features of one homological dimension, in stored order.
  PersistenceDiagram restricted_to(int dim) const;
  // Largest homological dimension present, or -1 for an empty diagram.
  int max_dim() const;
  // Features sorted by (dim, birth, death); diagrams are multisets.
  PersistenceDiagram canonical() const;

  bool operator==(const PersistenceDiagram&) const = default;
};

ActivationTensor load_tensor_file(const std::filesystem::path& path);
void save_tensor_file(const ActivationTensor& tensor, const std::filesystem::path& path);
ActivationTensor decode_tensor(std::span<const std::byte> bytes);
std::vector<std::byte> encode_tensor(const ActivationTensor& tensor);

PointCloud load_point_cloud_csv(const std::filesystem::path& path, bool has_labels);
PointCloud parse_point_cloud_csv(const std::string& text, bool has_labels);
void save_point_cloud_csv(const PointCloud& cloud, const std::filesystem::path& path, bool with_labels = true);
std::string format_point_cloud_csv(const PointCloud& cloud, bool with_labels = true);

// Sidecar `image_id,row,col` file for sampled clouds.
void save_provenance_csv(const PointCloud& cloud, const std::filesystem::path& path);

void save_diagram(const PersistenceDiagram& diagram, const std::filesystem::path& path);
PersistenceDiagram load_diagram(const std::filesystem::path& path);
std::string format_diagram(const PersistenceDiagram& diagram);
PersistenceDiagram parse_diagram(const std::string& text);

// One integer label per line; blank lines ignored.
std::vector<Label> load_labels(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Shortest round-trip decimal text for a value.
std::string format_number(double value);
std::string format_number(float value);

}  // namespace actopo
