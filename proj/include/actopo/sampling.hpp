#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "actopo/tensor_io.hpp"

namespace actopo {

// One convolution (or pooling) stage as seen by receptive-field geometry.
struct ConvGeometry {
  std::uint32_t kernel = 1;
  std::uint32_t stride = 1;
  std::uint32_t padding = 0;
};

struct LayerChain {
  std::vector<ConvGeometry> layers;
  std::uint32_t input_height = 0;
  std::uint32_t input_width = 0;

  void validate() const;
  // Spatial size of the last layer's output grid.
  std::uint32_t output_height() const;
  std::uint32_t output_width() const;
};

// Unclipped receptive-field geometry of the chain's last layer: field side
// length, jump between adjacent output positions, and input coordinate of the
// centre of output position 0.
struct FieldGeometry {
  std::int64_t size = 1;
  std::int64_t jump = 1;
  std::int64_t start = 0;
};

// Closed pixel rectangle [row_begin, row_end] x [col_begin, col_end].
struct PixelRect {
  std::int64_t row_begin = 0;
  std::int64_t row_end = 0;
  std::int64_t col_begin = 0;
  std::int64_t col_end = 0;

  std::int64_t area() const { return (row_end - row_begin + 1) * (col_end - col_begin + 1); }
  bool operator==(const PixelRect&) const = default;
};

// H x W binary image; nonzero is foreground.
struct Mask {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<std::uint8_t> pixels;

  bool foreground(std::uint32_t row, std::uint32_t col) const { return pixels[std::size_t{row} * width + col] != 0; }
};

enum class MaskMode { foreground, background };

struct SpatialWeightMap {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<std::uint32_t> weights;  // row-major pixel counts

  std::uint32_t at(std::uint32_t row, std::uint32_t col) const { return weights[std::size_t{row} * width + col]; }
  bool operator==(const SpatialWeightMap&) const = default;
};

std::vector<float> spatial_slice(const ActivationTensor& tensor, std::uint32_t row, std::uint32_t col);

// All samplers take one tensor per image with matching labels; the image id of
// a point is the index of its tensor. Every output point records its grid
// position in PointCloud::positions.
PointCloud sample_random(std::span<const ActivationTensor> tensors, std::span<const Label> labels, std::uint64_t seed);
PointCloud sample_full(std::span<const ActivationTensor> tensors, std::span<const Label> labels);
PointCloud sample_top_l2(std::span<const ActivationTensor> tensors, std::span<const Label> labels);
PointCloud sample_top_weighted(std::span<const ActivationTensor> tensors, std::span<const Label> labels,
                               std::span<const SpatialWeightMap> weight_maps, std::size_t p);

// Grid position drawn by sample_random for one image.
GridPos random_position(std::uint64_t seed, std::size_t image_id, std::uint32_t height, std::uint32_t width);

FieldGeometry field_geometry(const LayerChain& chain);
PixelRect receptive_field(const LayerChain& chain, std::uint32_t row, std::uint32_t col);
SpatialWeightMap weight_positions(const LayerChain& chain, const Mask& mask, MaskMode mode);

// Resamples N points with replacement; deterministic in seed.
PointCloud bootstrap_resample(const PointCloud& cloud, std::uint64_t seed);

// PGM (P5, maxval 255) or a 0/1 CSV grid, chosen by file content.
Mask load_mask(const std::filesystem::path& path);
Mask parse_mask(const std::string& bytes);

// "k,s,p;k,s,p;..." as accepted on the command line.
std::vector<ConvGeometry> parse_chain_spec(const std::string& spec);

}  // namespace actopo
