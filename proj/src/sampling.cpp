#include "actopo/sampling.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "actopo/error.hpp"

namespace actopo {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

void check_batch(std::span<const ActivationTensor> tensors, std::span<const Label> labels) {
  if (tensors.empty()) throw ArgumentError("no activation tensors supplied");
  if (labels.size() != tensors.size()) {
    throw ArgumentError("got " + std::to_string(labels.size()) + " labels for " + std::to_string(tensors.size()) +
                        " tensors");
  }
  const auto& first = tensors.front();
  for (std::size_t i = 1; i < tensors.size(); ++i) {
    const auto& t = tensors[i];
    if (t.channels != first.channels || t.height != first.height || t.width != first.width) {
      throw ValidationError("tensor " + std::to_string(i) + " has a different shape than tensor 0");
    }
  }
}

PointCloud empty_cloud_like(const ActivationTensor& t, std::size_t reserve_points) {
  PointCloud cloud;
  cloud.dim = t.channels;
  cloud.coords.reserve(reserve_points * t.channels);
  cloud.labels.reserve(reserve_points);
  cloud.image_ids.reserve(reserve_points);
  cloud.positions.reserve(reserve_points);
  return cloud;
}

void append_slice(PointCloud& cloud, const ActivationTensor& t, GridPos pos, Label label, std::size_t image_id) {
  const std::size_t plane = t.grid_size();
  const std::size_t offset = std::size_t{pos.row} * t.width + pos.col;
  for (std::uint32_t ch = 0; ch < t.channels; ++ch) cloud.coords.push_back(t.values[ch * plane + offset]);
  cloud.labels.push_back(label);
  cloud.image_ids.push_back(image_id);
  cloud.positions.push_back(pos);
}

GridPos pos_of(std::size_t index, std::uint32_t width) {
  return {static_cast<std::uint32_t>(index / width), static_cast<std::uint32_t>(index % width)};
}

std::uint32_t conv_output(std::uint32_t in, const ConvGeometry& g) {
  const std::int64_t padded = std::int64_t{in} + 2 * std::int64_t{g.padding};
  if (padded < g.kernel) throw ArgumentError("kernel larger than padded input in layer chain");
  return static_cast<std::uint32_t>((padded - g.kernel) / g.stride + 1);
}

}  // namespace

void LayerChain::validate() const {
  if (layers.empty()) throw ArgumentError("layer chain is empty");
  if (input_height == 0 || input_width == 0) throw ArgumentError("layer chain input size must be positive");
  for (const auto& g : layers) {
    if (g.kernel == 0) throw ArgumentError("kernel size must be positive");
    if (g.stride == 0) throw ArgumentError("stride must be at least 1");
  }
}

std::uint32_t LayerChain::output_height() const {
  validate();
  std::uint32_t h = input_height;
  for (const auto& g : layers) h = conv_output(h, g);
  return h;
}

std::uint32_t LayerChain::output_width() const {
  validate();
  std::uint32_t w = input_width;
  for (const auto& g : layers) w = conv_output(w, g);
  return w;
}

std::vector<float> spatial_slice(const ActivationTensor& tensor, std::uint32_t row, std::uint32_t col) {
  if (row >= tensor.height || col >= tensor.width) {
    throw BoundsError("spatial position (" + std::to_string(row) + "," + std::to_string(col) + ") outside " +
                      std::to_string(tensor.height) + "x" + std::to_string(tensor.width) + " grid");
  }
  std::vector<float> out(tensor.channels);
  for (std::uint32_t ch = 0; ch < tensor.channels; ++ch) out[ch] = tensor.at(ch, row, col);
  return out;
}

GridPos random_position(std::uint64_t seed, std::size_t image_id, std::uint32_t height, std::uint32_t width) {
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(image_id)));
  std::uniform_int_distribution<std::uint64_t> pick(0, std::uint64_t{height} * width - 1);
  return pos_of(pick(rng), width);
}

PointCloud sample_random(std::span<const ActivationTensor> tensors, std::span<const Label> labels, std::uint64_t seed) {
  check_batch(tensors, labels);
  auto cloud = empty_cloud_like(tensors.front(), tensors.size());
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const auto& t = tensors[i];
    append_slice(cloud, t, random_position(seed, i, t.height, t.width), labels[i], i);
  }
  return cloud;
}

PointCloud sample_full(std::span<const ActivationTensor> tensors, std::span<const Label> labels) {
  check_batch(tensors, labels);
  const std::size_t grid = tensors.front().grid_size();
  auto cloud = empty_cloud_like(tensors.front(), tensors.size() * grid);
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    for (std::size_t k = 0; k < grid; ++k) append_slice(cloud, tensors[i], pos_of(k, tensors[i].width), labels[i], i);
  }
  return cloud;
}

PointCloud sample_top_l2(std::span<const ActivationTensor> tensors, std::span<const Label> labels) {
  check_batch(tensors, labels);
  auto cloud = empty_cloud_like(tensors.front(), tensors.size());
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const auto& t = tensors[i];
    const std::size_t grid = t.grid_size();
    std::vector<double> norm2(grid, 0.0);
    for (std::uint32_t ch = 0; ch < t.channels; ++ch) {
      const float* plane = t.values.data() + ch * grid;
      for (std::size_t k = 0; k < grid; ++k) norm2[k] += double(plane[k]) * double(plane[k]);
    }
    // max_element returns the first maximum, i.e. the smallest row-major index.
    const auto best = static_cast<std::size_t>(std::max_element(norm2.begin(), norm2.end()) - norm2.begin());
    append_slice(cloud, t, pos_of(best, t.width), labels[i], i);
  }
  return cloud;
}

PointCloud sample_top_weighted(std::span<const ActivationTensor> tensors, std::span<const Label> labels,
                               std::span<const SpatialWeightMap> weight_maps, std::size_t p) {
  check_batch(tensors, labels);
  if (weight_maps.size() != tensors.size()) throw ArgumentError("need exactly one weight map per image");
  const auto& shape = tensors.front();
  const std::size_t grid = shape.grid_size();
  if (p == 0 || p > grid) {
    throw ArgumentError("top-p count " + std::to_string(p) + " outside [1, " + std::to_string(grid) + "]");
  }
  auto cloud = empty_cloud_like(shape, tensors.size() * p);
  std::vector<std::size_t> order(grid);
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const auto& w = weight_maps[i];
    if (w.height != shape.height || w.width != shape.width || w.weights.size() != grid) {
      throw ArgumentError("weight map " + std::to_string(i) + " does not match the activation grid");
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return w.weights[a] > w.weights[b]; });
    for (std::size_t r = 0; r < p; ++r) append_slice(cloud, tensors[i], pos_of(order[r], shape.width), labels[i], i);
  }
  return cloud;
}

FieldGeometry field_geometry(const LayerChain& chain) {
  chain.validate();
  FieldGeometry g;
  for (const auto& layer : chain.layers) {
    g.size += (std::int64_t{layer.kernel} - 1) * g.jump;
    g.start += (std::int64_t{layer.kernel / 2} - std::int64_t{layer.padding}) * g.jump;
    g.jump *= layer.stride;
  }
  return g;
}

PixelRect receptive_field(const LayerChain& chain, std::uint32_t row, std::uint32_t col) {
  const auto out_h = chain.output_height();
  const auto out_w = chain.output_width();
  if (row >= out_h || col >= out_w) {
    throw BoundsError("position (" + std::to_string(row) + "," + std::to_string(col) + ") outside the " +
                      std::to_string(out_h) + "x" + std::to_string(out_w) + " output grid");
  }
  const auto g = field_geometry(chain);
  const auto clip = [](std::int64_t v, std::int64_t hi) { return std::clamp<std::int64_t>(v, 0, hi - 1); };
  const std::int64_t r0 = g.start + std::int64_t{row} * g.jump - g.size / 2;
  const std::int64_t c0 = g.start + std::int64_t{col} * g.jump - g.size / 2;
  return {clip(r0, chain.input_height), clip(r0 + g.size - 1, chain.input_height), clip(c0, chain.input_width),
          clip(c0 + g.size - 1, chain.input_width)};
}

SpatialWeightMap weight_positions(const LayerChain& chain, const Mask& mask, MaskMode mode) {
  chain.validate();
  if (mask.height != chain.input_height || mask.width != chain.input_width) {
    throw ArgumentError("mask is " + std::to_string(mask.height) + "x" + std::to_string(mask.width) +
                        " but the chain expects " + std::to_string(chain.input_height) + "x" +
                        std::to_string(chain.input_width));
  }
  const std::size_t H = mask.height, W = mask.width;
  // Summed-area table of the selected pixel class.
  std::vector<std::uint32_t> sat((H + 1) * (W + 1), 0);
  for (std::size_t r = 0; r < H; ++r) {
    for (std::size_t c = 0; c < W; ++c) {
      const bool fg = mask.pixels[r * W + c] != 0;
      const std::uint32_t hit = (mode == MaskMode::foreground) == fg ? 1u : 0u;
      sat[(r + 1) * (W + 1) + c + 1] = hit + sat[r * (W + 1) + c + 1] + sat[(r + 1) * (W + 1) + c] - sat[r * (W + 1) + c];
    }
  }
  SpatialWeightMap map;
  map.height = chain.output_height();
  map.width = chain.output_width();
  map.weights.resize(std::size_t{map.height} * map.width);
  for (std::uint32_t i = 0; i < map.height; ++i) {
    for (std::uint32_t j = 0; j < map.width; ++j) {
      const auto f = receptive_field(chain, i, j);
      const auto at = [&](std::int64_t r, std::int64_t c) { return sat[std::size_t(r) * (W + 1) + std::size_t(c)]; };
      map.weights[std::size_t{i} * map.width + j] = at(f.row_end + 1, f.col_end + 1) - at(f.row_begin, f.col_end + 1) -
                                                    at(f.row_end + 1, f.col_begin) + at(f.row_begin, f.col_begin);
    }
  }
  return map;
}

PointCloud bootstrap_resample(const PointCloud& cloud, std::uint64_t seed) {
  if (cloud.empty()) throw ArgumentError("cannot resample an empty cloud");
  std::mt19937_64 rng(splitmix64(seed));
  std::uniform_int_distribution<std::size_t> pick(0, cloud.size() - 1);
  PointCloud out;
  out.dim = cloud.dim;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto k = pick(rng);
    out.push_back(cloud.point(k), cloud.labels[k], cloud.image_ids[k]);
    if (!cloud.positions.empty()) out.positions.push_back(cloud.positions[k]);
  }
  return out;
}

std::vector<ConvGeometry> parse_chain_spec(const std::string& spec) {
  std::vector<ConvGeometry> layers;
  std::stringstream all(spec);
  std::string item;
  while (std::getline(all, item, ';')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::stringstream one(item);
    std::string field;
    std::vector<long long> v;
    while (std::getline(one, field, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stoll(field, &used));
      } catch (const std::exception&) {
        throw ParseError("bad layer chain entry '" + item + "'");
      }
    }
    if (v.size() != 3 || v[0] < 1 || v[1] < 1 || v[2] < 0) {
      throw ArgumentError("layer chain entries must be kernel>=1,stride>=1,padding>=0: '" + item + "'");
    }
    layers.push_back({static_cast<std::uint32_t>(v[0]), static_cast<std::uint32_t>(v[1]),
                      static_cast<std::uint32_t>(v[2])});
  }
  if (layers.empty()) throw ArgumentError("layer chain is empty");
  return layers;
}

}  // namespace actopo
