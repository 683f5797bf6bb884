#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "actopo/persistence.hpp"
#include "actopo/tensor_io.hpp"

namespace actopo {

enum class EssentialPolicy { drop, cap_at_threshold };

struct SWConfig {
  std::size_t num_slices = 50;
  EssentialPolicy essential_policy = EssentialPolicy::drop;
  double essential_cap = 0.0;        // death assigned to essential classes under cap_at_threshold
  std::optional<int> hom_dim;        // unset: every dimension compared separately, then summed

  void validate() const;
};

// Square matrix of doubles stored row-major.
struct SquareMatrix {
  std::size_t n = 0;
  std::vector<double> values;

  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t size) : n(size), values(size * size, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return values[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }
  bool operator==(const SquareMatrix&) const = default;
};

using LayerDistanceMatrix = SquareMatrix;

// Nearest diagonal point ((b+d)/2, (b+d)/2) of every finite feature.
PersistenceDiagram diagonal_projection(const PersistenceDiagram& diagram);

double sliced_wasserstein(const PersistenceDiagram& a, const PersistenceDiagram& b, const SWConfig& cfg = {});

LayerDistanceMatrix layer_distance_matrix(std::span<const PersistenceDiagram> diagrams, const SWConfig& cfg = {});

// Entrywise population std / mean across batches; entries with zero mean are 0.
SquareMatrix batch_cv(std::span<const SquareMatrix> matrices);

struct SpecificityResult {
  std::vector<std::optional<double>> per_layer;  // unset where a row has zero variance
  std::optional<double> mean;                    // unset if any layer is undefined
  std::vector<std::size_t> undefined_layers;
  LayerDistanceMatrix internal;
  LayerDistanceMatrix cross;                     // cross(i, j) = SW(B_i, A_j)
};

// Pearson correlation, per layer l, between SW(A_l, A_j) and SW(B_l, A_j)
// over j != l: does layer l of B sit among A's layers where A_l does?
SpecificityResult specificity_correlation(std::span<const PersistenceDiagram> model_a,
                                          std::span<const PersistenceDiagram> model_b, const SWConfig& cfg = {});

// Unset when either sample has zero variance.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

enum class RemovalOrder { least_variance_first, greatest_variance_first };

// Removes `num_removed` principal components and maps back to the original
// coordinates. Labels and provenance are kept.
PointCloud pca_low_rank(const PointCloud& cloud, std::size_t num_removed,
                        RemovalOrder order = RemovalOrder::least_variance_first);

struct SensitivityPoint {
  std::size_t num_removed = 0;
  double distance = 0.0;
  bool detectable = false;
};

std::vector<SensitivityPoint> sensitivity_curve(const PointCloud& cloud, const SWConfig& cfg,
                                                std::optional<double> baseline,
                                                const PersistenceOptions& ph = {},
                                                RemovalOrder order = RemovalOrder::least_variance_first);

// CSV with a layer-name header row and column.
std::string format_layer_matrix(const SquareMatrix& m, std::span<const std::string> names);
std::string format_sensitivity_csv(std::span<const SensitivityPoint> curve);

namespace serial {
LayerDistanceMatrix layer_distance_matrix(std::span<const PersistenceDiagram> diagrams, const SWConfig& cfg = {});
}

}  // namespace actopo
