#pragma once

// Data-parallel inner loops. Every kernel has an OpenMP version (namespace
// actopo) and a serial reference (namespace actopo::serial) computing each
// output element with identical arithmetic, so the two agree bit for bit.

#include <cstddef>
#include <span>
#include <vector>

#include "actopo/tensor_io.hpp"

namespace actopo {

// Dense symmetric N x N matrix of Euclidean distances.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double v) {
    d_[i * n_ + j] = v;
    d_[j * n_ + i] = v;
  }
  std::span<const double> row(std::size_t i) const { return {d_.data() + i * n_, n_}; }

  // Zero diagonal, symmetric, finite, non-negative; throws ValidationError.
  void validate() const;
  DistanceMatrix scaled(double factor) const;

  bool operator==(const DistanceMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

double euclidean(std::span<const float> a, std::span<const float> b);

DistanceMatrix pairwise_distances(const PointCloud& cloud);

// Distance from each point to its k-th nearest other point.
std::vector<double> kth_neighbor_distances(const PointCloud& cloud, std::size_t k);

// Indices j (ascending, including i itself) with euclidean(i, j) <= eps.
std::vector<std::vector<std::size_t>> eps_neighborhoods(const PointCloud& cloud, double eps);

namespace serial {
DistanceMatrix pairwise_distances(const PointCloud& cloud);
std::vector<double> kth_neighbor_distances(const PointCloud& cloud, std::size_t k);
std::vector<std::vector<std::size_t>> eps_neighborhoods(const PointCloud& cloud, double eps);
}  // namespace serial

}  // namespace actopo
