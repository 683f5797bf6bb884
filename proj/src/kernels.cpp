#include "actopo/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "actopo/error.hpp"

namespace actopo {

namespace {

double kth_smallest_excluding(const PointCloud& cloud, std::size_t i, std::size_t k, std::vector<double>& scratch) {
  scratch.clear();
  for (std::size_t j = 0; j < cloud.size(); ++j) {
    if (j != i) scratch.push_back(euclidean(cloud.point(i), cloud.point(j)));
  }
  std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k - 1), scratch.end());
  return scratch[k - 1];
}

std::vector<std::size_t> ball(const PointCloud& cloud, std::size_t i, double eps) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < cloud.size(); ++j) {
    if (euclidean(cloud.point(i), cloud.point(j)) <= eps) out.push_back(j);
  }
  return out;
}

void check_k(const PointCloud& cloud, std::size_t k) {
  if (k == 0 || cloud.size() <= k) {
    throw ArgumentError("k-th neighbour needs 1 <= k < N (k=" + std::to_string(k) + ", N=" +
                        std::to_string(cloud.size()) + ")");
  }
}

}  // namespace

void DistanceMatrix::validate() const {
  for (std::size_t i = 0; i < n_; ++i) {
    if ((*this)(i, i) != 0.0) throw ValidationError("distance matrix diagonal must be zero");
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double a = (*this)(i, j);
      if (!std::isfinite(a) || a < 0.0) throw ValidationError("distances must be finite and non-negative");
      if (a != (*this)(j, i)) throw ValidationError("distance matrix is not symmetric");
    }
  }
}

DistanceMatrix DistanceMatrix::scaled(double factor) const {
  DistanceMatrix out = *this;
  for (auto& v : out.d_) v *= factor;
  return out;
}

double euclidean(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = double(a[k]) - double(b[k]);
    s += diff * diff;
  }
  return std::sqrt(s);
}

DistanceMatrix pairwise_distances(const PointCloud& cloud) {
  const std::size_t n = cloud.size();
  DistanceMatrix dm(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    for (std::size_t j = static_cast<std::size_t>(i) + 1; j < n; ++j) {
      dm.set(static_cast<std::size_t>(i), j, euclidean(cloud.point(static_cast<std::size_t>(i)), cloud.point(j)));
    }
  }
  return dm;
}

std::vector<double> kth_neighbor_distances(const PointCloud& cloud, std::size_t k) {
  check_k(cloud, k);
  std::vector<double> out(cloud.size());
#pragma omp parallel
  {
    std::vector<double> scratch;
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(cloud.size()); ++i) {
      out[static_cast<std::size_t>(i)] = kth_smallest_excluding(cloud, static_cast<std::size_t>(i), k, scratch);
    }
  }
  return out;
}

std::vector<std::vector<std::size_t>> eps_neighborhoods(const PointCloud& cloud, double eps) {
  std::vector<std::vector<std::size_t>> out(cloud.size());
#pragma omp parallel for schedule(dynamic, 32)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(cloud.size()); ++i) {
    out[static_cast<std::size_t>(i)] = ball(cloud, static_cast<std::size_t>(i), eps);
  }
  return out;
}

namespace serial {

DistanceMatrix pairwise_distances(const PointCloud& cloud) {
  const std::size_t n = cloud.size();
  DistanceMatrix dm(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) dm.set(i, j, euclidean(cloud.point(i), cloud.point(j)));
  }
  return dm;
}

std::vector<double> kth_neighbor_distances(const PointCloud& cloud, std::size_t k) {
  check_k(cloud, k);
  std::vector<double> out(cloud.size());
  std::vector<double> scratch;
  for (std::size_t i = 0; i < cloud.size(); ++i) out[i] = kth_smallest_excluding(cloud, i, k, scratch);
  return out;
}

std::vector<std::vector<std::size_t>> eps_neighborhoods(const PointCloud& cloud, double eps) {
  std::vector<std::vector<std::size_t>> out(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) out[i] = ball(cloud, i, eps);
  return out;
}

}  // namespace serial

}  // namespace actopo
