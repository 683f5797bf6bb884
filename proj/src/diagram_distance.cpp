#include "actopo/diagram_distance.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <set>

#include "actopo/error.hpp"

namespace actopo {

namespace {

struct Point2 {
  double birth;
  double death;
};

std::vector<Point2> finite_points(const PersistenceDiagram& d, const SWConfig& cfg) {
  std::vector<Point2> out;
  out.reserve(d.size());
  for (const auto& f : d.features) {
    if (!f.essential()) {
      out.push_back({f.birth, f.death});
    } else if (cfg.essential_policy == EssentialPolicy::cap_at_threshold) {
      out.push_back({f.birth, cfg.essential_cap});
    }
  }
  return out;
}

double sliced_wasserstein_points(const std::vector<Point2>& a, const std::vector<Point2>& b, std::size_t slices) {
  if (a.empty() && b.empty()) return 0.0;
  const std::size_t count = a.size() + b.size();
  std::vector<double> pa(count), pb(count);
  double total = 0.0;
  for (std::size_t m = 0; m < slices; ++m) {
    const double theta = -std::numbers::pi / 2 + (double(m) + 0.5) * std::numbers::pi / double(slices);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    // A = a plus the diagonal projection of b; B = b plus the projection of a.
    std::size_t k = 0;
    for (const auto& p : a) pa[k++] = p.birth * c + p.death * s;
    for (const auto& p : b) pa[k++] = 0.5 * (p.birth + p.death) * (c + s);
    k = 0;
    for (const auto& p : b) pb[k++] = p.birth * c + p.death * s;
    for (const auto& p : a) pb[k++] = 0.5 * (p.birth + p.death) * (c + s);
    std::sort(pa.begin(), pa.end());
    std::sort(pb.begin(), pb.end());
    double w1 = 0.0;
    for (std::size_t i = 0; i < count; ++i) w1 += std::abs(pa[i] - pb[i]);
    total += w1;
  }
  return total / double(slices);
}

std::size_t pair_count(std::size_t n) { return n * (n - 1) / 2; }

// Maps a linear index over the strict upper triangle back to (i, j).
std::pair<std::size_t, std::size_t> pair_at(std::size_t n, std::size_t k) {
  std::size_t i = 0;
  std::size_t row = n - 1;
  while (k >= row) {
    k -= row;
    ++i;
    --row;
  }
  return {i, i + 1 + k};
}

}  // namespace

void SWConfig::validate() const {
  if (num_slices < 1) throw ArgumentError("number of slices must be at least 1");
  if (essential_policy == EssentialPolicy::cap_at_threshold && !(essential_cap > 0.0 && std::isfinite(essential_cap))) {
    throw ArgumentError("cap-at-threshold needs a positive finite cap");
  }
  if (hom_dim && *hom_dim != 0 && *hom_dim != 1) throw ArgumentError("homological dimension must be 0 or 1");
}

PersistenceDiagram diagonal_projection(const PersistenceDiagram& diagram) {
  PersistenceDiagram out;
  for (const auto& f : diagram.features) {
    if (f.essential()) throw ArgumentError("diagonal projection is defined for finite features only");
    const double mid = 0.5 * (f.birth + f.death);
    out.features.push_back({f.dim, mid, mid});
  }
  return out;
}

double sliced_wasserstein(const PersistenceDiagram& a, const PersistenceDiagram& b, const SWConfig& cfg) {
  cfg.validate();
  std::set<int> dims;
  if (cfg.hom_dim) {
    dims.insert(*cfg.hom_dim);
  } else {
    for (const auto& f : a.features) dims.insert(f.dim);
    for (const auto& f : b.features) dims.insert(f.dim);
  }
  double total = 0.0;
  for (int dim : dims) {
    total += sliced_wasserstein_points(finite_points(a.restricted_to(dim), cfg), finite_points(b.restricted_to(dim), cfg),
                                       cfg.num_slices);
  }
  return total;
}

LayerDistanceMatrix layer_distance_matrix(std::span<const PersistenceDiagram> diagrams, const SWConfig& cfg) {
  cfg.validate();
  const std::size_t n = diagrams.size();
  LayerDistanceMatrix m(n);
  if (n < 2) return m;
  const std::size_t pairs = pair_count(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(pairs); ++k) {
    const auto [i, j] = pair_at(n, static_cast<std::size_t>(k));
    const double d = sliced_wasserstein(diagrams[i], diagrams[j], cfg);
    m(i, j) = d;
    m(j, i) = d;
  }
  return m;
}

namespace serial {

LayerDistanceMatrix layer_distance_matrix(std::span<const PersistenceDiagram> diagrams, const SWConfig& cfg) {
  cfg.validate();
  const std::size_t n = diagrams.size();
  LayerDistanceMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = sliced_wasserstein(diagrams[i], diagrams[j], cfg);
      m(i, j) = d;
      m(j, i) = d;
    }
  }
  return m;
}

}  // namespace serial

SquareMatrix batch_cv(std::span<const SquareMatrix> matrices) {
  if (matrices.size() < 2) throw ArgumentError("coefficient of variation needs at least two matrices");
  const std::size_t n = matrices.front().n;
  for (const auto& m : matrices) {
    if (m.n != n || m.values.size() != n * n) throw ArgumentError("matrices differ in size");
  }
  SquareMatrix cv(n);
  const double k = double(matrices.size());
  for (std::size_t e = 0; e < n * n; ++e) {
    double mean = 0.0;
    for (const auto& m : matrices) mean += m.values[e];
    mean /= k;
    double var = 0.0;
    for (const auto& m : matrices) var += (m.values[e] - mean) * (m.values[e] - mean);
    var /= k;
    cv.values[e] = mean == 0.0 ? 0.0 : std::sqrt(var) / mean;
  }
  return cv;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("pearson needs two equal-length samples of size >= 2");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(x.size());
  my /= double(y.size());
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

SpecificityResult specificity_correlation(std::span<const PersistenceDiagram> model_a,
                                          std::span<const PersistenceDiagram> model_b, const SWConfig& cfg) {
  if (model_a.size() != model_b.size()) throw ArgumentError("models must have the same number of layers");
  const std::size_t L = model_a.size();
  if (L < 3) throw ArgumentError("specificity needs at least three layers");

  SpecificityResult result;
  result.internal = layer_distance_matrix(model_a, cfg);
  result.cross = SquareMatrix(L);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(L * L); ++k) {
    const auto i = static_cast<std::size_t>(k) / L, j = static_cast<std::size_t>(k) % L;
    result.cross(i, j) = sliced_wasserstein(model_b[i], model_a[j], cfg);
  }

  double sum = 0.0;
  for (std::size_t layer = 0; layer < L; ++layer) {
    std::vector<double> internal_row, cross_row;
    for (std::size_t j = 0; j < L; ++j) {
      if (j == layer) continue;
      internal_row.push_back(result.internal(layer, j));
      cross_row.push_back(result.cross(layer, j));
    }
    const auto rho = pearson(internal_row, cross_row);
    result.per_layer.push_back(rho);
    if (rho) {
      sum += *rho;
    } else {
      result.undefined_layers.push_back(layer);
    }
  }
  if (result.undefined_layers.empty()) result.mean = sum / double(L);
  return result;
}

PointCloud pca_low_rank(const PointCloud& cloud, std::size_t num_removed, RemovalOrder order) {
  cloud.validate();
  const std::size_t c = cloud.dim;
  if (num_removed > c) {
    throw ArgumentError("cannot remove " + std::to_string(num_removed) + " of " + std::to_string(c) + " components");
  }
  if (num_removed == 0) return cloud;

  const auto N = static_cast<Eigen::Index>(cloud.size());
  const auto C = static_cast<Eigen::Index>(c);
  Eigen::MatrixXd X(N, C);
  for (Eigen::Index i = 0; i < N; ++i) {
    const auto p = cloud.point(static_cast<std::size_t>(i));
    for (Eigen::Index j = 0; j < C; ++j) X(i, j) = p[static_cast<std::size_t>(j)];
  }
  const Eigen::RowVectorXd mean = X.colwise().mean();
  X.rowwise() -= mean;

  Eigen::MatrixXd reconstructed = Eigen::MatrixXd::Zero(N, C);
  if (num_removed < c) {
    const Eigen::MatrixXd cov = (X.transpose() * X) / double(std::max<Eigen::Index>(N - 1, 1));
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    // Eigenvalues ascend, so least-variance components come first.
    const auto keep = static_cast<Eigen::Index>(c - num_removed);
    const Eigen::MatrixXd basis = order == RemovalOrder::least_variance_first
                                      ? eig.eigenvectors().rightCols(keep)
                                      : eig.eigenvectors().leftCols(keep);
    reconstructed = (X * basis) * basis.transpose();
  }
  reconstructed.rowwise() += mean;

  PointCloud out = cloud;
  for (Eigen::Index i = 0; i < N; ++i) {
    auto p = out.point(static_cast<std::size_t>(i));
    for (Eigen::Index j = 0; j < C; ++j) p[static_cast<std::size_t>(j)] = static_cast<float>(reconstructed(i, j));
  }
  return out;
}

std::vector<SensitivityPoint> sensitivity_curve(const PointCloud& cloud, const SWConfig& cfg,
                                                std::optional<double> baseline, const PersistenceOptions& ph,
                                                RemovalOrder order) {
  cfg.validate();
  const auto original = vr_persistence(cloud, ph);
  std::vector<SensitivityPoint> curve;
  for (std::size_t r = 0; r <= cloud.dim; ++r) {
    const auto reduced = vr_persistence(pca_low_rank(cloud, r, order), ph);
    SensitivityPoint point{r, sliced_wasserstein(original, reduced, cfg), false};
    point.detectable = baseline.has_value() && point.distance > *baseline;
    curve.push_back(point);
  }
  return curve;
}

std::string format_layer_matrix(const SquareMatrix& m, std::span<const std::string> names) {
  if (names.size() != m.n) throw ArgumentError("need one name per matrix row");
  std::string out = "layer";
  for (const auto& name : names) out += ',' + name;
  out += '\n';
  for (std::size_t i = 0; i < m.n; ++i) {
    out += names[i];
    for (std::size_t j = 0; j < m.n; ++j) out += ',' + format_number(m(i, j));
    out += '\n';
  }
  return out;
}

std::string format_sensitivity_csv(std::span<const SensitivityPoint> curve) {
  std::string out = "r,sw,detectable\n";
  for (const auto& p : curve) {
    out += std::to_string(p.num_removed) + ',' + format_number(p.distance) + ',' + (p.detectable ? "1" : "0") + '\n';
  }
  return out;
}

}  // namespace actopo
