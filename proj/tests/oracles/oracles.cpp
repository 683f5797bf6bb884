#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace actopo::oracle {

namespace {

struct Edge {
  double w;
  std::size_t a, b;
};

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) x = parent[x];
  return x;
}

}  // namespace

std::vector<double> kruskal_mst_weights(const DistanceMatrix& dm) {
  const std::size_t n = dm.size();
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) edges.push_back({dm(i, j), i, j});
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) { return x.w < y.w; });
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<double> out;
  for (const auto& e : edges) {
    const auto ra = find_root(parent, e.a), rb = find_root(parent, e.b);
    if (ra == rb) continue;
    parent[ra] = rb;
    out.push_back(e.w);
  }
  return out;
}

std::vector<double> prim_mst_weights(const DistanceMatrix& dm) {
  const std::size_t n = dm.size();
  std::vector<double> best(n, INFINITY);
  std::vector<bool> in_tree(n, false);
  std::vector<double> out;
  best[0] = 0.0;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t u = n;
    for (std::size_t v = 0; v < n; ++v)
      if (!in_tree[v] && (u == n || best[v] < best[u])) u = v;
    in_tree[u] = true;
    if (step > 0) out.push_back(best[u]);
    for (std::size_t v = 0; v < n; ++v)
      if (!in_tree[v]) best[v] = std::min(best[v], dm(u, v));
  }
  std::sort(out.begin(), out.end());
  return out;
}

PersistenceDiagram naive_rips(const DistanceMatrix& dm, double threshold) {
  struct Simplex {
    double diam;
    int dim;
    std::vector<std::size_t> verts;
  };
  const std::size_t n = dm.size();
  std::vector<Simplex> simplices;
  for (std::size_t i = 0; i < n; ++i) simplices.push_back({0.0, 0, {i}});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (dm(i, j) <= threshold) simplices.push_back({dm(i, j), 1, {i, j}});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const double d = std::max({dm(i, j), dm(i, k), dm(j, k)});
        if (d <= threshold) simplices.push_back({d, 2, {i, j, k}});
      }
  // Any order with faces first is a valid filtration; this one is simple.
  std::sort(simplices.begin(), simplices.end(), [](const Simplex& x, const Simplex& y) {
    return std::tie(x.diam, x.dim, x.verts) < std::tie(y.diam, y.dim, y.verts);
  });
  std::map<std::vector<std::size_t>, std::size_t> index;
  for (std::size_t s = 0; s < simplices.size(); ++s) index[simplices[s].verts] = s;

  // Columns as sorted row-index sets; addition over Z/2 is symmetric difference.
  std::vector<std::vector<std::size_t>> columns(simplices.size());
  for (std::size_t s = 0; s < simplices.size(); ++s) {
    const auto& v = simplices[s].verts;
    if (v.size() < 2) continue;
    for (std::size_t drop = 0; drop < v.size(); ++drop) {
      std::vector<std::size_t> face;
      for (std::size_t t = 0; t < v.size(); ++t)
        if (t != drop) face.push_back(v[t]);
      columns[s].push_back(index.at(face));
    }
    std::sort(columns[s].begin(), columns[s].end());
  }
  std::map<std::size_t, std::size_t> low_owner;  // row -> column whose lowest entry it is
  std::vector<bool> paired(simplices.size(), false);
  PersistenceDiagram out;
  for (std::size_t j = 0; j < simplices.size(); ++j) {
    auto& col = columns[j];
    while (!col.empty()) {
      const auto it = low_owner.find(col.back());
      if (it == low_owner.end()) break;
      std::vector<std::size_t> sum;
      std::set_symmetric_difference(col.begin(), col.end(), columns[it->second].begin(), columns[it->second].end(),
                                    std::back_inserter(sum));
      col = std::move(sum);
    }
    if (col.empty()) continue;
    const std::size_t i = col.back();
    low_owner[i] = j;
    paired[i] = paired[j] = true;
    if (simplices[j].diam > simplices[i].diam) out.features.push_back({simplices[i].dim, simplices[i].diam, simplices[j].diam});
  }
  for (std::size_t s = 0; s < simplices.size(); ++s) {
    if (paired[s] || simplices[s].dim > 1) continue;
    if (!columns[s].empty()) continue;  // negative simplex
    out.features.push_back({simplices[s].dim, simplices[s].diam, kInfinity});
  }
  std::sort(out.features.begin(), out.features.end());
  return out;
}

std::vector<int> naive_dbscan(const PointCloud& cloud, double eps, std::size_t min_samples) {
  const std::size_t n = cloud.size();
  auto dist = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t d = 0; d < cloud.dim; ++d) {
      const double t = static_cast<double>(cloud.point(i)[d]) - static_cast<double>(cloud.point(j)[d]);
      s += t * t;
    }
    return std::sqrt(s);
  };
  std::vector<bool> core(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j) count += dist(i, j) <= eps;
    core[i] = count >= min_samples;
  }
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (core[i] && core[j] && dist(i, j) <= eps) parent[find_root(parent, i)] = find_root(parent, j);
  std::vector<int> label(n, -1);
  std::map<std::size_t, int> cluster_of_root;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    const auto r = find_root(parent, i);
    const auto [it, fresh] = cluster_of_root.try_emplace(r, static_cast<int>(cluster_of_root.size()));
    label[i] = it->second;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (core[j] && dist(i, j) <= eps) {
        label[i] = label[j];
        break;
      }
    }
  }
  return label;
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] < 0) != (b[i] < 0)) return false;
    if (a[i] < 0) continue;
    const auto [x, fx] = ab.try_emplace(a[i], b[i]);
    const auto [y, fy] = ba.try_emplace(b[i], a[i]);
    if (x->second != b[i] || y->second != a[i]) return false;
  }
  return true;
}

double naive_sliced_wasserstein(const PersistenceDiagram& a, const PersistenceDiagram& b, std::size_t slices) {
  std::vector<std::pair<double, double>> pa, pb;
  for (const auto& f : a.features) {
    if (f.essential()) throw std::invalid_argument("finite diagrams only");
    pa.emplace_back(f.birth, f.death);
    pb.emplace_back((f.birth + f.death) / 2, (f.birth + f.death) / 2);
  }
  for (const auto& f : b.features) {
    if (f.essential()) throw std::invalid_argument("finite diagrams only");
    pb.emplace_back(f.birth, f.death);
    pa.emplace_back((f.birth + f.death) / 2, (f.birth + f.death) / 2);
  }
  double total = 0.0;
  for (std::size_t m = 0; m < slices; ++m) {
    const double theta = -std::numbers::pi / 2 + (static_cast<double>(m) + 0.5) * std::numbers::pi / static_cast<double>(slices);
    std::vector<double> xa, xb;
    for (const auto& [x, y] : pa) xa.push_back(x * std::cos(theta) + y * std::sin(theta));
    for (const auto& [x, y] : pb) xb.push_back(x * std::cos(theta) + y * std::sin(theta));
    std::sort(xa.begin(), xa.end());
    std::sort(xb.begin(), xb.end());
    for (std::size_t i = 0; i < xa.size(); ++i) total += std::abs(xa[i] - xb[i]);
  }
  return total / static_cast<double>(slices);
}

double chi_square_p_value(double statistic, std::size_t dof) {
  const double k = static_cast<double>(dof);
  const double z = (std::cbrt(statistic / k) - (1.0 - 2.0 / (9.0 * k))) / std::sqrt(2.0 / (9.0 * k));
  return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

}  // namespace actopo::oracle
