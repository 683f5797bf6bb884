#include "actopo/persistence.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "actopo/error.hpp"

namespace actopo {

namespace {

struct Edge {
  double diam;
  std::uint32_t a;  // a < b
  std::uint32_t b;
};

bool edge_before(const Edge& x, const Edge& y) {
  if (x.diam != y.diam) return x.diam < y.diam;
  if (x.a != y.a) return x.a < y.a;
  return x.b < y.b;
}

// A triangle is identified by the lexicographic rank a*n^2 + b*n + c of its
// sorted vertex tuple, so (diam, key) is the simplexwise filtration order.
struct Triangle {
  double diam;
  std::uint64_t key;
};

struct LaterTriangle {
  bool operator()(const Triangle& x, const Triangle& y) const {
    if (x.diam != y.diam) return x.diam > y.diam;
    return x.key > y.key;
  }
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0u); }

  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::uint32_t x, std::uint32_t y) {
    x = find(x);
    y = find(y);
    if (x == y) return false;
    if (rank_[x] < rank_[y]) std::swap(x, y);
    parent_[y] = x;
    if (rank_[x] == rank_[y]) ++rank_[x];
    return true;
  }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint8_t> rank_;
};

using TriangleHeap = std::priority_queue<Triangle, std::vector<Triangle>, LaterTriangle>;

class CofaceEnumerator {
 public:
  CofaceEnumerator(const DistanceMatrix& dm, double threshold) : dm_(dm), n_(dm.size()), threshold_(threshold) {}

  template <typename Visit>
  void for_each(const Edge& e, Visit&& visit) const {
    const auto ra = dm_.row(e.a);
    const auto rb = dm_.row(e.b);
    for (std::uint32_t k = 0; k < n_; ++k) {
      if (k == e.a || k == e.b) continue;
      const double da = ra[k];
      const double db = rb[k];
      if (da > threshold_ || db > threshold_) continue;
      visit(Triangle{std::max({e.diam, da, db}), key(e.a, e.b, k)});
    }
  }

  // Cofaces are visited in increasing key order, so the first one reaching
  // the minimal diameter is the column pivot.
  std::optional<Triangle> smallest(const Edge& e) const {
    std::optional<Triangle> best;
    for_each(e, [&](const Triangle& t) {
      if (!best || t.diam < best->diam) best = t;
    });
    return best;
  }

  void push_all(const Edge& e, TriangleHeap& heap) const {
    for_each(e, [&](const Triangle& t) { heap.push(t); });
  }

 private:
  std::uint64_t key(std::uint32_t a, std::uint32_t b, std::uint32_t k) const {
    std::uint64_t v[3] = {a, b, k};
    if (k < a) {
      v[0] = k, v[1] = a, v[2] = b;
    } else if (k < b) {
      v[1] = k, v[2] = b;
    }
    return (v[0] * n_ + v[1]) * n_ + v[2];
  }

  const DistanceMatrix& dm_;
  std::uint64_t n_;
  double threshold_;
};

// Pivot of the Z/2 column held in the heap, discarding cancelling pairs.
std::optional<Triangle> pivot_of(TriangleHeap& heap) {
  while (!heap.empty()) {
    const Triangle top = heap.top();
    heap.pop();
    std::size_t copies = 1;
    while (!heap.empty() && heap.top().key == top.key) {
      heap.pop();
      ++copies;
    }
    if (copies % 2 == 1) {
      heap.push(top);
      return top;
    }
  }
  return std::nullopt;
}

void reduce_mod2(std::vector<std::uint32_t>& v) {
  std::sort(v.begin(), v.end());
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    if ((j - i) % 2 == 1) out.push_back(v[i]);
    i = j;
  }
  v = std::move(out);
}

void compute_h1(const DistanceMatrix& dm, double threshold, const std::vector<Edge>& edges,
                const std::vector<bool>& kills_component, PersistenceDiagram& out) {
  const CofaceEnumerator cofaces(dm, threshold);
  std::unordered_map<std::uint64_t, std::uint32_t> pivot_owner;  // triangle key -> stored column
  std::vector<std::vector<std::uint32_t>> stored;               // edge combination of each reduced column
  pivot_owner.reserve(edges.size());

  for (std::size_t pos = edges.size(); pos-- > 0;) {
    if (kills_component[pos]) continue;
    const Edge& e = edges[pos];
    const auto first = cofaces.smallest(e);
    if (!first) {
      out.features.push_back({1, e.diam, kInfinity});
      continue;
    }
    if (!pivot_owner.contains(first->key)) {
      pivot_owner.emplace(first->key, static_cast<std::uint32_t>(stored.size()));
      stored.push_back({static_cast<std::uint32_t>(pos)});
      if (first->diam > e.diam) out.features.push_back({1, e.diam, first->diam});
      continue;
    }

    TriangleHeap working;
    cofaces.push_all(e, working);
    std::vector<std::uint32_t> combination{static_cast<std::uint32_t>(pos)};
    while (true) {
      const auto pivot = pivot_of(working);
      if (!pivot) {
        out.features.push_back({1, e.diam, kInfinity});
        break;
      }
      const auto owner = pivot_owner.find(pivot->key);
      if (owner == pivot_owner.end()) {
        reduce_mod2(combination);
        pivot_owner.emplace(pivot->key, static_cast<std::uint32_t>(stored.size()));
        stored.push_back(std::move(combination));
        if (pivot->diam > e.diam) out.features.push_back({1, e.diam, pivot->diam});
        break;
      }
      for (const auto other : stored[owner->second]) {
        cofaces.push_all(edges[other], working);
        combination.push_back(other);
      }
    }
  }
}

}  // namespace

double enclosing_radius(const DistanceMatrix& dm) {
  if (dm.size() == 0) throw ArgumentError("empty distance matrix");
  double best = kInfinity;
  for (std::size_t i = 0; i < dm.size(); ++i) {
    const auto row = dm.row(i);
    best = std::min(best, *std::max_element(row.begin(), row.end()));
  }
  return best;
}

PersistenceDiagram vr_persistence(const DistanceMatrix& dm, const PersistenceOptions& options) {
  if (dm.size() == 0) throw ArgumentError("persistence needs at least one point");
  if (options.max_dim != 0 && options.max_dim != 1) throw ArgumentError("max homological dimension must be 0 or 1");
  if (options.threshold && (std::isnan(*options.threshold) || *options.threshold < 0)) {
    throw ArgumentError("threshold must be >= 0");
  }
  dm.validate();
  const double threshold = options.threshold.value_or(enclosing_radius(dm));
  const auto n = static_cast<std::uint32_t>(dm.size());

  std::vector<Edge> edges;
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = a + 1; b < n; ++b) {
      if (dm(a, b) <= threshold) edges.push_back({dm(a, b), a, b});
    }
  }
  std::sort(edges.begin(), edges.end(), edge_before);

  PersistenceDiagram out;
  UnionFind components(n);
  std::vector<bool> kills_component(edges.size(), false);
  std::size_t remaining = n;
  for (std::size_t pos = 0; pos < edges.size(); ++pos) {
    if (components.unite(edges[pos].a, edges[pos].b)) {
      kills_component[pos] = true;
      --remaining;
      if (edges[pos].diam > 0.0) out.features.push_back({0, 0.0, edges[pos].diam});
    }
  }
  for (std::size_t c = 0; c < remaining; ++c) out.features.push_back({0, 0.0, kInfinity});

  if (options.max_dim >= 1) compute_h1(dm, threshold, edges, kills_component, out);

  std::sort(out.features.begin(), out.features.end());
  return out;
}

PersistenceDiagram vr_persistence(const PointCloud& cloud, const PersistenceOptions& options) {
  return vr_persistence(pairwise_distances(cloud), options);
}

DistanceMatrix parse_lower_distance_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t");
      const auto e = cell.find_last_not_of(" \t");
      const std::string_view s = b == std::string::npos ? std::string_view{} : std::string_view(cell).substr(b, e - b + 1);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError("distance matrix row " + std::to_string(rows.size()) + ": bad value '" + cell + "'");
      }
      row.push_back(v);
    }
    if (row.size() != rows.size() + 1) {
      throw FormatError("lower-triangular row " + std::to_string(rows.size()) + " must have " +
                        std::to_string(rows.size() + 1) + " entries");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError("distance matrix CSV is empty");
  DistanceMatrix dm(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i][i] != 0.0) throw ValidationError("distance matrix diagonal must be zero");
    for (std::size_t j = 0; j < i; ++j) dm.set(i, j, rows[i][j]);
  }
  dm.validate();
  return dm;
}

DistanceMatrix load_lower_distance_csv(const std::filesystem::path& path) {
  return parse_lower_distance_csv(read_text_file(path));
}

}  // namespace actopo
