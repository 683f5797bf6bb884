#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <omp.h>
#include <random>
#include <set>

#include "actopo/error.hpp"
#include "actopo/kernels.hpp"
#include "actopo/mapper.hpp"
#include "oracles/oracles.hpp"
#include "support/synthetic.hpp"

using namespace actopo;

namespace {

MapperGraph height_mapper(const PointCloud& c, std::size_t intervals, double overlap, std::optional<double> eps,
                          std::size_t min_samples) {
  const auto f = testing::height(c);
  const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
  const double e = eps ? *eps : elbow_eps(c, min_samples);
  return mapper_graph(c, f, uniform_cover(*lo, *hi, intervals, overlap), e, min_samples);
}

}  // namespace

TEST_CASE("l2 filter") {
  PointCloud c;
  c.dim = 2;
  const float a[2] = {3, 4}, o[2] = {0, 0};
  c.push_back(a, 0, 0);
  c.push_back(o, 0, 1);
  CHECK(l2_filter(c) == std::vector<double>{5.0, 0.0});

  const auto r = testing::gaussian_cloud(1, 100, 9);
  const auto f = l2_filter(r);
  for (std::size_t i = 0; i < r.size(); ++i) {
    double s = 0;
    for (float x : r.point(i)) s += double(x) * x;
    CHECK(std::abs(f[i] - std::sqrt(s)) < 1e-12);
  }
  CHECK(filter_values(c, "coord:1") == std::vector<double>{4.0, 0.0});
  CHECK_THROWS_AS(filter_values(c, "coord:2"), ArgumentError);
  CHECK_THROWS_AS(filter_values(c, "pca"), ArgumentError);
}

TEST_CASE("uniform cover formula") {
  const auto c = uniform_cover(0, 10, 5, 0.25);
  REQUIRE(c.intervals.size() == 5);
  CHECK(std::abs(c.intervals[0].lo - (-1.0 / 3)) < 1e-12);
  CHECK(std::abs(c.intervals[0].hi - 7.0 / 3) < 1e-12);
  CHECK(std::abs((c.intervals[1].hi - c.intervals[1].lo) - 8.0 / 3) < 1e-12);

  const auto touching = uniform_cover(0, 10, 5, 0.0);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(std::abs(touching.intervals[i].lo - 2.0 * i) < 1e-12);
    CHECK(std::abs(touching.intervals[i].hi - 2.0 * (i + 1)) < 1e-12);
  }

  const auto flat = uniform_cover(3, 3, 7, 0.5);
  REQUIRE(flat.intervals.size() == 1);
  CHECK(flat.intervals[0].lo == 2.5);
  CHECK(flat.intervals[0].hi == 3.5);

  CHECK_THROWS_AS(uniform_cover(1, 0, 3, 0.1), ArgumentError);
  CHECK_THROWS_AS(uniform_cover(0, 1, 0, 0.1), ArgumentError);
  CHECK_THROWS_AS(uniform_cover(0, 1, 3, 1.0), ArgumentError);
}

TEST_CASE("cover covers the range with the requested overlap") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lo(-100, 100), width(1e-3, 200), rate(0.0, 0.95);
  std::uniform_int_distribution<std::size_t> count(1, 60);
  for (int trial = 0; trial < 1000; ++trial) {
    const double a = lo(rng), b = a + width(rng), p = rate(rng);
    const auto n = count(rng);
    const auto c = uniform_cover(a, b, n, p);
    REQUIRE(c.intervals.size() == n);
    CHECK(c.intervals.front().lo <= a);
    CHECK(c.intervals.back().hi >= b);
    const double L = (b - a) / n / (1 - p);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      CHECK(c.intervals[i + 1].lo <= c.intervals[i].hi);  // no gap
      CHECK(std::abs((c.intervals[i].hi - c.intervals[i + 1].lo) - p * L) < 1e-9);
    }
  }
}

TEST_CASE("dbscan basics") {
  const auto two = testing::blobs(1, {{0, 0}, {100, 100}}, 5, 0.05);
  const auto l = dbscan(two, 1.0, 3);
  CHECK(std::set<int>(l.begin(), l.end()) == std::set<int>{0, 1});
  CHECK(l[0] != l[5]);

  PointCloud lone;
  lone.dim = 1;
  const float x = 0;
  lone.push_back(std::span<const float>(&x, 1), 0, 0);
  CHECK(dbscan(lone, 1.0, 2) == std::vector<int>{kNoise});
  CHECK(dbscan(lone, 1.0, 1) == std::vector<int>{0});

  CHECK_THROWS_AS(dbscan(lone, 0.0, 2), ArgumentError);
  CHECK_THROWS_AS(dbscan(lone, 1.0, 0), ArgumentError);
}

TEST_CASE("border points join their lowest-index core neighbour") {
  // 0..3 dense left, 4..7 dense right, 8 halfway between: border of both.
  PointCloud c;
  c.dim = 1;
  for (float v : {0.0f, 0.1f, 0.2f, 0.3f, 2.0f, 2.1f, 2.2f, 2.3f, 1.15f}) c.push_back(std::span<const float>(&v, 1), 0, 0);
  const auto l = dbscan(c, 0.86, 4);
  CHECK(l[8] == l[3]);
  CHECK(l[3] != l[4]);
}

TEST_CASE("dbscan matches the naive reference") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto c = testing::uniform_cloud(seed, 200, 2, 3.0);
    const auto got = dbscan(c, 0.3, 5);
    CHECK(oracle::same_partition(got, oracle::naive_dbscan(c, 0.3, 5)));
    CHECK(got == serial::dbscan(c, 0.3, 5));
  }
}

TEST_CASE("elbow") {
  const std::vector<double> curve{1, 1, 1, 1, 10};
  CHECK(elbow_index(curve) == 3);
  const std::vector<double> flat(10, 2.5);
  CHECK(elbow_index(flat) == 0);

  // Regular simplex: every k-NN distance is the common edge length.
  PointCloud simplex;
  simplex.dim = 6;
  for (std::size_t i = 0; i < 6; ++i) {
    std::vector<float> e(6, 0.0f);
    e[i] = 1.0f;
    simplex.push_back(e, 0, i);
  }
  CHECK(elbow_eps(simplex, 2) == std::sqrt(2.0));
  CHECK_THROWS_AS(elbow_eps(simplex, 6), ArgumentError);
}

TEST_CASE("elbow separates two density scales") {
  auto c = testing::blobs(3, {{0, 0}, {10, 0}, {0, 10}}, 100, 0.1);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<float> far(-100, 100);
  for (int i = 0; i < 20; ++i) {
    const float p[2] = {far(rng), far(rng)};
    c.push_back(p, 9, c.size());
  }
  auto knn = kth_neighbor_distances(c, 5);
  std::vector<double> tight(knn.begin(), knn.begin() + 300), sparse(knn.begin() + 300, knn.end());
  const double eps = elbow_eps(c, 5);
  CHECK(eps > *std::max_element(tight.begin(), tight.end()) * 0.999);
  CHECK(eps < *std::min_element(sparse.begin(), sparse.end()));
}

TEST_CASE("mapper graph examples") {
  SECTION("single blob, one interval") {
    const auto c = testing::blobs(5, {{0, 0}}, 60, 0.1);
    const auto g = height_mapper(c, 1, 0.25, 1.0, 5);
    CHECK(g.nodes.size() == 1);
    CHECK(g.edges.empty());
  }
  SECTION("segment with disjoint cover") {
    PointCloud c;
    c.dim = 2;
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<float> u(0, 1);
    for (int i = 0; i < 300; ++i) {
      const float p[2] = {u(rng), u(rng)};
      c.push_back(p, 0, i);
    }
    const auto g = height_mapper(c, 8, 0.0, 0.2, 3);
    CHECK(g.edges.empty());
    CHECK(g.nodes.size() == 8);
  }
  SECTION("nested circles with equal density make two loops") {
    const auto c = testing::nested_circles(133, 267);
    const auto g = height_mapper(c, 5, 0.25, std::nullopt, 5);
    CHECK(cycle_rank(g) == 2);
    CHECK(g.nodes.size() == 12);
    CHECK(g.noise_count == 0);
  }
  SECTION("nested circles, 200 + 200: the elbow lands on the inner scale") {
    // The sorted 5-NN curve is a two-level step whose chord residuals tie at
    // the step; the first index wins, so eps is the inner ring's spacing and
    // the sparser outer ring is all noise.
    const auto c = testing::nested_circles(200, 200);
    const auto g = height_mapper(c, 5, 0.25, std::nullopt, 5);
    CHECK(g.noise_count == 200);
    CHECK(cycle_rank(g) == 1);
    // Any eps at the outer ring's scale recovers both loops.
    CHECK(cycle_rank(height_mapper(c, 5, 0.25, 0.2, 5)) == 2);
  }
}

TEST_CASE("mapper graph invariants") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto c = testing::blobs(seed, {{0, 0, 0}, {3, 0, 0}, {0, 3, 1}, {2, 2, 2}}, 40, 0.4);
    const auto f = l2_filter(c);
    const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
    const auto cover = uniform_cover(*lo, *hi, 6, 0.3);
    const auto g = mapper_graph(c, f, cover, 0.5, 4);

    std::vector<int> seen(c.size(), 0);
    for (std::size_t id = 0; id < g.nodes.size(); ++id) {
      const auto& n = g.nodes[id];
      CHECK(n.id == id);
      REQUIRE(!n.members.empty());
      CHECK(std::is_sorted(n.members.begin(), n.members.end()));
      for (auto m : n.members) {
        CHECK(cover.intervals[n.interval].contains(f[m]));
        seen[m] = 1;
      }
      if (id > 0) {
        const auto& p = g.nodes[id - 1];
        CHECK(std::make_pair(p.interval, p.members.front()) < std::make_pair(n.interval, n.members.front()));
      }
    }
    CHECK(g.noise_count == static_cast<std::size_t>(std::count(seen.begin(), seen.end(), 0)));

    // Edges are exactly the non-empty pairwise intersections.
    std::vector<MapperEdge> brute;
    for (std::size_t a = 0; a < g.nodes.size(); ++a)
      for (std::size_t b = a + 1; b < g.nodes.size(); ++b) {
        std::vector<std::size_t> both;
        std::set_intersection(g.nodes[a].members.begin(), g.nodes[a].members.end(), g.nodes[b].members.begin(),
                              g.nodes[b].members.end(), std::back_inserter(both));
        if (!both.empty()) brute.push_back({a, b, both.size()});
      }
    REQUIRE(brute.size() == g.edges.size());
    for (std::size_t e = 0; e < brute.size(); ++e) {
      CHECK(brute[e].a == g.edges[e].a);
      CHECK(brute[e].b == g.edges[e].b);
      CHECK(brute[e].weight == g.edges[e].weight);
    }

    const auto disjoint = mapper_graph(c, f, uniform_cover(*lo, *hi, 6, 0.0), 0.5, 4);
    for (const auto& e : disjoint.edges) CHECK(disjoint.nodes[e.a].interval == disjoint.nodes[e.b].interval);
  }
}

TEST_CASE("mapper is deterministic across thread counts") {
  const auto c = testing::gaussian_cloud(12, 400, 4);
  MapperParams params;
  params.num_intervals = 10;
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto one = build_mapper(c, params);
  omp_set_num_threads(4);
  const auto four = build_mapper(c, params);
  omp_set_num_threads(saved);
  REQUIRE(one.nodes.size() == four.nodes.size());
  for (std::size_t i = 0; i < one.nodes.size(); ++i) CHECK(one.nodes[i].members == four.nodes[i].members);
  CHECK(one.edges.size() == four.edges.size());
  CHECK(one.eps == four.eps);
}

TEST_CASE("mapper parameter validation") {
  MapperParams p;
  p.overlap = 1.0;
  CHECK_THROWS_AS(p.validate(), ArgumentError);
  p = {};
  p.eps = -1.0;
  CHECK_THROWS_AS(p.validate(), ArgumentError);
  p = {};
  p.num_intervals = 0;
  CHECK_THROWS_AS(p.validate(), ArgumentError);
  p = {};
  p.filter = "nope";
  CHECK_THROWS_AS(p.validate(), ArgumentError);
}
