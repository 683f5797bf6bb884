#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "actopo/error.hpp"
#include "actopo/persistence.hpp"
#include "oracles/oracles.hpp"
#include "support/synthetic.hpp"

using namespace actopo;

namespace {

DistanceMatrix equilateral() {
  DistanceMatrix dm(3);
  dm.set(0, 1, 1.0);
  dm.set(0, 2, 1.0);
  dm.set(1, 2, 1.0);
  return dm;
}

PointCloud unit_square() {
  PointCloud c;
  c.dim = 2;
  const float pts[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  for (const auto& p : pts) c.push_back(p, 0, c.size());
  return c;
}

std::vector<double> h0_finite_deaths(const PersistenceDiagram& d) {
  std::vector<double> out;
  for (const auto& f : d.features)
    if (f.dim == 0 && !f.essential()) out.push_back(f.death);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("enclosing radius") {
  CHECK(enclosing_radius(pairwise_distances(unit_square())) == std::sqrt(2.0));
  CHECK(enclosing_radius(DistanceMatrix(1)) == 0.0);
  DistanceMatrix two(2);
  two.set(0, 1, 7.0);
  CHECK(enclosing_radius(two) == 7.0);
}

TEST_CASE("hand-reduced diagrams") {
  SECTION("three points at mutual distance 1") {
    const auto d = vr_persistence(equilateral());
    const PersistenceDiagram expect{{{0, 0, 1}, {0, 0, 1}, {0, 0, kInfinity}}};
    CHECK(d == expect);
  }
  SECTION("unit square") {
    const auto d = vr_persistence(unit_square());
    const PersistenceDiagram expect{{{0, 0, 1}, {0, 0, 1}, {0, 0, 1}, {0, 0, kInfinity}, {1, 1, std::sqrt(2.0)}}};
    CHECK(d == expect);
  }
  SECTION("single point") {
    const auto d = vr_persistence(DistanceMatrix(1));
    CHECK(d == PersistenceDiagram{{{0, 0, kInfinity}}});
  }
  SECTION("max_dim 0 skips H1") {
    PersistenceOptions o;
    o.max_dim = 0;
    CHECK(vr_persistence(unit_square(), o).restricted_to(1).empty());
  }
}

TEST_CASE("dense circle has one dominant loop dying near sqrt(3)") {
  const auto d = vr_persistence(testing::circle(200)).restricted_to(1);
  REQUIRE(!d.empty());
  std::vector<double> pers;
  for (const auto& f : d.features) pers.push_back(f.persistence());
  std::sort(pers.rbegin(), pers.rend());
  const auto top = *std::max_element(d.features.begin(), d.features.end(),
                                     [](const auto& a, const auto& b) { return a.persistence() < b.persistence(); });
  CHECK(std::abs(top.death - std::sqrt(3.0)) < 0.1 * std::sqrt(3.0));
  if (pers.size() > 1) CHECK(pers[0] >= 5 * pers[1]);
}

TEST_CASE("40-point circle matches the naive boundary reduction") {
  const auto dm = pairwise_distances(testing::circle(40));
  CHECK(vr_persistence(dm) == oracle::naive_rips(dm, enclosing_radius(dm)));
}

TEST_CASE("H0 deaths equal MST weights") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto dm = pairwise_distances(testing::uniform_cloud(seed, 50, 5));
    const auto deaths = h0_finite_deaths(vr_persistence(dm));
    CHECK(deaths == oracle::kruskal_mst_weights(dm));
    CHECK(deaths == oracle::prim_mst_weights(dm));
  }
}

TEST_CASE("duplicate points produce no zero-length H0 pairs") {
  PointCloud c;
  c.dim = 1;
  for (float x : {0.0f, 0.0f, 1.0f}) c.push_back(std::span<const float>(&x, 1), 0, 0);
  const auto d = vr_persistence(c);
  CHECK(d == PersistenceDiagram{{{0, 0, 1}, {0, 0, kInfinity}}});
}

TEST_CASE("optimized reduction equals naive reduction on small clouds") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 4 + trial % 9;
    const auto cloud = trial % 3 == 0 ? testing::grid_cloud(trial, n, 2, 3) : testing::uniform_cloud(trial, n, 2 + trial % 3);
    const auto dm = pairwise_distances(cloud);
    INFO("trial " << trial);
    CHECK(vr_persistence(dm) == oracle::naive_rips(dm, enclosing_radius(dm)));

    PersistenceOptions full;
    full.threshold = kInfinity;
    CHECK(vr_persistence(dm, full) == oracle::naive_rips(dm, kInfinity));

    // Low thresholds leave loops unfilled: essential H1 classes.
    PersistenceOptions low;
    low.threshold = std::uniform_real_distribution<double>(0.0, enclosing_radius(dm))(rng);
    CHECK(vr_persistence(dm, low) == oracle::naive_rips(dm, *low.threshold));
  }
}

TEST_CASE("scale equivariance") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto dm = pairwise_distances(testing::uniform_cloud(seed, 30, 3));
    const auto base = vr_persistence(dm);
    for (double lambda : {2.0, 0.25, 3.7}) {
      const auto scaled = vr_persistence(dm.scaled(lambda));
      REQUIRE(scaled.size() == base.size());
      for (std::size_t i = 0; i < base.size(); ++i) {
        const auto& f = base.features[i];
        const auto& g = scaled.features[i];
        CHECK(g.dim == f.dim);
        if (f.essential()) {
          CHECK(g.essential());
        } else {
          CHECK(std::abs(g.death - lambda * f.death) <= 1e-12 * lambda * f.death);
          CHECK(std::abs(g.birth - lambda * f.birth) <= 1e-12 * lambda * f.death);
        }
      }
    }
  }
}

TEST_CASE("raising the threshold keeps features that died below it") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto dm = pairwise_distances(testing::uniform_cloud(seed, 25, 2));
    const double r = enclosing_radius(dm);
    PersistenceOptions lo, hi;
    lo.threshold = 0.5 * r;
    hi.threshold = r;
    const auto a = vr_persistence(dm, lo);
    const auto b = vr_persistence(dm, hi);
    for (const auto& f : a.features) {
      if (f.essential()) continue;
      CHECK(std::count(b.features.begin(), b.features.end(), f) >= std::count(a.features.begin(), a.features.end(), f));
    }
  }
}

TEST_CASE("permutation invariance") {
  std::mt19937_64 rng(77);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto c = testing::uniform_cloud(seed, 40, 3);
    std::vector<std::size_t> perm(c.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    PointCloud shuffled;
    shuffled.dim = c.dim;
    for (auto i : perm) shuffled.push_back(c.point(i), c.labels[i], i);
    CHECK(vr_persistence(shuffled) == vr_persistence(c));
  }
}

TEST_CASE("invalid distance input") {
  DistanceMatrix dm = equilateral();
  dm.set(0, 2, std::nan(""));
  CHECK_THROWS_AS(vr_persistence(dm), ValidationError);
  PersistenceOptions o;
  o.max_dim = 2;
  CHECK_THROWS_AS(vr_persistence(equilateral(), o), ArgumentError);
  o.max_dim = 1;
  o.threshold = -1.0;
  CHECK_THROWS_AS(vr_persistence(equilateral(), o), ArgumentError);
}

TEST_CASE("lower-triangular distance CSV") {
  const auto dm = parse_lower_distance_csv("0\n1,0\n1,1,0\n");
  CHECK(dm == equilateral());
  CHECK_THROWS_AS(parse_lower_distance_csv("0\n1\n"), FormatError);
  CHECK_THROWS_AS(parse_lower_distance_csv("0\nx,0\n"), ParseError);
}
