#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <algorithm>
#include <random>
#include <set>

#include "actopo/error.hpp"
#include "actopo/purity.hpp"
#include "support/synthetic.hpp"

using namespace actopo;

namespace {

MapperGraph graph_of(std::size_t num_points, const std::vector<std::vector<std::size_t>>& members) {
  MapperGraph g;
  g.num_points = num_points;
  std::vector<int> seen(num_points, 0);
  for (std::size_t i = 0; i < members.size(); ++i) {
    MapperNode n;
    n.id = i;
    n.members = members[i];
    for (auto m : n.members) seen[m] = 1;
    g.nodes.push_back(n);
  }
  g.noise_count = static_cast<std::size_t>(std::count(seen.begin(), seen.end(), 0));
  return g;
}

}  // namespace

TEST_CASE("node purity") {
  const std::vector<Label> labels{0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const auto g = graph_of(11, {{0, 1}, {1, 2, 3, 4}, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}});
  const auto a = node_purity(g, labels);
  CHECK(a[0] == 1.0);
  CHECK(a[1] == 0.25);
  CHECK(a[2] == 0.1);
}

TEST_CASE("point purity") {
  const std::vector<Label> labels{0, 0, 1, 5};
  const auto g = graph_of(4, {{0, 1}, {1, 2}});
  const auto b = point_purity(g, labels);
  CHECK(b[0] == 1.0);
  CHECK(b[1] == 0.75);
  CHECK(b[2] == 0.5);
  CHECK(!b[3].has_value());

  const auto report = purity_report(g, labels);
  CHECK(report.unclustered == std::vector<std::size_t>{3});
  CHECK(!report.per_class.at(5).has_value());
  CHECK(report.per_class.at(1) == 0.5);
  CHECK(format_purity_csv(report).find("class,5,nan\n") != std::string::npos);
}

TEST_CASE("class purity of half-pure class") {
  const std::vector<Label> labels{0, 1, 0, 1};
  const auto g = graph_of(4, {{0, 1}, {2, 3}});
  CHECK(class_purity(g, labels, 0) == 0.5);
  CHECK(class_purity(g, labels, 1) == 0.5);
  CHECK(!class_purity(g, labels, 7).has_value());
}

TEST_CASE("purity agrees with direct summation on random graphs") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 30;
    std::vector<Label> labels(n);
    for (auto& l : labels) l = static_cast<Label>(rng() % 4);
    std::vector<std::vector<std::size_t>> members;
    for (int k = 0; k < 8; ++k) {
      std::vector<std::size_t> m;
      for (std::size_t i = 0; i < n; ++i)
        if (rng() % 5 == 0) m.push_back(i);
      if (m.empty()) m.push_back(rng() % n);
      members.push_back(m);
    }
    const auto g = graph_of(n, members);
    const auto r = purity_report(g, labels);
    for (std::size_t k = 0; k < members.size(); ++k) {
      std::set<Label> distinct;
      for (auto m : members[k]) distinct.insert(labels[m]);
      CHECK(r.node[k] == 1.0 / distinct.size());
    }
    for (std::size_t x = 0; x < n; ++x) {
      double sum = 0;
      int count = 0;
      for (std::size_t k = 0; k < members.size(); ++k)
        if (std::count(members[k].begin(), members[k].end(), x)) {
          sum += r.node[k];
          ++count;
        }
      if (count == 0) {
        CHECK(!r.point[x].has_value());
      } else {
        CHECK(std::abs(*r.point[x] - sum / count) < 1e-15);
        CHECK(*r.point[x] > 0.0);
        CHECK(*r.point[x] <= 1.0);
      }
    }
    for (const auto& [k, gamma] : r.per_class) {
      double sum = 0;
      int count = 0;
      for (std::size_t x = 0; x < n; ++x)
        if (labels[x] == k && r.point[x]) {
          sum += *r.point[x];
          ++count;
        }
      if (count == 0) {
        CHECK(!gamma.has_value());
      } else {
        CHECK(std::abs(*gamma - sum / count) < 1e-15);
      }
    }
  }
}

TEST_CASE("single-class nodes give purity exactly one") {
  const std::vector<Label> labels{0, 0, 1, 1, 2, 2};
  const auto g = graph_of(6, {{0, 1}, {0}, {2, 3}, {4, 5}, {5}});
  const auto r = purity_report(g, labels);
  for (double a : r.node) CHECK(a == 1.0);
  for (const auto& b : r.point) CHECK(b == 1.0);
  for (const auto& [k, gamma] : r.per_class) CHECK(gamma == 1.0);
  CHECK(r.mean_node_purity == 1.0);
}

TEST_CASE("merging nodes of disjoint classes never raises mean node purity") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Label> labels(12);
    for (std::size_t i = 0; i < 12; ++i) labels[i] = static_cast<Label>(i < 6 ? rng() % 3 : 3 + rng() % 3);
    const std::vector<std::size_t> left{0, 1, 2, 3, 4, 5}, right{6, 7, 8, 9, 10, 11};
    std::vector<std::size_t> merged = left;
    merged.insert(merged.end(), right.begin(), right.end());
    const auto split = purity_report(graph_of(12, {left, right, {0, 6}}), labels);
    const auto joined = purity_report(graph_of(12, {merged, {0, 6}}), labels);
    CHECK(joined.mean_node_purity <= split.mean_node_purity);
  }
}

TEST_CASE("purity rejects inconsistent input") {
  const auto g = graph_of(3, {{0, 1}});
  CHECK_THROWS_AS(node_purity(g, std::vector<Label>{0, 1}), ArgumentError);
  auto empty = graph_of(3, {{0}});
  empty.nodes[0].members.clear();
  CHECK_THROWS_AS(node_purity(empty, std::vector<Label>{0, 1, 2}), ValidationError);
}
