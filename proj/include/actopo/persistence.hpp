#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "actopo/kernels.hpp"
#include "actopo/tensor_io.hpp"

namespace actopo {

struct PersistenceOptions {
  int max_dim = 1;                   // 0 or 1
  std::optional<double> threshold;   // unset: enclosing radius
};

// min over points of the largest distance from that point to any other.
// Above this scale the Rips complex is a cone and has no homology beyond H0.
double enclosing_radius(const DistanceMatrix& dm);

// Vietoris-Rips persistence over Z/2 in dimensions 0 and (optionally) 1.
//
// H0 is union-find over edges in filtration order. H1 pairs come from
// reducing the coboundary matrix of edges (the anti-transpose of the
// triangle boundary matrix, which yields identical pairs) with clearing:
// columns of edges that already kill an H0 class are skipped, cofaces are
// enumerated on demand, and a column whose smallest coface is still free is
// paired without building a working heap.
//
// Simplices are totally ordered by (filtration value, lexicographic vertex
// tuple). Pairs with zero persistence are dropped; the result is sorted by
// (dim, birth, death).
PersistenceDiagram vr_persistence(const DistanceMatrix& dm, const PersistenceOptions& options = {});
PersistenceDiagram vr_persistence(const PointCloud& cloud, const PersistenceOptions& options = {});

// Lower-triangular distance CSV: line i holds d(i,0), ..., d(i,i).
DistanceMatrix parse_lower_distance_csv(const std::string& text);
DistanceMatrix load_lower_distance_csv(const std::filesystem::path& path);

}  // namespace actopo
