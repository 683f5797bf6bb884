#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "actopo/mapper.hpp"
#include "actopo/tensor_io.hpp"

namespace actopo {

// alpha_i = 1 / (number of distinct labels among node i's members).
std::vector<double> node_purity(const MapperGraph& graph, std::span<const Label> labels);

// beta_x = mean alpha over the nodes containing x. Points in no node are
// left unset.
std::vector<std::optional<double>> point_purity(const MapperGraph& graph, std::span<const Label> labels);

// gamma_k = mean beta over the clustered points of class k; unset when the
// class has no clustered point.
std::optional<double> class_purity(const MapperGraph& graph, std::span<const Label> labels, Label k);

struct PurityReport {
  std::vector<double> node;
  std::vector<std::optional<double>> point;
  std::map<Label, std::optional<double>> per_class;  // every label present in the cloud
  std::vector<std::size_t> unclustered;
  double mean_node_purity = 0.0;
};

PurityReport purity_report(const MapperGraph& graph, std::span<const Label> labels);

// `kind,id,value` rows; undefined class purity is written as `nan`.
std::string format_purity_csv(const PurityReport& report);

}  // namespace actopo
