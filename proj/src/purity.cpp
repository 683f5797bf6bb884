#include "actopo/purity.hpp"

#include <set>

#include "actopo/error.hpp"

namespace actopo {

namespace {

void check_labels(const MapperGraph& graph, std::span<const Label> labels) {
  if (labels.size() != graph.num_points) {
    throw ArgumentError("got " + std::to_string(labels.size()) + " labels for a graph over " +
                        std::to_string(graph.num_points) + " points");
  }
  for (const auto& node : graph.nodes) {
    if (node.members.empty()) throw ValidationError("mapper node " + std::to_string(node.id) + " has no members");
    for (const auto m : node.members) {
      if (m >= labels.size()) throw ArgumentError("node member index outside the labelled cloud");
    }
  }
}

std::vector<double> alphas(const MapperGraph& graph, std::span<const Label> labels) {
  std::vector<double> out;
  out.reserve(graph.nodes.size());
  for (const auto& node : graph.nodes) {
    std::set<Label> distinct;
    for (const auto m : node.members) distinct.insert(labels[m]);
    out.push_back(1.0 / double(distinct.size()));
  }
  return out;
}

std::vector<std::optional<double>> betas(const MapperGraph& graph, std::span<const double> alpha) {
  std::vector<double> sum(graph.num_points, 0.0);
  std::vector<std::size_t> count(graph.num_points, 0);
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    for (const auto m : graph.nodes[i].members) {
      sum[m] += alpha[i];
      ++count[m];
    }
  }
  std::vector<std::optional<double>> out(graph.num_points);
  for (std::size_t x = 0; x < graph.num_points; ++x) {
    if (count[x] > 0) out[x] = sum[x] / double(count[x]);
  }
  return out;
}

std::optional<double> gamma(std::span<const std::optional<double>> beta, std::span<const Label> labels, Label k) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t x = 0; x < beta.size(); ++x) {
    if (labels[x] == k && beta[x]) {
      sum += *beta[x];
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / double(n);
}

}  // namespace

std::vector<double> node_purity(const MapperGraph& graph, std::span<const Label> labels) {
  check_labels(graph, labels);
  return alphas(graph, labels);
}

std::vector<std::optional<double>> point_purity(const MapperGraph& graph, std::span<const Label> labels) {
  check_labels(graph, labels);
  return betas(graph, alphas(graph, labels));
}

std::optional<double> class_purity(const MapperGraph& graph, std::span<const Label> labels, Label k) {
  return gamma(point_purity(graph, labels), labels, k);
}

PurityReport purity_report(const MapperGraph& graph, std::span<const Label> labels) {
  check_labels(graph, labels);
  PurityReport report;
  report.node = alphas(graph, labels);
  report.point = betas(graph, report.node);
  for (std::size_t x = 0; x < report.point.size(); ++x) {
    if (!report.point[x]) report.unclustered.push_back(x);
  }
  for (const auto l : std::set<Label>(labels.begin(), labels.end())) report.per_class[l] = gamma(report.point, labels, l);
  double sum = 0.0;
  for (const auto a : report.node) sum += a;
  report.mean_node_purity = report.node.empty() ? 0.0 : sum / double(report.node.size());
  return report;
}

std::string format_purity_csv(const PurityReport& report) {
  std::string out = "kind,id,value\n";
  for (std::size_t i = 0; i < report.node.size(); ++i) out += "node," + std::to_string(i) + ',' + format_number(report.node[i]) + '\n';
  for (std::size_t x = 0; x < report.point.size(); ++x) {
    if (report.point[x]) out += "point," + std::to_string(x) + ',' + format_number(*report.point[x]) + '\n';
  }
  for (const auto& [k, g] : report.per_class) {
    out += "class," + std::to_string(k) + ',' + (g ? format_number(*g) : std::string("nan")) + '\n';
  }
  return out;
}

}  // namespace actopo
