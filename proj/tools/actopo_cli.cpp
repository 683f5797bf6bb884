// actopo: topological summaries of CNN activation spaces.
//
// Exit codes: 0 success, 2 validation/argument error, 3 I/O error.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "actopo/diagram_distance.hpp"
#include "actopo/error.hpp"
#include "actopo/manifest.hpp"
#include "actopo/mapper.hpp"
#include "actopo/persistence.hpp"
#include "actopo/purity.hpp"
#include "actopo/sampling.hpp"
#include "actopo/service.hpp"
#include "actopo/tensor_io.hpp"

namespace fs = std::filesystem;
using namespace actopo;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<fs::path> sorted_files(const fs::path& dir, const std::vector<std::string>& extensions) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    if (std::find(extensions.begin(), extensions.end(), ext) != extensions.end()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

// "auto" or a non-negative number.
std::optional<double> parse_auto_number(const std::string& text, const char* what) {
  if (text == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw ArgumentError("");
    return v;
  } catch (const std::exception&) {
    throw ArgumentError(std::string(what) + " must be a number or 'auto', got '" + text + "'");
  }
}

std::optional<int> parse_dim_choice(const std::string& text) {
  if (text == "all") return std::nullopt;
  if (text == "0") return 0;
  if (text == "1") return 1;
  throw ArgumentError("--dim must be 0, 1 or all");
}

struct SWOptions {
  std::size_t slices = 50;
  std::string essential = "drop";
  double cap = 0.0;
  std::string dim;

  void add_to(CLI::App* cmd, const std::string& default_dim) {
    dim = default_dim;
    cmd->add_option("--slices", slices, "Number of projection directions")->capture_default_str();
    cmd->add_option("--essential", essential, "Essential classes: drop or cap")
        ->check(CLI::IsMember({"drop", "cap"}))
        ->capture_default_str();
    cmd->add_option("--cap", cap, "Death value given to essential classes under --essential cap");
    cmd->add_option("--dim", dim, "Homological dimension compared: 0, 1 or all (summed)")->capture_default_str();
  }

  SWConfig config() const {
    SWConfig cfg;
    cfg.num_slices = slices;
    cfg.essential_policy = essential == "cap" ? EssentialPolicy::cap_at_threshold : EssentialPolicy::drop;
    cfg.essential_cap = cap;
    cfg.hom_dim = parse_dim_choice(dim);
    cfg.validate();
    return cfg;
  }

  Json to_json() const { return Json{{"slices", slices}, {"essential", essential}, {"cap", cap}, {"dim", dim}}; }
};

// ---------------------------------------------------------------- sample

struct SampleCommand {
  fs::path tensors_dir;
  fs::path labels_file;
  std::string layer;
  std::string mode = "top-l2";
  std::uint64_t seed = 0;
  std::size_t p = 1;
  fs::path masks_dir;
  std::string chain;
  std::string input_size;
  fs::path out;

  void setup(CLI::App& app) {
    auto* cmd = app.add_subcommand("sample", "Build a point cloud from per-image activation tensors");
    cmd->add_option("--tensors", tensors_dir, "Directory of .atns files, one per image")->required();
    cmd->add_option("--labels", labels_file, "labels.txt aligned with the sorted tensor files")->required();
    cmd->add_option("--layer", layer, "Only use files named *_<layer>.atns");
    cmd->add_option("--mode", mode, "random | full | top-l2 | fg | bg")
        ->check(CLI::IsMember({"random", "full", "top-l2", "fg", "bg"}))
        ->capture_default_str();
    cmd->add_option("--seed", seed, "Seed for --mode random")->capture_default_str();
    cmd->add_option("--p", p, "Positions per image for fg/bg")->capture_default_str();
    cmd->add_option("--masks", masks_dir, "Directory of PGM or 0/1 CSV masks aligned with the images");
    cmd->add_option("--chain", chain, "Layer chain 'k,s,p;k,s,p;...' for receptive fields");
    cmd->add_option("--input-size", input_size, "Input image size H,W (default: mask size)");
    cmd->add_option("-o,--out", out, "Output point-cloud CSV")->required();
    cmd->callback([this] { run(); });
  }

  void run() const {
    const auto start = Clock::now();
    std::vector<fs::path> files;
    for (const auto& f : sorted_files(tensors_dir, {".atns"})) {
      const auto stem = f.stem().string();
      const std::string suffix = "_" + layer;
      if (layer.empty() || (stem.size() >= suffix.size() && stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) == 0)) {
        files.push_back(f);
      }
    }
    if (files.empty()) throw ArgumentError("no tensor files found in " + tensors_dir.string());
    std::vector<ActivationTensor> tensors;
    for (const auto& f : files) tensors.push_back(load_tensor_file(f));
    const auto labels = load_labels(labels_file);
    if (labels.size() != tensors.size()) {
      throw ValidationError(std::to_string(labels.size()) + " labels for " + std::to_string(tensors.size()) + " tensors");
    }

    std::vector<fs::path> inputs = files;
    inputs.push_back(labels_file);
    PointCloud cloud;
    if (mode == "random") {
      cloud = sample_random(tensors, labels, seed);
    } else if (mode == "full") {
      cloud = sample_full(tensors, labels);
    } else if (mode == "top-l2") {
      cloud = sample_top_l2(tensors, labels);
    } else {
      if (masks_dir.empty() || chain.empty()) throw ArgumentError("--mode fg/bg needs --masks and --chain");
      const auto mask_files = sorted_files(masks_dir, {".pgm", ".csv"});
      if (mask_files.size() != tensors.size()) {
        throw ValidationError(std::to_string(mask_files.size()) + " masks for " + std::to_string(tensors.size()) + " images");
      }
      std::vector<SpatialWeightMap> weights;
      for (const auto& mf : mask_files) {
        const auto mask = load_mask(mf);
        LayerChain lc{parse_chain_spec(chain), mask.height, mask.width};
        if (!input_size.empty()) {
          const auto comma = input_size.find(',');
          if (comma == std::string::npos) throw ArgumentError("--input-size must be H,W");
          lc.input_height = static_cast<std::uint32_t>(std::stoul(input_size.substr(0, comma)));
          lc.input_width = static_cast<std::uint32_t>(std::stoul(input_size.substr(comma + 1)));
        }
        weights.push_back(weight_positions(lc, mask, mode == "fg" ? MaskMode::foreground : MaskMode::background));
        inputs.push_back(mf);
      }
      cloud = sample_top_weighted(tensors, labels, weights, p);
    }

    save_point_cloud_csv(cloud, out);
    auto prov = out;
    prov += ".prov.csv";
    save_provenance_csv(cloud, prov);
    RunManifest m{"sample",
                  Json{{"mode", mode}, {"layer", layer}, {"seed", seed}, {"p", p}, {"chain", chain}, {"input_size", input_size}},
                  inputs,
                  {out, prov},
                  seconds_since(start)};
    write_manifest(m, out);
    std::cerr << "wrote " << cloud.size() << " points in R^" << cloud.dim << " to " << out << "\n";
  }
};

// ---------------------------------------------------------------- ph

struct PhCommand {
  fs::path cloud_file;
  fs::path distances_file;
  bool no_labels = false;
  int maxdim = 1;
  std::string threshold = "auto";
  fs::path out;

  void setup(CLI::App& app) {
    auto* cmd = app.add_subcommand("ph", "Vietoris-Rips persistence diagram of a point cloud");
    auto* src = cmd->add_option("--cloud", cloud_file, "Point-cloud CSV");
    auto* dist = cmd->add_option("--distances", distances_file, "Lower-triangular distance-matrix CSV");
    src->excludes(dist);
    cmd->add_flag("--no-labels", no_labels, "Cloud CSV has no label column");
    cmd->add_option("--maxdim", maxdim, "Largest homological dimension (0 or 1)")->capture_default_str();
    cmd->add_option("--threshold", threshold, "Filtration threshold or 'auto' (enclosing radius)")->capture_default_str();
    cmd->add_option("-o,--out", out, "Output diagram CSV")->required();
    cmd->callback([this] { run(); });
  }

  void run() const {
    const auto start = Clock::now();
    PersistenceOptions opts;
    opts.max_dim = maxdim;
    opts.threshold = parse_auto_number(threshold, "--threshold");
    PersistenceDiagram diagram;
    fs::path input;
    if (!cloud_file.empty()) {
      input = cloud_file;
      const auto cloud = load_point_cloud_csv(cloud_file, !no_labels);
      cloud.validate();
      diagram = vr_persistence(cloud, opts);
    } else if (!distances_file.empty()) {
      input = distances_file;
      diagram = vr_persistence(load_lower_distance_csv(distances_file), opts);
    } else {
      throw ArgumentError("ph needs --cloud or --distances");
    }
    save_diagram(diagram, out);
    write_manifest({"ph", Json{{"maxdim", maxdim}, {"threshold", threshold}, {"labels", !no_labels}}, {input}, {out},
                    seconds_since(start)},
                   out);
  }
};

// ---------------------------------------------------------------- swdist / cv

struct SwdistCommand {
  std::vector<fs::path> diagrams;
  std::vector<std::string> names;
  SWOptions sw;
  fs::path out;

  void setup(CLI::App& app) {
    auto* cmd = app.add_subcommand("swdist", "Sliced Wasserstein distances between layer diagrams");
    cmd->add_option("diagrams", diagrams, "Diagram CSV files, one per layer")->required();
    cmd->add_option("--names", names, "Layer names (default: file stems)");
    sw.add_to(cmd, "1");
    cmd->add_option("-o,--out", out, "Output matrix CSV")->required();
    cmd->callback([this] { run(); });
  }

  void run() const {
    const auto start = Clock::now();
    if (diagrams.size() < 2) throw ArgumentError("swdist needs at least two diagrams");
    std::vector<PersistenceDiagram> loaded;
    for (const auto& d : diagrams) loaded.push_back(load_diagram(d));
    std::vector<std::string> labels = names;
    if (labels.empty()) {
      for (const auto& d : diagrams) labels.push_back(d.stem().string());
    }
    if (labels.size() != diagrams.size()) throw ArgumentError("need one --names entry per diagram");
    const auto matrix = layer_distance_matrix(loaded, sw.config());
    write_text_file(out, format_layer_matrix(matrix, labels));
    write_manifest({"swdist", Json{{"sw", sw.to_json()}, {"names", labels}}, diagrams, {out}, seconds_since(start)}, out);
  }
};

SquareMatrix parse_matrix_csv(const fs::path& path, std::vector<std::string>& names) {
  std::istringstream in(read_text_file(path));
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw FormatError("empty matrix CSV " + path.string());
  const std::size_t n = rows.size() - 1;
  names.assign(rows[0].begin() + 1, rows[0].end());
  if (names.size() != n) throw FormatError("matrix CSV is not square: " + path.string());
  SquareMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i + 1].size() != n + 1) throw FormatError("ragged matrix CSV row in " + path.string());
    for (std::size_t j = 0; j < n; ++j) {
      try {
        m(i, j) = std::stod(rows[i + 1][j + 1]);
      } catch (const std::exception&) {
        throw ParseError("bad matrix entry '" + rows[i + 1][j + 1] + "' in " + path.string());
      }
    }
  }
  return m;
}

struct CvCommand {
  std::vector<fs::path> matrices;
  fs::path out;

  void setup(CLI::App& app) {
    auto* cmd = app.add_subcommand("cv", "Entrywise coefficient of variation across batch distance matrices");
    cmd->add_option("matrices", matrices, "Matrix CSVs written by swdist")->required();
    cmd->add_option("-o,--out", out, "Output CV matrix CSV")->required();
    cmd->callback([this] { run(); });
  }

  void run() const {
    const auto start = Clock::now();
    std::vector<SquareMatrix> loaded;
    std::vector<std::string> names;
    for (const auto& m : matrices) loaded.push_back(parse_matrix_csv(m, names));
    write_text_file(out, format_layer_matrix(batch_cv(loaded), names));
    write_manifest({"cv", Json::object(), matrices, {out}, seconds_since(start)}, out);
  }
};

// ---------------------------------------------------------------- specificity / sensitivity

struct SpecificityCommand {
  std::vector<fs::path> model_a;
  std::vector<fs::path> model_b;
  SWOptions sw;
  fs::path out;

  void setup(CLI::App& app) {
    auto* cmd = app.add_subcommand("specificity", "Correlate internal and cross-model layer distances");
    cmd->add_option("--model-a", model_a, "Per-layer diagrams of model A, in layer order")->required();
    cmd->add_option("--model-b", model_b, "Per-layer diagrams of model B, in layer order")->required();
    sw.add_to(cmd, "1");
    cmd->add_option("-o,--out", out, "Output CSV (layer,rho)")->required();
    cmd->callback([this] { run(); });
  }

  void run() const {
    const auto start = Clock::now();
    std::vector<PersistenceDiagram> a, b;
    for (const auto& f : model_a) a.push_back(load_diagram(f));
    for (const auto& f : model_b) b.push_back(load_diagram(f));
    const auto result = specificity_correlation(a, b, sw.config());
    std::string csv = "layer,rho\n";
    for (std::size_t l = 0; l < result.per_layer.size(); ++l) {
      csv += std::to_string(l) + ',' + (result.per_layer[l] ? format_number(*result.per_layer[l]) : "nan") + '\n';
    }
    csv += "mean," + (result.mean ? format_number(*result.mean) : std::string("nan")) + '\n';
    write_text_file(out, csv);
    auto inputs = model_a;
    inputs.insert(inputs.end(), model_b.begin(), model_b.end());
    write_manifest({"specificity", Json{{"sw", sw.to_json()}}, inputs, {out}, seconds_since(start)}, out);
    if (!result.undefined_layers.empty()) {
      std::string list;
      for (auto l : result.undefined_layers) list += (list.empty() ? "" : ",") + std::to_string(l);
      throw ValidationError("correlation undefined (zero variance) for layer(s) " + list);
    }
  }
};

struct SensitivityCommand {
  fs::path cloud_file;
  bool no_labels = false;
  std::string baseline;
  std::string order = "least";
  int maxdim = 1;
  SWOptions sw;
  fs::path out;

  void setup(CLI::App& app) {
    auto* cmd = app.add_subcommand("sensitivity", "SW distance between a cloud and its principal-component deletions");
    cmd->add_option("--cloud", cloud_file, "Point-cloud CSV")->required();
    cmd->add_flag("--no-labels", no_labels, "Cloud CSV has no label column");
    cmd->add_option("--baseline", baseline, "Detectable-distance threshold");
    cmd->add_option("--order", order, "Deletion order: least or greatest variance first")
        ->check(CLI::IsMember({"least", "greatest"}))
        ->capture_default_str();
    cmd->add_option("--maxdim", maxdim, "Largest homological dimension")->capture_default_str();
    sw.add_to(cmd, "all");
    cmd->add_option("-o,--out", out, "Output CSV (r,sw,detectable)")->required();
    cmd->callback([this] { run(); });
  }

  void run() const {
    const auto start = Clock::now();
    const auto cloud = load_point_cloud_csv(cloud_file, !no_labels);
    std::optional<double> base;
    if (!baseline.empty()) base = parse_auto_number(baseline, "--baseline");
    PersistenceOptions ph;
    ph.max_dim = maxdim;
    const auto curve = sensitivity_curve(cloud, sw.config(), base, ph,
                                         order == "least" ? RemovalOrder::least_variance_first
                                                          : RemovalOrder::greatest_variance_first);
    write_text_file(out, format_sensitivity_csv(curve));
    write_manifest({"sensitivity",
                    Json{{"sw", sw.to_json()}, {"baseline", baseline}, {"order", order}, {"maxdim", maxdim}},
                    {cloud_file},
                    {out},
                    seconds_since(start)},
                   out);
  }
};

// ---------------------------------------------------------------- mapper / purity

struct MapperCommand {
  fs::path cloud_file;
  bool no_labels = false;
  std::string filter = "l2";
  std::size_t num_intervals = 40;
  double overlap = 0.25;
  std::string eps = "auto";
  std::size_t min_samples = 5;
  bool no_members = false;
  fs::path out;

  void setup(CLI::App& app) {
    auto* cmd = app.add_subcommand("mapper", "Mapper graph of a point cloud");
    cmd->add_option("--cloud", cloud_file, "Point-cloud CSV")->required();
    cmd->add_option("--filter", filter, "l2 (norm) or coord:<j> (projection onto coordinate j)")->capture_default_str();
    cmd->add_flag("--no-labels", no_labels, "Cloud CSV has no label column");
    cmd->add_option("--num-intervals", num_intervals, "Cover intervals")->capture_default_str();
    cmd->add_option("--overlap", overlap, "Overlap rate in [0,1)")->capture_default_str();
    cmd->add_option("--eps", eps, "DBSCAN eps or 'auto' (elbow)")->capture_default_str();
    cmd->add_option("--min-samples", min_samples, "DBSCAN min_samples")->capture_default_str();
    cmd->add_flag("--no-members", no_members, "Omit member lists from the JSON");
    cmd->add_option("-o,--out", out, "Output graph JSON")->required();
    cmd->callback([this] { run(); });
  }

  void run() const {
    const auto start = Clock::now();
    const auto cloud = load_point_cloud_csv(cloud_file, !no_labels);
    MapperParams params;
    params.filter = filter;
    params.num_intervals = num_intervals;
    params.overlap = overlap;
    params.eps = parse_auto_number(eps, "--eps");
    params.min_samples = min_samples;
    write_text_file(out, run_mapper_json(cloud, params, !no_members));
    write_manifest({"mapper",
                    Json{{"filter", filter},
                         {"num_intervals", num_intervals},
                         {"overlap", overlap},
                         {"eps", eps},
                         {"min_samples", min_samples},
                         {"members", !no_members}},
                    {cloud_file},
                    {out},
                    seconds_since(start)},
                   out);
  }
};

struct PurityCommand {
  fs::path graph_file;
  fs::path cloud_file;
  fs::path out;
  fs::path summary;

  void setup(CLI::App& app) {
    auto* cmd = app.add_subcommand("purity", "Node, point and class purity of a mapper graph");
    cmd->add_option("--graph", graph_file, "Mapper graph JSON (with members)")->required();
    cmd->add_option("--cloud", cloud_file, "Labelled point-cloud CSV the graph was built from")->required();
    cmd->add_option("-o,--out", out, "Output purity CSV")->required();
    cmd->add_option("--summary", summary, "Output JSON summary (default: <out>.summary.json)");
    cmd->callback([this] { run(); });
  }

  void run() const {
    const auto start = Clock::now();
    PointCloud cloud;
    try {
      cloud = load_point_cloud_csv(cloud_file, true);
    } catch (const ParseError& ex) {
      throw ArgumentError(std::string("purity needs a cloud with an integer label column: ") + ex.what());
    }
    Json graph_json;
    try {
      graph_json = Json::parse(read_text_file(graph_file));
    } catch (const nlohmann::json::exception& ex) {
      throw FormatError(std::string("invalid graph JSON: ") + ex.what());
    }
    const auto graph = graph_from_json(graph_json);
    if (graph.num_points != cloud.size()) throw ArgumentError("graph and cloud have different point counts");
    for (const auto& node : graph.nodes) {
      if (node.members.empty()) throw ArgumentError("graph was written without members; rerun mapper without --no-members");
    }
    const auto report = purity_report(graph, cloud.labels);
    write_text_file(out, format_purity_csv(report));
    fs::path summary_path = summary;
    if (summary_path.empty()) {
      summary_path = out;
      summary_path += ".summary.json";
    }
    write_text_file(summary_path, purity_summary_json(report, graph).dump(2) + "\n");
    write_manifest({"purity", Json::object(), {graph_file, cloud_file}, {out, summary_path}, seconds_since(start)}, out);
  }
};

// ---------------------------------------------------------------- serve

HttpServer* g_server = nullptr;

void handle_signal(int) {
  if (g_server) g_server->stop();
}

struct ServeCommand {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::vector<std::string> clouds;
  bool no_labels = false;

  void setup(CLI::App& app) {
    auto* cmd = app.add_subcommand("serve", "Local HTTP API over registered clouds");
    cmd->add_option("--host", host, "Bind address")->capture_default_str();
    cmd->add_option("--port", port, "Port (0 picks a free one)")->capture_default_str();
    cmd->add_option("--cloud", clouds, "Register a cloud as id=path (repeatable)")->required();
    cmd->add_flag("--no-labels", no_labels, "Cloud CSVs have no label column");
    cmd->callback([this] { run(); });
  }

  void run() const {
    Service service;
    for (const auto& spec : clouds) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos || eq == 0) throw ArgumentError("--cloud expects id=path, got '" + spec + "'");
      service.register_cloud(spec.substr(0, eq), load_point_cloud_csv(spec.substr(eq + 1), !no_labels));
    }
    HttpServer server(service);
    const int bound = server.bind(host, port);
    g_server = &server;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    std::cout << "listening on http://" << host << ":" << bound << std::endl;
    server.listen();
    g_server = nullptr;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"actopo: persistent homology, sliced Wasserstein distances and mapper graphs of activation spaces"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  SampleCommand sample;
  PhCommand ph;
  SwdistCommand swdist;
  CvCommand cv;
  SpecificityCommand specificity;
  SensitivityCommand sensitivity;
  MapperCommand mapper;
  PurityCommand purity;
  ServeCommand serve_cmd;
  sample.setup(app);
  ph.setup(app);
  swdist.setup(app);
  cv.setup(app);
  specificity.setup(app);
  sensitivity.setup(app);
  mapper.setup(app);
  purity.setup(app);
  serve_cmd.setup(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}
