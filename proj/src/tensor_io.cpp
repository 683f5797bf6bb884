#include "actopo/tensor_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "actopo/error.hpp"

namespace actopo {

namespace {

constexpr std::array<char, 4> kMagic{'A', 'T', 'N', 'S'};
constexpr std::uint8_t kVersion = 1;
constexpr std::uint8_t kDtypeFloat32 = 1;
constexpr std::size_t kFixedHeader = 7;

std::uint32_t read_u32_le(const std::byte* p) {
  return std::uint32_t(std::to_integer<std::uint8_t>(p[0])) |
         (std::uint32_t(std::to_integer<std::uint8_t>(p[1])) << 8) |
         (std::uint32_t(std::to_integer<std::uint8_t>(p[2])) << 16) |
         (std::uint32_t(std::to_integer<std::uint8_t>(p[3])) << 24);
}

void write_u32_le(std::vector<std::byte>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(std::byte((v >> shift) & 0xffu));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    const auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return lines;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

template <typename T>
T parse_real(std::string_view cell, std::size_t line_no) {
  T value{};
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (cell.empty() || ec != std::errc{} || ptr != last) {
    throw ParseError("line " + std::to_string(line_no) + ": cannot parse '" + std::string(cell) + "' as a number");
  }
  return value;
}

double parse_death(std::string_view cell, std::size_t line_no) {
  if (iequals(cell, "inf") || iequals(cell, "+inf") || iequals(cell, "infinity") || iequals(cell, "+infinity")) {
    return kInfinity;
  }
  return parse_real<double>(cell, line_no);
}

long long parse_integer(std::string_view cell, std::size_t line_no) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size()) {
    throw ParseError("line " + std::to_string(line_no) + ": cannot parse '" + std::string(cell) + "' as an integer");
  }
  return value;
}

template <typename T>
std::string shortest(T value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

}  // namespace

ActivationTensor::ActivationTensor(std::uint32_t c, std::uint32_t n, std::uint32_t m, std::vector<float> v)
    : channels(c), height(n), width(m), values(std::move(v)) {
  if (c == 0 || n == 0 || m == 0) throw ValidationError("tensor dimensions must be positive");
  if (values.size() != std::size_t{c} * n * m) {
    throw ValidationError("tensor payload has " + std::to_string(values.size()) + " values, expected " +
                          std::to_string(std::size_t{c} * n * m));
  }
}

void PointCloud::push_back(std::span<const float> p, Label label, std::size_t image_id) {
  coords.insert(coords.end(), p.begin(), p.end());
  labels.push_back(label);
  image_ids.push_back(image_id);
}

void PointCloud::validate() const {
  if (dim == 0) throw ValidationError("point cloud dimension must be positive");
  if (labels.empty()) throw ValidationError("point cloud is empty");
  if (coords.size() != labels.size() * dim || image_ids.size() != labels.size()) {
    throw ValidationError("point cloud arrays have inconsistent lengths");
  }
  if (!positions.empty() && positions.size() != labels.size()) {
    throw ValidationError("point cloud provenance length mismatch");
  }
  if (!std::all_of(coords.begin(), coords.end(), [](float x) { return std::isfinite(x); })) {
    throw ValidationError("point cloud contains non-finite coordinates");
  }
  if (!std::all_of(labels.begin(), labels.end(), [](Label l) { return l >= 0; })) {
    throw ValidationError("labels must be non-negative");
  }
}

PersistenceDiagram PersistenceDiagram::restricted_to(int dim) const {
  PersistenceDiagram out;
  std::copy_if(features.begin(), features.end(), std::back_inserter(out.features),
               [dim](const PersistenceFeature& f) { return f.dim == dim; });
  return out;
}

int PersistenceDiagram::max_dim() const {
  int d = -1;
  for (const auto& f : features) d = std::max(d, f.dim);
  return d;
}

PersistenceDiagram PersistenceDiagram::canonical() const {
  PersistenceDiagram out = *this;
  std::sort(out.features.begin(), out.features.end());
  return out;
}

std::vector<std::byte> encode_tensor(const ActivationTensor& tensor) {
  std::vector<std::byte> out;
  out.reserve(kFixedHeader + 12 + tensor.values.size() * 4);
  for (char ch : kMagic) out.push_back(std::byte(ch));
  out.push_back(std::byte(kVersion));
  out.push_back(std::byte(kDtypeFloat32));
  out.push_back(std::byte(3));
  write_u32_le(out, tensor.channels);
  write_u32_le(out, tensor.height);
  write_u32_le(out, tensor.width);
  for (float v : tensor.values) write_u32_le(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

ActivationTensor decode_tensor(std::span<const std::byte> bytes) {
  if (bytes.size() < kFixedHeader) throw FormatError("tensor file shorter than its header");
  for (std::size_t i = 0; i < kMagic.size(); ++i) {
    if (bytes[i] != std::byte(kMagic[i])) throw FormatError("bad magic: not an ATNS tensor file");
  }
  if (std::to_integer<std::uint8_t>(bytes[4]) != kVersion) throw FormatError("unsupported ATNS version");
  if (std::to_integer<std::uint8_t>(bytes[5]) != kDtypeFloat32) throw FormatError("unsupported ATNS dtype");
  const auto ndim = std::to_integer<std::uint8_t>(bytes[6]);
  if (ndim != 3) throw FormatError("activation tensors must have 3 dimensions, file declares " + std::to_string(ndim));
  const std::size_t header = kFixedHeader + 4u * ndim;
  if (bytes.size() < header) throw CorruptionError("tensor header truncated");

  std::array<std::uint32_t, 3> dims{};
  std::size_t count = 1;
  for (std::size_t d = 0; d < 3; ++d) {
    dims[d] = read_u32_le(bytes.data() + kFixedHeader + 4 * d);
    if (dims[d] == 0) throw FormatError("tensor dimension is zero");
    count *= dims[d];
  }
  const std::size_t payload = bytes.size() - header;
  if (payload != count * 4) {
    throw CorruptionError("payload holds " + std::to_string(payload) + " bytes, dims require " + std::to_string(count * 4));
  }

  std::vector<float> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    values[i] = std::bit_cast<float>(read_u32_le(bytes.data() + header + 4 * i));
    if (!std::isfinite(values[i])) throw ValidationError("non-finite value at payload index " + std::to_string(i));
  }
  return ActivationTensor(dims[0], dims[1], dims[2], std::move(values));
}

ActivationTensor load_tensor_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_tensor(std::as_bytes(std::span(raw)));
}

void save_tensor_file(const ActivationTensor& tensor, const std::filesystem::path& path) {
  const auto bytes = encode_tensor(tensor);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string format_number(double value) { return shortest(value); }
std::string format_number(float value) { return shortest(value); }

PointCloud parse_point_cloud_csv(const std::string& text, bool has_labels) {
  PointCloud cloud;
  std::size_t arity = 0;
  std::size_t line_no = 0;
  bool first_content = true;
  for (auto raw : split_lines(text)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (first_content && line.front() == '#') {
      first_content = false;
      continue;
    }
    first_content = false;
    const auto cells = split_commas(line);
    if (arity == 0) {
      arity = cells.size();
      if (has_labels && arity < 2) throw FormatError("labeled rows need at least one coordinate and a label");
      cloud.dim = has_labels ? arity - 1 : arity;
    } else if (cells.size() != arity) {
      throw FormatError("line " + std::to_string(line_no) + ": expected " + std::to_string(arity) + " columns, got " +
                        std::to_string(cells.size()));
    }
    for (std::size_t j = 0; j < cloud.dim; ++j) {
      const float v = parse_real<float>(cells[j], line_no);
      if (!std::isfinite(v)) throw ValidationError("line " + std::to_string(line_no) + ": non-finite coordinate");
      cloud.coords.push_back(v);
    }
    Label label = 0;
    if (has_labels) {
      const auto l = parse_integer(cells.back(), line_no);
      if (l < 0 || l > std::numeric_limits<Label>::max()) {
        throw ValidationError("line " + std::to_string(line_no) + ": label must be a non-negative integer");
      }
      label = static_cast<Label>(l);
    }
    cloud.image_ids.push_back(cloud.labels.size());
    cloud.labels.push_back(label);
  }
  if (cloud.labels.empty()) throw FormatError("point cloud CSV has no rows");
  return cloud;
}

PointCloud load_point_cloud_csv(const std::filesystem::path& path, bool has_labels) {
  return parse_point_cloud_csv(read_text_file(path), has_labels);
}

std::string format_point_cloud_csv(const PointCloud& cloud, bool with_labels) {
  std::string out = "#";
  for (std::size_t j = 0; j < cloud.dim; ++j) out += (j ? ",x" : "x") + std::to_string(j);
  if (with_labels) out += ",label";
  out += '\n';
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    for (std::size_t j = 0; j < cloud.dim; ++j) {
      if (j) out += ',';
      out += shortest(p[j]);
    }
    if (with_labels) out += ',' + std::to_string(cloud.labels[i]);
    out += '\n';
  }
  return out;
}

void save_point_cloud_csv(const PointCloud& cloud, const std::filesystem::path& path, bool with_labels) {
  write_text_file(path, format_point_cloud_csv(cloud, with_labels));
}

void save_provenance_csv(const PointCloud& cloud, const std::filesystem::path& path) {
  std::string out = "image_id,row,col\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    out += std::to_string(cloud.image_ids[i]);
    if (cloud.positions.empty()) {
      out += ",,\n";
    } else {
      out += ',' + std::to_string(cloud.positions[i].row) + ',' + std::to_string(cloud.positions[i].col) + '\n';
    }
  }
  write_text_file(path, out);
}

std::string format_diagram(const PersistenceDiagram& diagram) {
  std::string out = "dim,birth,death\n";
  for (const auto& f : diagram.features) {
    out += std::to_string(f.dim) + ',' + shortest(f.birth) + ',' + shortest(f.death) + '\n';
  }
  return out;
}

PersistenceDiagram parse_diagram(const std::string& text) {
  PersistenceDiagram diagram;
  std::size_t line_no = 0;
  bool header_seen = false;
  for (auto raw : split_lines(text)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (line == "dim,birth,death") continue;
      throw FormatError("diagram CSV must start with the header 'dim,birth,death'");
    }
    const auto cells = split_commas(line);
    if (cells.size() != 3) throw FormatError("line " + std::to_string(line_no) + ": expected 3 columns");
    PersistenceFeature f;
    const auto dim = parse_integer(cells[0], line_no);
    f.birth = parse_real<double>(cells[1], line_no);
    f.death = parse_death(cells[2], line_no);
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (dim != 0 && dim != 1) throw ValidationError(where + "homological dimension must be 0 or 1");
    f.dim = static_cast<int>(dim);
    if (!std::isfinite(f.birth) || f.birth < 0) throw ValidationError(where + "birth must be finite and >= 0");
    if (std::isnan(f.death) || f.death <= f.birth) throw ValidationError(where + "death must exceed birth");
    diagram.features.push_back(f);
  }
  if (!header_seen) throw FormatError("diagram CSV is empty (missing header)");
  return diagram;
}

void save_diagram(const PersistenceDiagram& diagram, const std::filesystem::path& path) {
  write_text_file(path, format_diagram(diagram));
}

PersistenceDiagram load_diagram(const std::filesystem::path& path) { return parse_diagram(read_text_file(path)); }

std::vector<Label> load_labels(const std::filesystem::path& path) {
  std::vector<Label> labels;
  std::size_t line_no = 0;
  const auto text = read_text_file(path);
  for (auto raw : split_lines(text)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    const auto v = parse_integer(line, line_no);
    if (v < 0 || v > std::numeric_limits<Label>::max()) throw ValidationError("labels must be non-negative integers");
    labels.push_back(static_cast<Label>(v));
  }
  return labels;
}

}  // namespace actopo
