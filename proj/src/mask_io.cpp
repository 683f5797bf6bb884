#include <cctype>
#include <string>

#include "actopo/error.hpp"
#include "actopo/sampling.hpp"

namespace actopo {

namespace {

// Reads the next whitespace-delimited header token of a PGM, skipping
// comments.
std::string pgm_token(const std::string& bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    if (bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t begin = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  if (begin == pos) throw FormatError("truncated PGM header");
  return bytes.substr(begin, pos - begin);
}

std::uint32_t pgm_number(const std::string& bytes, std::size_t& pos) {
  const auto tok = pgm_token(bytes, pos);
  try {
    std::size_t used = 0;
    const auto v = std::stoul(tok, &used);
    if (used != tok.size()) throw FormatError("bad PGM header field '" + tok + "'");
    return static_cast<std::uint32_t>(v);
  } catch (const std::logic_error&) {
    throw FormatError("bad PGM header field '" + tok + "'");
  }
}

Mask parse_pgm(const std::string& bytes) {
  std::size_t pos = 2;
  Mask mask;
  mask.width = pgm_number(bytes, pos);
  mask.height = pgm_number(bytes, pos);
  const auto maxval = pgm_number(bytes, pos);
  if (mask.width == 0 || mask.height == 0) throw FormatError("PGM mask has zero size");
  if (maxval != 255) throw FormatError("PGM masks must use maxval 255");
  ++pos;  // single whitespace byte before the raster
  const std::size_t count = std::size_t{mask.width} * mask.height;
  if (bytes.size() < pos || bytes.size() - pos != count) throw CorruptionError("PGM raster size does not match header");
  mask.pixels.resize(count);
  for (std::size_t i = 0; i < count; ++i) mask.pixels[i] = bytes[pos + i] != 0 ? 1 : 0;
  return mask;
}

Mask parse_csv_grid(const std::string& text) {
  Mask mask;
  std::size_t row_start = 0;
  while (row_start < text.size()) {
    auto row_end = text.find('\n', row_start);
    if (row_end == std::string::npos) row_end = text.size();
    std::uint32_t cols = 0;
    bool any = false;
    for (std::size_t i = row_start; i < row_end; ++i) {
      const char ch = text[i];
      if (ch == '0' || ch == '1') {
        mask.pixels.push_back(ch == '1' ? 1 : 0);
        ++cols;
        any = true;
      } else if (ch != ',' && !std::isspace(static_cast<unsigned char>(ch))) {
        throw ParseError("mask CSV cells must be 0 or 1");
      }
    }
    if (any) {
      if (mask.height == 0) {
        mask.width = cols;
      } else if (cols != mask.width) {
        throw FormatError("mask CSV rows have different lengths");
      }
      ++mask.height;
    }
    row_start = row_end + 1;
  }
  if (mask.height == 0) throw FormatError("mask CSV is empty");
  return mask;
}

}  // namespace

Mask parse_mask(const std::string& bytes) {
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return parse_pgm(bytes);
  return parse_csv_grid(bytes);
}

Mask load_mask(const std::filesystem::path& path) { return parse_mask(read_text_file(path)); }

}  // namespace actopo
