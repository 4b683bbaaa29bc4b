#include "oasis/raster_io.hpp"

#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <string>

#include "oasis/errors.hpp"

namespace oasis {

namespace {

std::ifstream open_in(std::filesystem::path const& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading", path.string());
  return in;
}

std::ofstream open_out(std::filesystem::path const& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing", path.string());
  return out;
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in, std::filesystem::path const& path) {
  std::string tok;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      if (!tok.empty()) return tok;
    } else {
      tok.push_back(static_cast<char>(c));
    }
    c = in.get();
  }
  if (tok.empty()) throw ParseError("truncated raster header in " + path.string());
  return tok;
}

int header_int(std::istream& in, std::filesystem::path const& path) {
  auto const tok = header_token(in, path);
  try {
    std::size_t used = 0;
    int const v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (std::exception const&) {
    throw ParseError("bad raster header value '" + tok + "' in " + path.string());
  }
}

}  // namespace

SegMask read_pgm(std::filesystem::path const& path) {
  auto in = open_in(path);
  if (header_token(in, path) != "P5") throw ParseError("not a binary PGM (P5): " + path.string());
  int const w = header_int(in, path);
  int const h = header_int(in, path);
  int const maxval = header_int(in, path);
  if (w <= 0 || h <= 0) throw ParseError("PGM has non-positive dimensions: " + path.string());
  if (maxval <= 0 || maxval > 255) throw ParseError("PGM maxval must be in 1..255: " + path.string());
  SegMask mask(w, h);
  auto data = mask.data();
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (in.gcount() != static_cast<std::streamsize>(data.size())) {
    throw ParseError("PGM pixel data truncated: " + path.string());
  }
  return mask;
}

void write_pgm(std::filesystem::path const& path, SegMask const& mask) {
  auto out = open_out(path);
  out << "P5\n" << mask.width() << ' ' << mask.height() << "\n255\n";
  auto const data = mask.data();
  out.write(reinterpret_cast<char const*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("write failed", path.string());
}

DepthMap read_pfm(std::filesystem::path const& path) {
  auto in = open_in(path);
  auto const magic = header_token(in, path);
  if (magic != "Pf") throw ParseError("not a single-channel PFM (Pf): " + path.string());
  int const w = header_int(in, path);
  int const h = header_int(in, path);
  auto const scale_tok = header_token(in, path);
  double scale = 0.0;
  try {
    scale = std::stod(scale_tok);
  } catch (std::exception const&) {
    throw ParseError("bad PFM scale '" + scale_tok + "' in " + path.string());
  }
  if (w <= 0 || h <= 0 || scale == 0.0) throw ParseError("bad PFM header: " + path.string());
  bool const little = scale < 0.0;
  bool const swap = little != (std::endian::native == std::endian::little);

  DepthMap depth(w, h);
  std::vector<std::uint32_t> buf(static_cast<std::size_t>(w));
  for (int file_row = 0; file_row < h; ++file_row) {
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 4));
    if (in.gcount() != static_cast<std::streamsize>(buf.size() * 4)) {
      throw ParseError("PFM pixel data truncated: " + path.string());
    }
    auto row = depth.row(h - 1 - file_row);
    for (int u = 0; u < w; ++u) {
      std::uint32_t bits = buf[static_cast<std::size_t>(u)];
      if (swap) bits = __builtin_bswap32(bits);
      row[static_cast<std::size_t>(u)] = std::bit_cast<float>(bits);
    }
  }
  return depth;
}

void write_pfm(std::filesystem::path const& path, DepthMap const& depth) {
  auto out = open_out(path);
  out << "Pf\n" << depth.width() << ' ' << depth.height() << "\n-1.0\n";
  bool const swap = std::endian::native != std::endian::little;
  std::vector<std::uint32_t> buf(static_cast<std::size_t>(depth.width()));
  for (int v = depth.height() - 1; v >= 0; --v) {
    auto const row = depth.row(v);
    for (std::size_t u = 0; u < row.size(); ++u) {
      std::uint32_t bits = std::bit_cast<std::uint32_t>(row[u]);
      buf[u] = swap ? __builtin_bswap32(bits) : bits;
    }
    out.write(reinterpret_cast<char const*>(buf.data()), static_cast<std::streamsize>(buf.size() * 4));
  }
  if (!out) throw IoError("write failed", path.string());
}

}  // namespace oasis
