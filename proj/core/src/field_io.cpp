// SPDX-License-Identifier: Apache-2.0
#include "mfginv/field_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

namespace mfginv {
namespace {

static_assert(std::endian::native == std::endian::little,
              "field files are little-endian; add byte swapping for this host");

constexpr char kMagic[4] = {'M', 'F', 'G', 'F'};
constexpr std::size_t kHeaderBytes = 64;

void put_u32(unsigned char* p, std::uint32_t v) { std::memcpy(p, &v, 4); }
std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  return os;
}

void write_header(std::ofstream& os, const FieldFileHeader& h) {
  unsigned char buf[kHeaderBytes] = {};
  std::memcpy(buf, kMagic, 4);
  put_u32(buf + 4, h.version);
  put_u32(buf + 8, h.dim);
  put_u32(buf + 12, h.points_per_axis);
  put_u32(buf + 16, h.steps);
  put_u32(buf + 20, h.is_complex ? 1u : 0u);
  std::memcpy(buf + 24, &h.horizon, 8);
  os.write(reinterpret_cast<const char*>(buf), kHeaderBytes);
}

FieldFileHeader parse_header(std::ifstream& is, const std::filesystem::path& path) {
  unsigned char buf[kHeaderBytes];
  if (!is.read(reinterpret_cast<char*>(buf), kHeaderBytes))
    throw ValidationError(path.string() + ": truncated field header");
  if (std::memcmp(buf, kMagic, 4) != 0) throw ValidationError(path.string() + ": bad magic");
  FieldFileHeader h;
  h.version = get_u32(buf + 4);
  if (h.version != 1)
    throw ValidationError(path.string() + ": unsupported version " + std::to_string(h.version));
  h.dim = get_u32(buf + 8);
  h.points_per_axis = get_u32(buf + 12);
  h.steps = get_u32(buf + 16);
  h.is_complex = get_u32(buf + 20) != 0;
  std::memcpy(&h.horizon, buf + 24, 8);
  return h;
}

template <class T>
void write_payload(std::ofstream& os, std::span<const T> v, const std::filesystem::path& path) {
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(T)));
  if (!os) throw Error("write failed: " + path.string());
}

template <class T>
std::vector<T> read_payload(std::ifstream& is, std::size_t count,
                            const std::filesystem::path& path) {
  std::vector<T> v(count);
  if (!is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * sizeof(T))))
    throw ValidationError(path.string() + ": truncated payload");
  return v;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open " + path.string());
  return is;
}

FieldFileHeader spatial_header(const SpatialGrid& g, bool cplx) {
  FieldFileHeader h;
  h.dim = static_cast<std::uint32_t>(g.dim());
  h.points_per_axis = static_cast<std::uint32_t>(g.points_per_axis());
  h.is_complex = cplx;
  return h;
}

void fmt_double(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

}  // namespace

void write_field(const std::filesystem::path& path, const ScalarField& f) {
  auto os = open_out(path);
  write_header(os, spatial_header(f.grid(), false));
  write_payload(os, f.values(), path);
}

void write_field(const std::filesystem::path& path, const ComplexField& f) {
  auto os = open_out(path);
  write_header(os, spatial_header(f.grid(), true));
  write_payload(os, f.values(), path);
}

void write_field(const std::filesystem::path& path, const SpaceTimeField& f) {
  auto os = open_out(path);
  FieldFileHeader h = spatial_header(f.grid(), false);
  h.steps = static_cast<std::uint32_t>(f.time().steps());
  h.horizon = f.time().horizon();
  write_header(os, h);
  write_payload(os, f.values(), path);
}

FieldFileHeader read_field_header(const std::filesystem::path& path) {
  auto is = open_in(path);
  return parse_header(is, path);
}

ScalarField read_scalar_field(const std::filesystem::path& path) {
  auto is = open_in(path);
  const auto h = parse_header(is, path);
  if (h.is_complex || h.steps != 0)
    throw ValidationError(path.string() + ": not a real spatial field");
  SpatialGrid g(static_cast<int>(h.dim), static_cast<int>(h.points_per_axis));
  return ScalarField(g, read_payload<double>(is, g.size(), path));
}

ComplexField read_complex_field(const std::filesystem::path& path) {
  auto is = open_in(path);
  const auto h = parse_header(is, path);
  if (!h.is_complex || h.steps != 0)
    throw ValidationError(path.string() + ": not a complex spatial field");
  SpatialGrid g(static_cast<int>(h.dim), static_cast<int>(h.points_per_axis));
  return ComplexField(g, read_payload<std::complex<double>>(is, g.size(), path));
}

SpaceTimeField read_spacetime_field(const std::filesystem::path& path) {
  auto is = open_in(path);
  const auto h = parse_header(is, path);
  if (h.is_complex || h.steps == 0)
    throw ValidationError(path.string() + ": not a real space-time field");
  SpatialGrid g(static_cast<int>(h.dim), static_cast<int>(h.points_per_axis));
  TimeGrid t(h.horizon, static_cast<int>(h.steps));
  return SpaceTimeField(g, t, read_payload<double>(is, g.size() * t.nodes(), path));
}

void write_csv(const std::filesystem::path& path, const ScalarField& f) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  const auto& g = f.grid();
  for (int j = 0; j < g.dim(); ++j) os << 'x' << (j + 1) << ',';
  os << "value\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto x = g.point(i);
    for (int j = 0; j < g.dim(); ++j) {
      fmt_double(os, x[j]);
      os << ',';
    }
    fmt_double(os, f[i]);
    os << '\n';
  }
  if (!os) throw Error("write failed: " + path.string());
}

void write_csv(const std::filesystem::path& path, const SpaceTimeField& f) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  const auto& g = f.grid();
  os << 't';
  for (int j = 0; j < g.dim(); ++j) os << ",x" << (j + 1);
  os << ",value\n";
  for (int k = 0; k < f.time().nodes(); ++k) {
    const auto s = f.slice_span(k);
    for (std::size_t i = 0; i < g.size(); ++i) {
      fmt_double(os, f.time().node(k));
      const auto x = g.point(i);
      for (int j = 0; j < g.dim(); ++j) {
        os << ',';
        fmt_double(os, x[j]);
      }
      os << ',';
      fmt_double(os, s[i]);
      os << '\n';
    }
  }
  if (!os) throw Error("write failed: " + path.string());
}

ScalarField read_csv(const std::filesystem::path& path, const SpatialGrid& grid) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw ValidationError(path.string() + ": empty CSV");
  ScalarField out(grid);
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (row >= grid.size()) throw ValidationError(path.string() + ": too many rows");
    const auto pos = line.rfind(',');
    if (pos == std::string::npos)
      throw ValidationError(path.string() + ": malformed row " + std::to_string(row + 2));
    out[row++] = std::stod(line.substr(pos + 1));
  }
  if (row != grid.size())
    throw ValidationError(path.string() + ": expected " + std::to_string(grid.size()) +
                          " rows, got " + std::to_string(row));
  return out;
}

}  // namespace mfginv
