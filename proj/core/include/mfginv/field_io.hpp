// SPDX-License-Identifier: Apache-2.0
//
// Binary field files: 64-byte little-endian header followed by the payload
// in the in-memory (row-major, slice-major for space-time) order.
//
//   offset  size  content
//        0     4  magic "MFGF"
//        4     4  u32 version (1)
//        8     4  u32 n
//       12     4  u32 N
//       16     4  u32 M (0 for a spatial field)
//       20     4  u32 complex flag (0 real, 1 complex as re,im pairs)
//       24     8  f64 horizon T (0 for a spatial field)
//       32    32  reserved, zero
#pragma once

#include <cstdint>
#include <filesystem>

#include "mfginv/field.hpp"

namespace mfginv {

struct FieldFileHeader {
  std::uint32_t version = 1;
  std::uint32_t dim = 0;
  std::uint32_t points_per_axis = 0;
  std::uint32_t steps = 0;
  bool is_complex = false;
  double horizon = 0.0;
};

void write_field(const std::filesystem::path& path, const ScalarField& f);
void write_field(const std::filesystem::path& path, const ComplexField& f);
void write_field(const std::filesystem::path& path, const SpaceTimeField& f);

FieldFileHeader read_field_header(const std::filesystem::path& path);
ScalarField read_scalar_field(const std::filesystem::path& path);
ComplexField read_complex_field(const std::filesystem::path& path);
SpaceTimeField read_spacetime_field(const std::filesystem::path& path);

/// CSV with header "x1[,x2[,x3]],value"; values printed with 17 significant digits.
void write_csv(const std::filesystem::path& path, const ScalarField& f);
/// Space-time variant: columns t,x1..,value, one row per (node, point).
void write_csv(const std::filesystem::path& path, const SpaceTimeField& f);
/// Reads a spatial CSV written by write_csv; rows must follow grid order.
ScalarField read_csv(const std::filesystem::path& path, const SpatialGrid& grid);

}  // namespace mfginv
