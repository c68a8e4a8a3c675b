#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "sbdf/grid.hpp"

namespace sbdf {

// Snapshot layout (little-endian, 32-byte header):
//   char[8] "SBDFGRID" | u32 nx | u32 ny | f64 h | u32 bc code | u32 reserved (0)
// followed by nx*ny f64 values in row-major order.
inline constexpr std::size_t kSnapshotHeaderBytes = 32;

void write_snapshot(std::ostream& os, const Field& u);
void write_snapshot(const std::filesystem::path& path, const Field& u);
/// Throws std::runtime_error on bad magic, truncated data or a bad grid.
Field read_snapshot(std::istream& is);
Field read_snapshot(const std::filesystem::path& path);

/// One line per grid row (j = 0 first), values comma separated in shortest
/// round-trip form.
void write_csv(std::ostream& os, const Field& u);
void write_csv(const std::filesystem::path& path, const Field& u);

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace sbdf
