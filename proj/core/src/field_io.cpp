#include "sbdf/field_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace sbdf {

namespace {

constexpr std::array<char, 8> kMagic{'S', 'B', 'D', 'F', 'G', 'R', 'I', 'D'};

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put_le(std::ostream& os, T v) {
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T)))
    throw std::runtime_error("snapshot truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T v;
  std::memcpy(&v, bytes.data(), sizeof(T));
  return v;
}

}  // namespace

void write_snapshot(std::ostream& os, const Field& u) {
  const auto& g = u.grid();
  os.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.nx));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.ny));
  put_le<double>(os, g.h);
  put_le<std::uint32_t>(os, g.bc.code());
  put_le<std::uint32_t>(os, 0u);
  for (double v : u.values()) put_le<double>(os, v);
  if (!os) throw std::runtime_error("failed writing snapshot");
}

void write_snapshot(const std::filesystem::path& path, const Field& u) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_snapshot(os, u);
}

Field read_snapshot(std::istream& is) {
  std::array<char, 8> magic{};
  if (!is.read(magic.data(), magic.size())) throw std::runtime_error("snapshot truncated");
  if (magic != kMagic) throw std::runtime_error("snapshot magic mismatch (expected SBDFGRID)");
  GridSpec g;
  g.nx = static_cast<int>(get_le<std::uint32_t>(is));
  g.ny = static_cast<int>(get_le<std::uint32_t>(is));
  g.h = get_le<double>(is);
  g.bc = BoundarySpec::from_code(get_le<std::uint32_t>(is));
  (void)get_le<std::uint32_t>(is);
  g.validate();
  std::vector<double> values(g.size());
  for (double& v : values) v = get_le<double>(is);
  return Field(g, std::move(values));
}

Field read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return read_snapshot(is);
}

std::string format_double(double v) {
  std::array<char, 32> buf;
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf.data(), end);
}

void write_csv(std::ostream& os, const Field& u) {
  const auto& g = u.grid();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (i) os << ',';
      os << format_double(u(i, j));
    }
    os << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const Field& u) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_csv(os, u);
}

}  // namespace sbdf
