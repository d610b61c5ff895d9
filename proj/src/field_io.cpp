#include "choquard/field_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>

#include "choquard/errors.hpp"

namespace choquard {

static_assert(std::endian::native == std::endian::little, "CHQF I/O assumes a little-endian host");

namespace {

constexpr std::array<char, 4> kMagic{'C', 'H', 'Q', 'F'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw IoError("chqf: truncated header");
  return value;
}

}  // namespace

void write_chqf(std::ostream& out, const Field& u) {
  const GridSpec& g = u.grid();
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.n()));
  put<double>(out, g.box_length());
  out.write(reinterpret_cast<const char*>(u.values().data()),
            static_cast<std::streamsize>(u.size() * sizeof(double)));
  if (!out) throw IoError("chqf: write failed");
}

Field read_chqf(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw IoError("chqf: bad magic");
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion) throw IoError("chqf: unsupported version " + std::to_string(version));
  const auto dim = get<std::uint32_t>(in);
  const auto n = get<std::uint32_t>(in);
  const auto box = get<double>(in);
  GridSpec grid = [&] {
    try {
      return GridSpec(static_cast<int>(dim), static_cast<int>(n), box);
    } catch (const ParameterError& e) {
      throw IoError(std::string("chqf: invalid grid header: ") + e.what());
    }
  }();
  std::vector<double> values(grid.cell_count());
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!in) throw IoError("chqf: truncated payload");
  try {
    return Field(grid, std::move(values));
  } catch (const ParameterError& e) {
    throw IoError(std::string("chqf: ") + e.what());
  }
}

void write_chqf(const std::string& path, const Field& u) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_chqf(out, u);
}

Field read_chqf(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return read_chqf(in);
}

void write_field_csv(std::ostream& out, const Field& u) {
  const GridSpec& g = u.grid();
  for (int a = 0; a < g.dim(); ++a) out << 'i' << a << ',';
  for (int a = 0; a < g.dim(); ++a) out << 'x' << a << ',';
  out << "value\n";
  char buf[32];
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto idx = g.unflatten(i);
    for (int a = 0; a < g.dim(); ++a) out << idx[a] << ',';
    for (int a = 0; a < g.dim(); ++a) {
      std::snprintf(buf, sizeof buf, "%.17g", g.coordinate(idx[a]));
      out << buf << ',';
    }
    std::snprintf(buf, sizeof buf, "%.17g", u[i]);
    out << buf << '\n';
  }
  if (!out) throw IoError("field csv: write failed");
}

void write_field_csv(const std::string& path, const Field& u) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_field_csv(out, u);
}

}  // namespace choquard
