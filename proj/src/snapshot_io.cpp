#include "qg/snapshot_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "qg/error.hpp"

namespace qg {
namespace {

static_assert(std::endian::native == std::endian::little, "QGF1 writer assumes a little-endian host");

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw InvalidArgument("QGF1: truncated header");
  return v;
}

}  // namespace

void write_snapshot(std::ostream& os, const Grid& g, double time, const std::vector<ScalarField>& layers) {
  os.write("QGF1", 4);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.nx));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.ny));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(layers.size()));
  put(os, g.dx);
  put(os, g.dy);
  put(os, g.x0);
  put(os, g.y0);
  put(os, time);
  for (const auto& f : layers) {
    if (!f.grid().same_as(g)) throw InvalidArgument("QGF1: layer grid differs from header grid");
    os.write(reinterpret_cast<const char*>(f.data()), static_cast<std::streamsize>(sizeof(double) * f.size()));
  }
  if (!os) throw InvalidArgument("QGF1: write failed");
}

void write_snapshot(const std::string& path, const Grid& g, double time,
                    const std::vector<ScalarField>& layers) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidArgument("QGF1: cannot open " + path);
  write_snapshot(os, g, time, layers);
}

Snapshot read_snapshot(std::istream& is, Topology topology) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "QGF1", 4) != 0) throw InvalidArgument("QGF1: bad magic");
  Snapshot s;
  s.grid.nx = static_cast<int>(get<std::uint32_t>(is));
  s.grid.ny = static_cast<int>(get<std::uint32_t>(is));
  const auto nl = get<std::uint32_t>(is);
  s.grid.dx = get<double>(is);
  s.grid.dy = get<double>(is);
  s.grid.x0 = get<double>(is);
  s.grid.y0 = get<double>(is);
  s.time = get<double>(is);
  s.grid.topology = topology;
  s.grid.validate();
  for (std::uint32_t l = 0; l < nl; ++l) {
    std::vector<double> v(s.grid.size());
    if (!is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(sizeof(double) * v.size())))
      throw InvalidArgument("QGF1: truncated layer data");
    s.layers.emplace_back(s.grid, std::move(v));
  }
  return s;
}

Snapshot read_snapshot(const std::string& path, Topology topology) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("QGF1: cannot open " + path);
  return read_snapshot(is, topology);
}

}  // namespace qg
