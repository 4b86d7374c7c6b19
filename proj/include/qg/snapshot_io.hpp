#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qg/grid.hpp"

namespace qg {

/// QGF1: little-endian; "QGF1", u32 nx, ny, nlayers, f64 dx, dy, x0, y0, time, then row-major layers.
struct Snapshot {
  Grid grid{};
  double time = 0.0;
  std::vector<ScalarField> layers;
};

void write_snapshot(std::ostream& os, const Grid& g, double time, const std::vector<ScalarField>& layers);
void write_snapshot(const std::string& path, const Grid& g, double time,
                    const std::vector<ScalarField>& layers);

/// The format carries no topology; the caller supplies it.
Snapshot read_snapshot(std::istream& is, Topology topology = Topology::periodic);
Snapshot read_snapshot(const std::string& path, Topology topology = Topology::periodic);

}  // namespace qg
