#include "qg/grid_ops.hpp"

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "kernels.hpp"
#include "qg/error.hpp"

namespace qg {
namespace {

void require_finite(const ScalarField& f, const char* op) {
  if (!f.all_finite()) throw InvalidArgument(std::string(op) + ": non-finite input values");
}

void require_basin_size(const Grid& g) {
  if (g.topology == Topology::basin && (g.nx < 5 || g.ny < 5))
    throw InvalidArgument("basin closures need at least 5 nodes per axis");
}

// Stencil at one node along one axis. `at(k)` returns the value k nodes away from the node along the axis.
template <class At>
double d1_point(At at, int pos, int n, bool periodic, double h) {
  const double s = 0.5 / h;
  if (periodic || (pos > 0 && pos < n - 1)) return (at(1) - at(-1)) * s;
  if (pos == 0) return ((4.0 * at(1) - 3.0 * at(0)) - at(2)) * s;
  return ((3.0 * at(0) - 4.0 * at(-1)) + at(-2)) * s;
}

template <class At>
double d2_point(At at, int pos, int n, bool periodic, double h) {
  const double s = 1.0 / (h * h);
  if (periodic || (pos > 0 && pos < n - 1)) return ((at(-1) + at(1)) - 2.0 * at(0)) * s;
  if (pos == 0) return (((2.0 * at(0) - 5.0 * at(1)) + 4.0 * at(2)) - at(3)) * s;
  return (((2.0 * at(0) - 5.0 * at(-1)) + 4.0 * at(-2)) - at(-3)) * s;
}

double deriv_at(const ScalarField& f, int i, int j, Axis axis, int order) {
  const Grid& g = f.grid();
  const bool per = g.topology == Topology::periodic;
  if (axis == Axis::x) {
    auto at = [&](int k) { return f(per ? ((i + k) % g.nx + g.nx) % g.nx : i + k, j); };
    return order == 1 ? d1_point(at, i, g.nx, per, g.dx) : d2_point(at, i, g.nx, per, g.dx);
  }
  auto at = [&](int k) { return f(i, per ? ((j + k) % g.ny + g.ny) % g.ny : j + k); };
  return order == 1 ? d1_point(at, j, g.ny, per, g.dy) : d2_point(at, j, g.ny, per, g.dy);
}

// Visits every boundary node of a basin grid once.
template <class Fn>
void for_each_wall_node(const Grid& g, Fn fn) {
  for (int i = 0; i < g.nx; ++i) {
    fn(i, 0);
    fn(i, g.ny - 1);
  }
  for (int j = 1; j < g.ny - 1; ++j) {
    fn(0, j);
    fn(g.nx - 1, j);
  }
}

// Runs a row kernel over the whole grid (periodic, via ghost-padded row copies) or over the
// interior of a basin grid. Returns the field with boundary nodes untouched (zero).
template <class Call>
ScalarField apply_rows(const Grid& g, int nsrc, const ScalarField* const* src, Call call) {
  ScalarField out(g);
  if (g.topology == Topology::basin) {
    for (int j = 1; j < g.ny - 1; ++j) {
      const double* rows[2][3];
      for (int s = 0; s < nsrc; ++s) {
        rows[s][0] = src[s]->row(j + 1);
        rows[s][1] = src[s]->row(j);
        rows[s][2] = src[s]->row(j - 1);
      }
      call(rows, out.row(j), 1, g.nx - 1);
    }
    return out;
  }
  const int n = g.nx;
  std::vector<double> pad(static_cast<std::size_t>(nsrc) * 3 * (n + 2));
  std::vector<double> obuf(n + 2);
  auto fill = [&](double* dst, const double* r) {
    dst[0] = r[n - 1];
    std::memcpy(dst + 1, r, sizeof(double) * n);
    dst[n + 1] = r[0];
  };
  for (int j = 0; j < g.ny; ++j) {
    const int jp = (j + 1) % g.ny, jm = (j + g.ny - 1) % g.ny;
    const double* rows[2][3];
    for (int s = 0; s < nsrc; ++s) {
      double* base = pad.data() + static_cast<std::size_t>(s) * 3 * (n + 2);
      fill(base, src[s]->row(jp));
      fill(base + (n + 2), src[s]->row(j));
      fill(base + 2 * (n + 2), src[s]->row(jm));
      rows[s][0] = base;
      rows[s][1] = base + (n + 2);
      rows[s][2] = base + 2 * (n + 2);
    }
    call(rows, obuf.data(), 1, n + 1);
    std::memcpy(out.row(j), obuf.data() + 1, sizeof(double) * n);
  }
  return out;
}

}  // namespace

ScalarField deriv(const ScalarField& f, Axis axis, int order) {
  if (order != 1 && order != 2) throw InvalidArgument("deriv: order must be 1 or 2");
  if (axis != Axis::x && axis != Axis::y) throw InvalidArgument("deriv: unsupported axis");
  require_finite(f, "deriv");
  const Grid& g = f.grid();
  require_basin_size(g);
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out(i, j) = deriv_at(f, i, j, axis, order);
  return out;
}

ScalarField laplacian(const ScalarField& f) {
  require_finite(f, "laplacian");
  const Grid& g = f.grid();
  require_basin_size(g);
  const double ax = 1.0 / (g.dx * g.dx), ay = 1.0 / (g.dy * g.dy);
  const ScalarField* src[1] = {&f};
  const auto& k = kernels::active();
  ScalarField out = apply_rows(g, 1, src, [&](const double* (&r)[2][3], double* o, int i0, int i1) {
    k.laplacian(r[0][0], r[0][1], r[0][2], o, i0, i1, ax, ay);
  });
  if (g.topology == Topology::basin)
    for_each_wall_node(g, [&](int i, int j) {
      out(i, j) = deriv_at(f, i, j, Axis::x, 2) + deriv_at(f, i, j, Axis::y, 2);
    });
  return out;
}

ScalarField biharmonic(const ScalarField& f) { return laplacian(laplacian(f)); }

ScalarField jacobian(const ScalarField& a, const ScalarField& b, JacobianScheme scheme) {
  if (!a.grid().same_as(b.grid())) throw InvalidArgument("jacobian: fields live on different grids");
  require_finite(a, "jacobian");
  require_finite(b, "jacobian");
  const Grid& g = a.grid();
  require_basin_size(g);
  const ScalarField* src[2] = {&a, &b};
  const auto& k = kernels::active();
  const bool ara = scheme == JacobianScheme::arakawa;
  const double sx = ara ? 1.0 / (12.0 * g.dx) : 0.5 / g.dx;
  const double sy = ara ? 1.0 / g.dy : 0.5 / g.dy;
  auto fn = ara ? k.arakawa : k.central_jacobian;
  ScalarField out = apply_rows(g, 2, src, [&](const double* (&r)[2][3], double* o, int i0, int i1) {
    fn(r[0][0], r[0][1], r[0][2], r[1][0], r[1][1], r[1][2], o, i0, i1, sx, sy);
  });
  if (g.topology == Topology::basin)
    for_each_wall_node(g, [&](int i, int j) {
      out(i, j) = deriv_at(a, i, j, Axis::x, 1) * deriv_at(b, i, j, Axis::y, 1) -
                  deriv_at(a, i, j, Axis::y, 1) * deriv_at(b, i, j, Axis::x, 1);
    });
  return out;
}

double laplacian_eigenvalue_1d(int n, double h, int k, Topology topology) {
  const double pi = 3.14159265358979323846;
  const double arg = topology == Topology::periodic ? pi * k / n : pi * k / (2.0 * (n - 1));
  const double s = std::sin(arg);
  return -4.0 * s * s / (h * h);
}

}  // namespace qg
