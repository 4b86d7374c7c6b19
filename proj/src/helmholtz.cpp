#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "qg/error.hpp"
#include "qg/grid_ops.hpp"

namespace qg {
namespace {

// FFTW's planner is not thread-safe; executing distinct plans concurrently is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct Transform {
  int n0 = 0, n1 = 0;  // rows, columns of the transformed block
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr, bwd = nullptr;

  ~Transform() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (real) fftw_free(real);
    if (spec) fftw_free(spec);
  }
};

std::unique_ptr<Transform> make_periodic(int ny, int nx) {
  auto t = std::make_unique<Transform>();
  t->n0 = ny;
  t->n1 = nx;
  std::lock_guard<std::mutex> lock(planner_mutex());
  t->real = fftw_alloc_real(static_cast<std::size_t>(ny) * nx);
  t->spec = fftw_alloc_complex(static_cast<std::size_t>(ny) * (nx / 2 + 1));
  t->fwd = fftw_plan_dft_r2c_2d(ny, nx, t->real, t->spec, FFTW_ESTIMATE);
  t->bwd = fftw_plan_dft_c2r_2d(ny, nx, t->spec, t->real, FFTW_ESTIMATE);
  return t;
}

std::unique_ptr<Transform> make_sine(int m, int n) {
  auto t = std::make_unique<Transform>();
  t->n0 = m;
  t->n1 = n;
  std::lock_guard<std::mutex> lock(planner_mutex());
  t->real = fftw_alloc_real(static_cast<std::size_t>(m) * n);
  t->fwd = fftw_plan_r2r_2d(m, n, t->real, t->real, FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
  return t;
}

Transform& cached(bool periodic, int a, int b) {
  thread_local std::map<std::tuple<bool, int, int>, std::unique_ptr<Transform>> cache;
  auto& slot = cache[{periodic, a, b}];
  if (!slot) slot = periodic ? make_periodic(a, b) : make_sine(a, b);
  return *slot;
}

void check_resonance(double min_den, double max_den) {
  if (!(min_den > 1e-12 * max_den))
    throw InvalidArgument("helmholtz_solve: operator is singular for this shift (resonant mode)");
}

ScalarField solve_periodic(const ScalarField& rhs, double c) {
  const Grid& g = rhs.grid();
  const double scale = rhs.max_abs();
  if (c == 0.0 && std::abs(rhs.mean()) > 1e-12 * scale)
    throw InvalidArgument("helmholtz_solve: zero-mean gauge with c = 0 needs a zero-mean rhs (mean " +
                          std::to_string(rhs.mean()) + ")");
  Transform& t = cached(true, g.ny, g.nx);
  std::memcpy(t.real, rhs.data(), sizeof(double) * g.size());
  fftw_execute(t.fwd);
  const int nh = g.nx / 2 + 1;
  std::vector<double> ex(nh), ey(g.ny);
  for (int k = 0; k < nh; ++k) ex[k] = laplacian_eigenvalue_1d(g.nx, g.dx, k, Topology::periodic);
  for (int k = 0; k < g.ny; ++k) ey[k] = laplacian_eigenvalue_1d(g.ny, g.dy, k, Topology::periodic);
  double min_den = INFINITY, max_den = 0.0;
  const double norm = 1.0 / static_cast<double>(g.size());
  for (int ky = 0; ky < g.ny; ++ky) {
    for (int kx = 0; kx < nh; ++kx) {
      fftw_complex& z = t.spec[static_cast<std::size_t>(ky) * nh + kx];
      if (kx == 0 && ky == 0 && c == 0.0) {
        z[0] = z[1] = 0.0;
        continue;
      }
      const double den = (ex[kx] + ey[ky]) - c;
      min_den = std::min(min_den, std::abs(den));
      max_den = std::max(max_den, std::abs(den));
      const double f = norm / den;
      z[0] *= f;
      z[1] *= f;
    }
  }
  check_resonance(min_den, max_den);
  fftw_execute(t.bwd);
  return ScalarField(g, std::vector<double>(t.real, t.real + g.size()));
}

ScalarField solve_basin(const ScalarField& rhs, double c) {
  const Grid& g = rhs.grid();
  const int n = g.nx - 2, m = g.ny - 2;
  Transform& t = cached(false, m, n);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) t.real[static_cast<std::size_t>(j) * n + i] = rhs(i + 1, j + 1);
  fftw_execute(t.fwd);
  std::vector<double> ex(n), ey(m);
  for (int k = 0; k < n; ++k) ex[k] = laplacian_eigenvalue_1d(g.nx, g.dx, k + 1, Topology::basin);
  for (int k = 0; k < m; ++k) ey[k] = laplacian_eigenvalue_1d(g.ny, g.dy, k + 1, Topology::basin);
  const double norm = 1.0 / (4.0 * (g.nx - 1) * (g.ny - 1));
  double min_den = INFINITY, max_den = 0.0;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) {
      const double den = (ex[i] + ey[j]) - c;
      min_den = std::min(min_den, std::abs(den));
      max_den = std::max(max_den, std::abs(den));
      t.real[static_cast<std::size_t>(j) * n + i] *= norm / den;
    }
  check_resonance(min_den, max_den);
  fftw_execute(t.fwd);
  ScalarField u(g);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) u(i + 1, j + 1) = t.real[static_cast<std::size_t>(j) * n + i];
  return u;
}

}  // namespace

ScalarField helmholtz_solve(const ScalarField& rhs, double c, Gauge gauge) {
  if (!rhs.all_finite()) throw InvalidArgument("helmholtz_solve: non-finite rhs");
  if (!std::isfinite(c)) throw InvalidArgument("helmholtz_solve: non-finite shift");
  const Grid& g = rhs.grid();
  const bool per = g.topology == Topology::periodic;
  if (per && gauge != Gauge::zero_mean)
    throw InvalidArgument("helmholtz_solve: periodic grids use the zero-mean gauge");
  if (!per && gauge != Gauge::dirichlet_zero)
    throw InvalidArgument("helmholtz_solve: basin grids use the dirichlet-zero gauge");
  const double scale = rhs.max_abs();
  if (scale == 0.0) return ScalarField(g);

  ScalarField u = per ? solve_periodic(rhs, c) : solve_basin(rhs, c);

  ScalarField r = laplacian(u);
  double err = 0.0;
  const int b = per ? 0 : 1;
  const double mean = (per && c == 0.0) ? rhs.mean() : 0.0;
  for (int j = b; j < g.ny - b; ++j)
    for (int i = b; i < g.nx - b; ++i)
      err = std::max(err, std::abs((r(i, j) - c * u(i, j)) - (rhs(i, j) - mean)));
  if (!(err <= 1e-10 * scale))
    throw NumericalError("helmholtz_solve: residual target 1e-10 missed", err / scale);
  return u;
}

}  // namespace qg

namespace qg {

ScalarField spectral_refine(const ScalarField& f, int factor) {
  const Grid& g = f.grid();
  if (g.topology != Topology::periodic) throw InvalidArgument("spectral_refine: periodic grids only");
  if (factor < 1) throw InvalidArgument("spectral_refine: factor must be positive");
  if (!f.all_finite()) throw InvalidArgument("spectral_refine: non-finite input");
  if (factor == 1) return f;
  Grid fine = g;
  fine.nx = g.nx * factor;
  fine.ny = g.ny * factor;
  fine.dx = g.dx / factor;
  fine.dy = g.dy / factor;
  Transform& coarse = cached(true, g.ny, g.nx);
  std::memcpy(coarse.real, f.data(), sizeof(double) * g.size());
  fftw_execute(coarse.fwd);
  Transform& t = cached(true, fine.ny, fine.nx);
  const int nh = g.nx / 2 + 1, fh = fine.nx / 2 + 1;
  std::memset(t.spec, 0, sizeof(fftw_complex) * static_cast<std::size_t>(fine.ny) * fh);
  const double norm = 1.0 / static_cast<double>(g.size());
  for (int ky = 0; ky < g.ny; ++ky) {
    const int freq = ky <= g.ny / 2 ? ky : ky - g.ny;
    if (2 * std::abs(freq) >= g.ny) continue;
    const int fy = (freq + fine.ny) % fine.ny;
    for (int kx = 0; kx < nh; ++kx) {
      if (2 * kx >= g.nx) continue;
      const fftw_complex& z = coarse.spec[static_cast<std::size_t>(ky) * nh + kx];
      fftw_complex& w = t.spec[static_cast<std::size_t>(fy) * fh + kx];
      w[0] = z[0] * norm;
      w[1] = z[1] * norm;
    }
  }
  fftw_execute(t.bwd);
  return ScalarField(fine, std::vector<double>(t.real, t.real + fine.size()));
}

}  // namespace qg
