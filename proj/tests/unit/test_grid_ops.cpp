#include <cmath>
#include <random>

#include "doctest.h"
#include "qg/error.hpp"
#include "qg/grid_ops.hpp"
#include "qg/simd.hpp"

using namespace qg;

namespace {

const double kPi = 3.14159265358979323846;

ScalarField random_field(const Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField f(g);
  for (auto& v : f.values()) v = u(rng);
  return f;
}

ScalarField smooth_periodic(const Grid& g) {
  const double kx = 2 * kPi / g.length_x(), ky = 2 * kPi / g.length_y();
  return ScalarField::from_function(g, [&](double x, double y) {
    return std::sin(kx * x) * std::cos(2 * ky * y) + 0.3 * std::cos(3 * kx * x + ky * y);
  });
}

double interior_max_err(const ScalarField& f, double exact, int margin = 1) {
  const Grid& g = f.grid();
  double e = 0;
  for (int j = margin; j < g.ny - margin; ++j)
    for (int i = margin; i < g.nx - margin; ++i) e = std::max(e, std::abs(f(i, j) - exact));
  return e;
}

}  // namespace

TEST_CASE("deriv: constants, quadratics, and convergence") {
  Grid g = Grid::periodic(32, 24, 2 * kPi, 2 * kPi);
  ScalarField c(g, 3.5);
  CHECK(deriv(c, Axis::x, 1).max_abs() == 0.0);
  CHECK(deriv(c, Axis::y, 2).max_abs() == 0.0);

  Grid b = Grid::basin(17, 13, -1.0, 3.0, 0.0, 2.0);
  auto q = ScalarField::from_function(b, [](double x, double y) { return x * x + 0.5 * x * y - y; });
  auto qxx = deriv(q, Axis::x, 2);
  auto qx = deriv(q, Axis::x, 1);
  for (int j = 0; j < b.ny; ++j)
    for (int i = 0; i < b.nx; ++i) {
      CHECK(qxx(i, j) == doctest::Approx(2.0).epsilon(1e-10));
      CHECK(qx(i, j) == doctest::Approx(2 * b.x(i) + 0.5 * b.y(j)).epsilon(1e-10));
    }
  auto qy = deriv(q, Axis::y, 1);
  CHECK(qy(0, 0) == doctest::Approx(0.5 * b.x(0) - 1.0));

  double errs[3];
  int ns[3] = {32, 64, 128};
  for (int k = 0; k < 3; ++k) {
    Grid p = Grid::periodic(ns[k], ns[k], 2.0, 2.0);
    auto f = ScalarField::from_function(p, [](double x, double) { return std::sin(kPi * x); });
    auto d = deriv(f, Axis::x, 1);
    double e = 0;
    for (int j = 0; j < p.ny; ++j)
      for (int i = 0; i < p.nx; ++i) e = std::max(e, std::abs(d(i, j) - kPi * std::cos(kPi * p.x(i))));
    errs[k] = e;
  }
  CHECK(std::log2(errs[0] / errs[1]) >= 1.9);
  CHECK(std::log2(errs[1] / errs[2]) >= 1.9);

  CHECK_THROWS_AS(deriv(c, Axis::x, 3), InvalidArgument);
  ScalarField bad(g);
  bad(3, 4) = NAN;
  CHECK_THROWS_AS(deriv(bad, Axis::x, 1), InvalidArgument);
}

TEST_CASE("laplacian and biharmonic") {
  Grid b = Grid::basin(20, 16, 0.0, 1.0, 0.0, 1.0);
  auto q = ScalarField::from_function(b, [](double x, double y) { return x * x + y * y; });
  CHECK(interior_max_err(laplacian(q), 4.0, 0) < 1e-9);
  CHECK(interior_max_err(biharmonic(q), 0.0, 2) < 1e-6);
  CHECK(laplacian(ScalarField(b, 2.0)).max_abs() == 0.0);

  Grid p = Grid::periodic(64, 64, 2 * kPi, 2 * kPi);
  const double k = 3;
  auto s = ScalarField::from_function(p, [&](double x, double) { return std::sin(k * x); });
  auto ls = laplacian(s), bs = biharmonic(s);
  double el = 0, eb = 0;
  for (int j = 0; j < p.ny; ++j)
    for (int i = 0; i < p.nx; ++i) {
      el = std::max(el, std::abs(ls(i, j) + k * k * s(i, j)));
      eb = std::max(eb, std::abs(bs(i, j) - k * k * k * k * s(i, j)));
    }
  CHECK(el < 0.1);
  CHECK(eb < 2.0);

  // laplacian is exactly deriv_xx + deriv_yy
  auto f = random_field(p, 7);
  CHECK(max_abs_diff(laplacian(f), deriv(f, Axis::x, 2) + deriv(f, Axis::y, 2)) == 0.0);
  auto fb = random_field(b, 8);
  CHECK(max_abs_diff(laplacian(fb), deriv(fb, Axis::x, 2) + deriv(fb, Axis::y, 2)) == 0.0);

  // linearity
  auto g2 = random_field(p, 9);
  auto lhs = laplacian(lincomb(2.0, f, -3.0, g2));
  auto rhs = lincomb(2.0, laplacian(f), -3.0, laplacian(g2));
  CHECK(max_abs_diff(lhs, rhs) < 1e-10 * rhs.max_abs());
}

TEST_CASE("jacobian schemes") {
  Grid b = Grid::basin(24, 20, -1.0, 1.0, -0.5, 1.5);
  auto X = ScalarField::from_function(b, [](double x, double) { return x; });
  auto Y = ScalarField::from_function(b, [](double, double y) { return y; });
  for (auto s : {JacobianScheme::central, JacobianScheme::arakawa}) {
    CHECK(interior_max_err(jacobian(X, Y, s), 1.0) < 1e-12);
    CHECK(jacobian(X, X, s).max_abs() < 1e-12);
  }
  auto X2 = ScalarField::from_function(b, [](double x, double) { return x * x; });
  auto Y2 = ScalarField::from_function(b, [](double, double y) { return y * y; });
  auto j = jacobian(X2, Y2, JacobianScheme::central);
  for (int jj = 1; jj < b.ny - 1; ++jj)
    for (int i = 1; i < b.nx - 1; ++i) CHECK(j(i, jj) == doctest::Approx(4 * b.x(i) * b.y(jj)));

  Grid p = Grid::periodic(40, 36, 2 * kPi, 3.0);
  auto a = random_field(p, 1), c = random_field(p, 2);
  for (auto s : {JacobianScheme::central, JacobianScheme::arakawa}) {
    auto ab = jacobian(a, c, s), ba = jacobian(c, a, s);
    CHECK(max_abs_diff(ab, -1.0 * ba) < 1e-13 * ab.max_abs());
    CHECK(jacobian(a, a, s).max_abs() < 1e-13 * ab.max_abs());
  }
  auto ja = jacobian(a, c, JacobianScheme::arakawa);
  double sa = 0, sb = 0, scale = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sa += a.data()[k] * ja.data()[k];
    sb += c.data()[k] * ja.data()[k];
    scale += std::abs(a.data()[k] * ja.data()[k]);
  }
  CHECK(std::abs(sa) < 1e-13 * scale);
  CHECK(std::abs(sb) < 1e-13 * scale);

  Grid other = Grid::periodic(40, 36, 2 * kPi, 2.0);
  CHECK_THROWS_AS(jacobian(a, ScalarField(other), JacobianScheme::central), InvalidArgument);

  // second order for a smooth pair
  double errs[2];
  for (int r = 0; r < 2; ++r) {
    Grid q = Grid::periodic(32 << r, 32 << r, 2 * kPi, 2 * kPi);
    auto u = ScalarField::from_function(q, [](double x, double y) { return std::sin(x) * std::cos(y); });
    auto v = ScalarField::from_function(q, [](double x, double y) { return std::cos(2 * x + y); });
    auto jj = jacobian(u, v, JacobianScheme::arakawa);
    double e = 0;
    for (int y = 0; y < q.ny; ++y)
      for (int x = 0; x < q.nx; ++x) {
        const double X0 = q.x(x), Y0 = q.y(y);
        const double ux = std::cos(X0) * std::cos(Y0), uy = -std::sin(X0) * std::sin(Y0);
        const double vx = -2 * std::sin(2 * X0 + Y0), vy = -std::sin(2 * X0 + Y0);
        e = std::max(e, std::abs(jj(x, y) - (ux * vy - uy * vx)));
      }
    errs[r] = e;
  }
  CHECK(std::log2(errs[0] / errs[1]) >= 1.9);
}

TEST_CASE("helmholtz_solve") {
  Grid p = Grid::periodic(64, 48, 2 * kPi, 2 * kPi);
  CHECK(helmholtz_solve(ScalarField(p), 0.0, Gauge::zero_mean).max_abs() == 0.0);

  const double k = 2;
  auto s = ScalarField::from_function(p, [&](double x, double) { return std::sin(k * x); });
  const double lk = laplacian_eigenvalue_1d(p.nx, p.dx, 2, Topology::periodic);
  auto u = helmholtz_solve(lk * s, 0.0, Gauge::zero_mean);
  CHECK(max_abs_diff(u, s) < 1e-12);
  const double lam = 0.7;
  auto u2 = helmholtz_solve((lk - 1 / (lam * lam)) * s, 1 / (lam * lam), Gauge::zero_mean);
  CHECK(max_abs_diff(u2, s) < 1e-12);
  // continuous eigen-pair within O(dx^2)
  auto u3 = helmholtz_solve(-(k * k) * s, 0.0, Gauge::zero_mean);
  CHECK(max_abs_diff(u3, s) < 5e-3);

  auto f = smooth_periodic(p);
  for (double c : {0.0, 0.25, 4.0, -0.5}) {
    auto back = helmholtz_solve(laplacian(f) - c * f, c, Gauge::zero_mean);
    CHECK(max_abs_diff(back, f) <= 1e-8 * f.max_abs());
  }
  CHECK_THROWS_AS(helmholtz_solve(ScalarField(p, 1.0), 0.0, Gauge::zero_mean), InvalidArgument);
  CHECK_THROWS_AS(helmholtz_solve(s, 0.0, Gauge::dirichlet_zero), InvalidArgument);
  const double l1 = laplacian_eigenvalue_1d(p.nx, p.dx, 1, Topology::periodic);
  CHECK_THROWS_AS(helmholtz_solve(s, l1, Gauge::zero_mean), InvalidArgument);

  Grid b = Grid::basin(33, 41, -1.0, 1.0, 0.0, 3.0);
  auto w = ScalarField::from_function(b, [&](double x, double y) {
    return std::sin(kPi * (x + 1) / 2) * std::sin(2 * kPi * y / 3) * (1 + 0.3 * x);
  });
  for (int i = 0; i < b.nx; ++i) w(i, 0) = w(i, b.ny - 1) = 0;
  for (int j = 0; j < b.ny; ++j) w(0, j) = w(b.nx - 1, j) = 0;
  for (double c : {0.0, 3.0}) {
    auto back = helmholtz_solve(laplacian(w) - c * w, c, Gauge::dirichlet_zero);
    CHECK(max_abs_diff(back, w) <= 1e-8 * w.max_abs());
  }
  CHECK_THROWS_AS(helmholtz_solve(w, 0.0, Gauge::zero_mean), InvalidArgument);
}

TEST_CASE("simd kernels agree with the scalar reference") {
  if (!simd::isa_available(simd::Isa::avx2)) return;
  const auto saved = simd::active_isa();
  for (auto g : {Grid::periodic(37, 29, 3.0, 2.0), Grid::basin(43, 31, 0.0, 1.0, 0.0, 2.0)}) {
    auto a = random_field(g, 11), b = random_field(g, 12);
    simd::set_isa(simd::Isa::scalar);
    auto l0 = laplacian(a);
    auto c0 = jacobian(a, b, JacobianScheme::central);
    auto r0 = jacobian(a, b, JacobianScheme::arakawa);
    auto x0 = lincomb(0.75, a, 0.25, b);
    simd::set_isa(simd::Isa::avx2);
    CHECK(max_abs_diff(laplacian(a), l0) == 0.0);
    CHECK(max_abs_diff(jacobian(a, b, JacobianScheme::central), c0) == 0.0);
    CHECK(max_abs_diff(jacobian(a, b, JacobianScheme::arakawa), r0) == 0.0);
    CHECK(max_abs_diff(lincomb(0.75, a, 0.25, b), x0) == 0.0);
  }
  simd::set_isa(saved);
}
