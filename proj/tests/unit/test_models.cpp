#include <cmath>

#include "doctest.h"
#include "qg/error.hpp"
#include "qg/grid_ops.hpp"
#include "qg/models.hpp"
#include "qg/simulator.hpp"

using namespace qg;

namespace {
const double kPi = 3.14159265358979323846;

double rel_diff(const std::vector<ScalarField>& a, const std::vector<ScalarField>& b) {
  double d = 0, m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, max_abs_diff(a[i], b[i]));
    m = std::max(m, b[i].max_abs());
  }
  return d / m;
}
}  // namespace

TEST_CASE("table1 preset and derived basin width") {
  auto p = ModelIIIParams::table1();
  CHECK(p.f0 == 1.0e-4);
  CHECK(p.beta0 == 1.6e-11);
  CHECK(p.rho0 == 1.0e3);
  CHECK(p.H1 == 600.0);
  CHECK(p.H2 == 1400.0);
  CHECK(p.H3 == 2000.0);
  CHECK(p.gp1 == 0.02);
  CHECK(p.gp2 == 0.03);
  CHECK(p.A_H == 300.0);
  CHECK(p.tau0 == 0.1);
  CHECK(p.mu0 == 2.5e-6);
  CHECK(p.alpha == 0.0);
  CHECK(p.L == doctest::Approx(1.2566e6).epsilon(1e-4));
  CHECK_NOTHROW(p.validate());
  p.mu0 *= 1.01;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("parameter invariants") {
  ModelIParams a;
  a.rho1 = 2;
  a.rho2 = 1;
  CHECK_THROWS_AS(a.validate(), InvalidArgument);
  ModelIIParams b{-1.0};
  CHECK_THROWS_AS(b.validate(), InvalidArgument);
  auto c = ModelIIIParams::table1();
  c.alpha = 1.5;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("potential vorticity examples") {
  Grid g = Grid::periodic(32, 32, 2 * kPi, 2 * kPi);
  ModelIParams p1 = ModelIParams::unit();
  const double Psi = 1.7;
  auto w = potential_vorticity(p1, {ScalarField(g, Psi), ScalarField(g, Psi)});
  CHECK(w[0].max_abs() == 0.0);
  CHECK(w[1](3, 5) == doctest::Approx(p1.eps2() * Psi * (1 - p1.rho1 / p1.rho2)));

  ModelIIParams p2{0.8};
  const double k = 2, A = 0.6;
  auto s = ScalarField::from_function(g, [&](double x, double) { return A * std::sin(k * x); });
  auto w2 = potential_vorticity(p2, {s, ScalarField(g)});
  const double lk = laplacian_eigenvalue_1d(g.nx, g.dx, 2, Topology::periodic);
  const double il2 = 1 / (p2.lambda * p2.lambda);
  for (int i = 0; i < g.nx; ++i) {
    CHECK(w2[0](i, 4) == doctest::Approx((lk - il2) * s(i, 4)).epsilon(1e-12));
    CHECK(w2[1](i, 4) == doctest::Approx(il2 * s(i, 4)).epsilon(1e-12));
  }
  // against the continuous eigenvalue, O(dx^2)
  CHECK(std::abs(lk + k * k) < 0.06);
  auto back = invert_pv(p2, w2);
  CHECK(max_abs_diff(back[0], s) < 1e-12);
  CHECK(back[1].max_abs() < 1e-12);

  auto p3 = ModelIIIParams::table1();
  Grid b = default_grid(p3);
  auto w3 = potential_vorticity(p3, {ScalarField(b), ScalarField(b), ScalarField(b)});
  for (int l = 0; l < 3; ++l)
    for (int j = 0; j < b.ny; j += 7) CHECK(w3[l](5, j) == p3.beta0 * b.y(j));
  auto z = invert_pv(p3, w3);
  for (auto& f : z) CHECK(f.max_abs() == 0.0);

  CHECK_THROWS_AS(potential_vorticity(p2, {s}), InvalidArgument);
}

TEST_CASE("model I and model II coupling share structure") {
  // eps1 = eps2 = 1/lambda^2, alpha2 = 1: layer 1 agrees, layer 2 coupling flips sign
  Grid g = Grid::periodic(16, 16, 1.0, 1.0);
  auto psi = random_bandlimited(g, 2, 3, 3, 1.0);
  ModelIIParams p2{0.5};
  const double s = 1 / (p2.lambda * p2.lambda);
  auto w2 = potential_vorticity(p2, psi);
  auto lap1 = laplacian(psi[0]), lap2 = laplacian(psi[1]);
  for (std::size_t k = 0; k < lap1.size(); ++k) {
    const double d = psi[1].data()[k] - psi[0].data()[k];
    const double m1_layer1 = lap1.data()[k] + s * d;
    const double m1_layer2 = lap2.data()[k] + s * d;
    CHECK(w2[0].data()[k] == doctest::Approx(m1_layer1).epsilon(1e-12));
    CHECK(m1_layer2 - lap2.data()[k] == doctest::Approx(-(w2[1].data()[k] - lap2.data()[k])).epsilon(1e-12));
  }
}

TEST_CASE("PV round trip on random band-limited fields") {
  for (ModelKind k : {ModelKind::I, ModelKind::II, ModelKind::III}) {
    ModelSpec m = k == ModelKind::I ? ModelSpec{ModelIParams{}}
                  : k == ModelKind::II ? ModelSpec{ModelIIParams{}}
                                       : ModelSpec{ModelIIIParams::table1()};
    Grid g = default_grid(m);
    auto psi = random_bandlimited(g, layer_count(m), 42, 6, 1e4);
    auto back = invert_pv(m, potential_vorticity(m, psi));
    CHECK(rel_diff(back, psi) <= 1e-8);
  }
  auto mu = ModelIParams::unit();
  Grid g = Grid::periodic(64, 64, 2 * kPi, 2 * kPi);
  auto psi = random_bandlimited(g, 2, 5, 5, 1.0);
  CHECK(rel_diff(invert_pv(mu, potential_vorticity(mu, psi)), psi) <= 1e-8);
}

TEST_CASE("barotropic mean is rejected") {
  Grid g = Grid::periodic(16, 16, 1.0, 1.0);
  std::vector<ScalarField> w{ScalarField(g, 1.0), ScalarField(g, 1.0)};
  CHECK_THROWS_AS(invert_pv(ModelIIParams{0.3}, w), InvalidArgument);
}

TEST_CASE("tendency examples") {
  Grid g = Grid::periodic(32, 32, 2 * kPi, 2 * kPi);
  auto c = make_state(ModelIParams::unit(), 0.0, {ScalarField(g, 1.0), ScalarField(g, -2.0)});
  for (auto& f : tendency(ModelIParams::unit(), c)) CHECK(f.max_abs() == 0.0);

  auto s = ScalarField::from_function(g, [](double x, double) { return 0.4 * std::sin(3 * x); });
  auto st = make_state(ModelIIParams::unit(), 0.0, {s, s});
  for (auto& f : tendency(ModelIIParams::unit(), st)) CHECK(f.max_abs() < 1e-15);

  auto p3 = ModelIIIParams::table1();
  Grid b = default_grid(p3);
  auto rest = initial_state(p3, b, {});
  auto t = tendency(p3, rest);
  for (int j = 1; j < b.ny - 1; ++j)
    CHECK(t[0](7, j) == doctest::Approx(p3.f0 / p3.H1 * p3.mu0 * std::sin(kPi * b.y(j) / p3.L)));
  CHECK(t[1].max_abs() == 0.0);
  CHECK(t[2].max_abs() == 0.0);

  // x translation equivariance on periodic grids
  auto psi = random_bandlimited(g, 2, 9, 4, 1.0);
  auto m = ModelIIParams::unit();
  auto base = tendency(m, make_state(m, 0.0, psi));
  std::vector<ScalarField> shifted;
  for (auto& f : psi) {
    ScalarField h(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) h((i + 1) % g.nx, j) = f(i, j);
    shifted.push_back(h);
  }
  auto moved = tendency(m, make_state(m, 0.0, shifted));
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) CHECK(moved[0]((i + 1) % g.nx, j) == base[0](i, j));
}

TEST_CASE("model III tendency preserves y-antisymmetry") {
  auto p = ModelIIIParams::table1();
  Grid b = default_grid(p, 33);
  auto psi = random_bandlimited(b, 3, 4, 4, 1e4);
  for (auto& f : psi)
    for (int j = 0; j < b.ny; ++j)
      for (int i = 0; i < b.nx; ++i) {
        const double odd = 0.5 * (f(i, j) - f(i, b.ny - 1 - j));
        f(i, j) = odd;
      }
  for (auto& f : psi)
    for (int j = 0; j < b.ny / 2; ++j)
      for (int i = 0; i < b.nx; ++i) f(i, b.ny - 1 - j) = -f(i, j);
  auto t = tendency(p, make_state(p, 0.0, psi));
  for (auto& f : t) {
    double d = 0;
    for (int j = 0; j < b.ny; ++j)
      for (int i = 0; i < b.nx; ++i) d = std::max(d, std::abs(f(i, j) + f(i, b.ny - 1 - j)));
    CHECK(d <= 1e-12 * f.max_abs());
  }
}

TEST_CASE("wind stress and Ekman pumping") {
  auto p = ModelIIIParams::table1();
  CHECK(wind_stress(p, 0.0) == doctest::Approx(0.1));
  CHECK(wind_stress(p, p.L) == doctest::Approx(-0.1));
  CHECK(std::abs(wind_stress(p, p.L / 2)) < 1e-15);
  CHECK(ekman_pumping(p, 0.0) == 0.0);
  CHECK(ekman_pumping(p, p.L / 2) == doctest::Approx(2.5e-6));
  CHECK_THROWS_AS(wind_stress(p, 1.1 * p.L), InvalidArgument);
  CHECK_THROWS_AS(ekman_pumping(p, -1.1 * p.L), InvalidArgument);
  for (double alpha : {0.0, 0.3, 1.0}) {
    p.alpha = alpha;
    for (int k = -10; k <= 10; ++k) {
      const double y = 0.1 * k * p.L, L = p.L, a = kPi * y / L;
      // d tau / dy by hand
      const double dtau = p.tau0 * ((-2 * alpha / L) * std::cos(a) - (1 - 2 * alpha * y / L) * (kPi / L) * std::sin(a) +
                                    (2 * alpha / kPi) * (kPi / L) * std::cos(a));
      CHECK(ekman_pumping(p, y) == doctest::Approx(-dtau / (p.rho0 * p.f0)).epsilon(1e-9));
    }
  }
  p.alpha = 0;
  Grid b = default_grid(p, 16);
  auto psi = random_bandlimited(b, 3, 1, 2, 1.0);
  auto d = diagnostic_fields(p, psi);
  CHECK(d.h[0](3, 4) == doctest::Approx(p.f0 * (psi[0](3, 4) - psi[1](3, 4)) / p.gp1));
  CHECK(d.h[1](5, 6) == doctest::Approx(p.f0 * (psi[1](5, 6) - psi[2](5, 6)) / p.gp2));
  CHECK(d.tau_x.size() == 16);
}
