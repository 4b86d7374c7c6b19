#include "qg/conservation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "qg/error.hpp"
#include "qg/sampling.hpp"

namespace qg {
namespace {

constexpr double kPi = 3.14159265358979323846;

double fval(const sym::FunctionTable& fns, const std::string& name, double t, int k = 0) {
  auto it = fns.find(name);
  return it == fns.end() ? (k == 0 ? 1.0 : 0.0) : it->second.value(t, k);
}

const ModelIParams& model1(const ModelSpec& m, const char* who) {
  const auto* p = std::get_if<ModelIParams>(&m);
  if (!p) throw InvalidArgument(std::string(who) + ": needs Model I");
  return *p;
}

const ModelIIParams& model2(const ModelSpec& m, const char* who) {
  const auto* p = std::get_if<ModelIIParams>(&m);
  if (!p) throw InvalidArgument(std::string(who) + ": needs Model II");
  return *p;
}

using MFn = decltype(MultiplierSet::fn);

MultiplierSet make_set(std::string id, std::string label, const ModelSpec& m, const sym::FunctionTable& fns, MFn fn) {
  return {std::move(id), std::move(label), m, fns, std::move(fn)};
}

}  // namespace

std::vector<MultiplierSet> builtin_multipliers(const ModelSpec& m, const sym::FunctionTable& fns) {
  validate(m);
  std::vector<MultiplierSet> out;
  if (const auto* p = std::get_if<ModelIParams>(&m)) {
    const double r = p->H2 / p->H1;
    out.push_back(make_set("I.1", "(0, 1)", m, fns, [](auto&, const double*, auto&, double* o) {
      o[0] = 0.0;
      o[1] = 1.0;
    }));
    out.push_back(make_set("I.2", "(psi1, -(H2/H1) psi2)", m, fns, [r](auto&, const double* s, auto&, double* o) {
      o[0] = s[0];
      o[1] = -r * s[1];
    }));
    out.push_back(make_set("I.3", "(F1, (H2/H1) F1)", m, fns, [r](const SpaceTimePoint& q, const double*, auto& f, double* o) {
      const double F = fval(f, "F1", q.t);
      o[0] = F;
      o[1] = r * F;
    }));
    out.push_back(make_set("I.4", "(F2 x, -(H2/H1) x F2)", m, fns, [r](const SpaceTimePoint& q, const double*, auto& f, double* o) {
      const double F = fval(f, "F2", q.t);
      o[0] = F * q.x;
      o[1] = -r * q.x * F;
    }));
    out.push_back(make_set("I.5", "(F3 y, -(H2/H1) y F3)", m, fns, [r](const SpaceTimePoint& q, const double*, auto& f, double* o) {
      const double F = fval(f, "F3", q.t);
      o[0] = F * q.y;
      o[1] = -r * q.y * F;
    }));
    out.push_back(make_set("I.6", "(1/2 (x^2+y^2) F4, -(H2/H1) 1/2 (x^2+y^2) F4)", m, fns,
                           [r](const SpaceTimePoint& q, const double*, auto& f, double* o) {
                             const double h = 0.5 * (q.x * q.x + q.y * q.y) * fval(f, "F4", q.t);
                             o[0] = h;
                             o[1] = -r * h;
                           }));
    return out;
  }
  if (const auto* p = std::get_if<ModelIIParams>(&m)) {
    const double l2 = p->lambda * p->lambda;
    out.push_back(make_set("II.1", "(0, 1)", m, fns, [](auto&, const double*, auto&, double* o) {
      o[0] = 0.0;
      o[1] = 1.0;
    }));
    out.push_back(make_set("II.2", "(psi1, psi2)", m, fns, [](auto&, const double* s, auto&, double* o) {
      o[0] = s[0];
      o[1] = s[1];
    }));
    out.push_back(make_set("II.3", "(J1, J1)", m, fns, [](const SpaceTimePoint& q, const double*, auto& f, double* o) {
      o[0] = o[1] = fval(f, "J1", q.t);
    }));
    out.push_back(make_set("II.4", "(J2 x, J2 x)", m, fns, [](const SpaceTimePoint& q, const double*, auto& f, double* o) {
      o[0] = o[1] = fval(f, "J2", q.t) * q.x;
    }));
    out.push_back(make_set("II.5", "(J3 y, J3 y)", m, fns, [](const SpaceTimePoint& q, const double*, auto& f, double* o) {
      o[0] = o[1] = fval(f, "J3", q.t) * q.y;
    }));
    out.push_back(make_set("II.6", "(1/2 (x^2+y^2) J4, 1/2 (-4 lambda^2 + x^2 + y^2) J4)", m, fns,
                           [l2](const SpaceTimePoint& q, const double*, auto& f, double* o) {
                             const double J = fval(f, "J4", q.t), r2 = q.x * q.x + q.y * q.y;
                             o[0] = 0.5 * r2 * J;
                             o[1] = 0.5 * (-4.0 * l2 + r2) * J;
                           }));
    return out;
  }
  throw InvalidArgument("builtin_multipliers: no multipliers for model " + model_name(kind_of(m)));
}

MultiplierSet negative_control_multiplier(const ModelSpec& m) {
  validate(m);
  if (kind_of(m) == ModelKind::III) throw InvalidArgument("negative_control_multiplier: two-layer models only");
  return make_set(kind_of(m) == ModelKind::I ? "I.control" : "II.control", "(psi2, 0)", m, {},
                  [](auto&, const double* s, auto&, double* o) {
                    o[0] = s[1];
                    o[1] = 0.0;
                  });
}

ConservedVector conserved_vector(const ModelSpec& m, VectorKind which, sym::TimeFunction fn) {
  validate(m);
  ConservedVector T;
  T.kind = which;
  T.model = m;
  T.fn = fn;
  if (which == VectorKind::model1_01) {
    const ModelIParams& p = model1(m, "conserved_vector(model1_01)");
    if (p.rho1 == p.rho2) throw InvalidArgument("conserved_vector: rho1 = rho2 makes g H2 (rho1 - rho2) vanish");
    const double den = p.g * p.H2 * (p.rho1 - p.rho2);
    const double K = p.l * p.l / den, r1 = p.rho1, r2 = p.rho2, l2 = p.l * p.l;
    T.name = "model1_01";
    T.eval = [=](const SpaceTimePoint&, const std::vector<Jet>& j) {
      const Jet &a = j[0], &b = j[1];
      Flux f;
      f.t = K * (r1 * a(0, 0, 0) - r2 * b(0, 0, 0));
      f.x = K * r1 * a(0, 0, 0) * b(0, 0, 1) - b(0, 0, 0) * b(0, 2, 1) + b(1, 1, 0);
      f.y = -(l2 * r1 * a(0, 0, 0) * b(0, 1, 0) +
              den * (b(0, 0, 2) * b(0, 1, 0) - b(0, 0, 1) * b(0, 1, 1) - b(0, 0, 0) * b(0, 3, 0) - b(1, 0, 1))) /
            den;
      return f;
    };
    return T;
  }
  const ModelIIParams& p = model2(m, "conserved_vector(model2_J1)");
  const double L2 = p.lambda * p.lambda;
  const bool corrected = which == VectorKind::model2_J1_corrected;
  const double q = corrected ? -1.0 : 1.0;
  T.name = corrected ? "model2_J1_corrected" : "model2_J1";
  T.eval = [=](const SpaceTimePoint& pt, const std::vector<Jet>& j) {
    const Jet &a = j[0], &b = j[1];
    const double J = fn.value(pt.t, 0), Jp = fn.value(pt.t, 1);
    // a: psi1, b: psi2. The printed first T^x bracket has 3 psi2_x where the coupling needs psi2_y.
    const double c = corrected ? b(0, 0, 1) : b(0, 1, 0);
    Flux f;
    f.t = J / 3.0 * (a(0, 0, 2) + a(0, 2, 0) + b(0, 0, 2) + b(0, 2, 0));
    const double qx1 = -3 * b(0, 0, 0) * a(0, 0, 1) + a(0, 0, 0) * (3 * c + 2 * L2 * (a(0, 0, 3) + a(0, 2, 1))) +
                       4 * L2 * (a(0, 1, 0) * a(0, 1, 1) - a(0, 0, 1) * a(0, 2, 0));
    const double qx2 = -3 * a(0, 0, 0) * b(0, 0, 1) + b(0, 0, 0) * (3 * a(0, 0, 1) + 2 * L2 * (b(0, 0, 3) + b(0, 2, 1))) +
                       4 * L2 * (b(0, 1, 0) * b(0, 1, 1) - b(0, 0, 1) * b(0, 2, 0));
    f.x = (-2 * L2 * Jp * a(0, 1, 0) + J * (q * qx1 + 4 * L2 * a(1, 1, 0))) / (6 * L2) +
          (-2 * L2 * Jp * b(0, 1, 0) + J * (q * qx2 + 4 * L2 * b(1, 1, 0))) / (6 * L2);
    const double qy2 = 3 * a(0, 0, 0) * b(0, 1, 0) - b(0, 0, 0) * (3 * a(0, 1, 0) + 2 * L2 * (b(0, 1, 2) + b(0, 3, 0))) +
                       4 * L2 * (b(0, 0, 2) * b(0, 1, 0) - b(0, 0, 1) * b(0, 1, 1));
    const double qy1 = 3 * b(0, 0, 0) * a(0, 1, 0) + 4 * L2 * a(0, 0, 2) * a(0, 1, 0) - 3 * a(0, 0, 0) * b(0, 1, 0) -
                       4 * L2 * a(0, 0, 1) * a(0, 1, 1) - 2 * L2 * a(0, 0, 0) * a(0, 1, 2) -
                       2 * L2 * a(0, 0, 0) * a(0, 3, 0);
    f.y = (-2 * L2 * Jp * b(0, 0, 1) + J * (q * qy2 + 4 * L2 * b(1, 0, 1))) / (6 * L2) +
          (-2 * L2 * Jp * a(0, 0, 1) + J * (q * qy1 + 4 * L2 * a(1, 0, 1))) / (6 * L2);
    return f;
  };
  return T;
}

MultiplierSet multiplier_of(const ConservedVector& T) {
  if (T.kind == VectorKind::model1_01) return builtin_multipliers(T.model).front();
  sym::FunctionTable f{{"J1", T.fn}};
  return builtin_multipliers(T.model, f)[2];
}

SmoothFields::SmoothFields(int layers, std::uint64_t seed, int modes, double k, double amplitude) {
  if (layers < 1 || modes < 1 || !(k > 0.0)) throw InvalidArgument("SmoothFields: bad shape");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  modes_.resize(layers);
  for (auto& layer : modes_)
    for (int q = 0; q < modes; ++q) {
      Mode md;
      md.a = amplitude * u(rng) / std::sqrt(static_cast<double>(modes));
      md.kx = k * u(rng);
      md.ky = k * u(rng);
      md.w = k * u(rng);
      md.phase = kPi * u(rng);
      layer.push_back(md);
    }
}

Jet SmoothFields::jet(int layer, const SpaceTimePoint& p) const {
  Jet j;
  for (const Mode& md : modes_.at(layer)) {
    const double th = md.kx * p.x + md.ky * p.y + md.w * p.t + md.phase;
    double c[4] = {std::cos(th), -std::sin(th), 0, 0};
    c[2] = -c[0];
    c[3] = -c[1];
    const double pw[2] = {md.a, md.a * md.w};
    const double px[4] = {1.0, md.kx, md.kx * md.kx, md.kx * md.kx * md.kx};
    const double py[4] = {1.0, md.ky, md.ky * md.ky, md.ky * md.ky * md.ky};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 4; ++b)
        for (int e = 0; b + e < 4; ++e) j(a, b, e) += pw[a] * px[b] * py[e] * c[(a + b + e) % 4];
  }
  return j;
}

double SmoothFields::value(int layer, const SpaceTimePoint& p) const {
  double v = 0.0;
  for (const Mode& md : modes_.at(layer)) v += md.a * std::cos(md.kx * p.x + md.ky * p.y + md.w * p.t + md.phase);
  return v;
}

std::vector<ScalarField> SmoothFields::sample(const Grid& g, double t) const {
  std::vector<ScalarField> out;
  for (int l = 0; l < layers(); ++l)
    out.push_back(ScalarField::from_function(g, [&](double x, double y) { return value(l, {t, x, y}); }));
  return out;
}

std::vector<double> pde_lhs(const ModelSpec& m, const std::vector<Jet>& j) {
  if (kind_of(m) == ModelKind::III) throw InvalidArgument("pde_lhs: two-layer models only");
  const Eigen::MatrixXd M = coupling_matrix(m);
  const int n = layer_count(m);
  std::vector<double> g(n);
  for (int l = 0; l < n; ++l) {
    double wt = j[l](1, 2, 0) + j[l](1, 0, 2), wx = j[l](0, 3, 0) + j[l](0, 1, 2), wy = j[l](0, 2, 1) + j[l](0, 0, 3);
    for (int k = 0; k < n; ++k) {
      wt += M(l, k) * j[k](1, 0, 0);
      wx += M(l, k) * j[k](0, 1, 0);
      wy += M(l, k) * j[k](0, 0, 1);
    }
    g[l] = wt + wx * j[l](0, 0, 1) - wy * j[l](0, 1, 0);
  }
  return g;
}

namespace {

// Finite-difference jets of every layer on the snapshot grid; psi_t supplied per layer.
std::vector<std::vector<Jet>> grid_jets(const std::vector<ScalarField>& psi, const std::vector<ScalarField>& psi_t) {
  const Grid& g = psi.front().grid();
  const int n = static_cast<int>(psi.size());
  std::vector<std::vector<Jet>> out(g.size(), std::vector<Jet>(n));
  for (int l = 0; l < n; ++l) {
    const ScalarField& f = psi[l];
    const ScalarField fx = deriv(f, Axis::x, 1), fy = deriv(f, Axis::y, 1);
    const ScalarField fxx = deriv(f, Axis::x, 2), fyy = deriv(f, Axis::y, 2);
    const ScalarField fxy = deriv(fx, Axis::y, 1);
    const ScalarField fxxx = deriv(fxx, Axis::x, 1), fxxy = deriv(fxx, Axis::y, 1);
    const ScalarField fxyy = deriv(fyy, Axis::x, 1), fyyy = deriv(fyy, Axis::y, 1);
    const ScalarField& ft = psi_t[l];
    const ScalarField ftx = deriv(ft, Axis::x, 1), fty = deriv(ft, Axis::y, 1);
    const ScalarField ftxx = deriv(ft, Axis::x, 2), ftyy = deriv(ft, Axis::y, 2);
    for (std::size_t k = 0; k < g.size(); ++k) {
      Jet& j = out[k][l];
      j(0, 0, 0) = f.data()[k];
      j(0, 1, 0) = fx.data()[k];
      j(0, 0, 1) = fy.data()[k];
      j(0, 2, 0) = fxx.data()[k];
      j(0, 1, 1) = fxy.data()[k];
      j(0, 0, 2) = fyy.data()[k];
      j(0, 3, 0) = fxxx.data()[k];
      j(0, 2, 1) = fxxy.data()[k];
      j(0, 1, 2) = fxyy.data()[k];
      j(0, 0, 3) = fyyy.data()[k];
      j(1, 0, 0) = ft.data()[k];
      j(1, 1, 0) = ftx.data()[k];
      j(1, 0, 1) = fty.data()[k];
      j(1, 2, 0) = ftxx.data()[k];
      j(1, 0, 2) = ftyy.data()[k];
    }
  }
  return out;
}

struct FluxFields {
  ScalarField t, x, y;
};

FluxFields flux_fields(const ConservedVector& T, const Grid& g, double time, const std::vector<std::vector<Jet>>& jets) {
  FluxFields f{ScalarField(g), ScalarField(g), ScalarField(g)};
  for (int jy = 0; jy < g.ny; ++jy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const std::size_t k = static_cast<std::size_t>(jy) * g.nx + ix;
      const Flux v = T({time, g.x(ix), g.y(jy)}, jets[k]);
      f.t(ix, jy) = v.t;
      f.x(ix, jy) = v.x;
      f.y(ix, jy) = v.y;
    }
  return f;
}

struct Accum {
  DivergenceRecord rec;
  double sum2 = 0.0;
  std::size_t count = 0;
  void add(double residual, double scale) {
    rec.max = std::max(rec.max, std::abs(residual));
    rec.scale = std::max(rec.scale, scale);
    sum2 += residual * residual;
    ++count;
  }
  DivergenceRecord done() {
    rec.rms = count ? std::sqrt(sum2 / static_cast<double>(count)) : 0.0;
    return rec;
  }
};

void check_kind(const ModelSpec& a, const ModelSpec& b, const char* who) {
  if (kind_of(a) != kind_of(b)) throw InvalidArgument(std::string(who) + ": multiplier and conserved vector belong to different models");
}

}  // namespace

DivergenceRecord divergence_residual(const ConservedVector& T, const std::vector<LayeredState>& snaps, int margin) {
  if (snaps.size() < 3) throw InvalidArgument("divergence_residual: needs at least 3 snapshots");
  const int n = layer_count(T.model);
  const Grid& g = snaps.front().psi.at(0).grid();
  if (static_cast<int>(snaps.front().psi.size()) != n)
    throw InvalidArgument("divergence_residual: trajectory layer count does not match the model");
  const double dt = snaps[1].t - snaps[0].t;
  if (!(dt > 0.0)) throw InvalidArgument("divergence_residual: snapshot times must increase");
  for (std::size_t k = 1; k < snaps.size(); ++k)
    if (std::abs(snaps[k].t - snaps[k - 1].t - dt) > 1e-9 * dt)
      throw InvalidArgument("divergence_residual: snapshots are not uniformly spaced");
  const bool per = g.topology == Topology::periodic;
  if (!per && 2 * margin >= std::min(g.nx, g.ny)) throw InvalidArgument("divergence_residual: margin too wide");
  const std::size_t ns = snaps.size();

  // psi_t: central inside, second-order one-sided at the ends.
  auto psi_t = [&](std::size_t k) {
    std::vector<ScalarField> out;
    for (int l = 0; l < n; ++l) {
      if (k == 0)
        out.push_back(lincomb(-1.5 / dt, snaps[0].psi[l], 1.0, lincomb(2.0 / dt, snaps[1].psi[l], -0.5 / dt, snaps[2].psi[l])));
      else if (k == ns - 1)
        out.push_back(lincomb(1.5 / dt, snaps[k].psi[l], 1.0,
                              lincomb(-2.0 / dt, snaps[k - 1].psi[l], 0.5 / dt, snaps[k - 2].psi[l])));
      else
        out.push_back(lincomb(0.5 / dt, snaps[k + 1].psi[l], -0.5 / dt, snaps[k - 1].psi[l]));
    }
    return out;
  };
  std::vector<FluxFields> flux;
  for (std::size_t k = 0; k < ns; ++k) flux.push_back(flux_fields(T, g, snaps[k].t, grid_jets(snaps[k].psi, psi_t(k))));

  const int i0 = per ? 0 : margin, i1 = per ? g.nx : g.nx - margin;
  const int j0 = per ? 0 : margin, j1 = per ? g.ny : g.ny - margin;
  Accum acc;
  for (std::size_t k = 1; k + 1 < ns; ++k) {
    const ScalarField dx = deriv(flux[k].x, Axis::x, 1), dy = deriv(flux[k].y, Axis::y, 1);
    for (int j = j0; j < j1; ++j)
      for (int i = i0; i < i1; ++i) {
        const double tt = (flux[k + 1].t(i, j) - flux[k - 1].t(i, j)) / (2 * dt);
        acc.add(tt + dx(i, j) + dy(i, j), std::abs(tt) + std::abs(dx(i, j)) + std::abs(dy(i, j)));
      }
  }
  return acc.done();
}

DivergenceRecord divergence_residual(const ConservedVector& T, const Trajectory& traj, int margin) {
  return divergence_residual(T, traj.snapshots, margin);
}

DivergenceRecord multiplier_identity_check(const MultiplierSet& L, const ConservedVector& T, const SmoothFields& fields,
                                           const IdentitySetup& s) {
  check_kind(L.model, T.model, "multiplier_identity_check");
  const int n = layer_count(T.model);
  if (fields.layers() != n) throw InvalidArgument("multiplier_identity_check: field layer count does not match the model");
  const Grid& g = s.patch;
  g.validate();
  if (g.topology != Topology::basin) throw InvalidArgument("multiplier_identity_check: patch must have basin topology");
  if (s.times.empty()) throw InvalidArgument("multiplier_identity_check: no times");
  const double d = s.dt_fd > 0.0 ? s.dt_fd : std::min(g.dx, g.dy);
  auto jets_at = [&](double t) {
    std::vector<std::vector<Jet>> out(g.size(), std::vector<Jet>(n));
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        for (int l = 0; l < n; ++l) out[static_cast<std::size_t>(j) * g.nx + i][l] = fields.jet(l, {t, g.x(i), g.y(j)});
    return out;
  };
  Accum acc;
  std::vector<double> lam(n), psi(n);
  for (double t : s.times) {
    const auto jn = jets_at(t);
    const FluxFields fp = flux_fields(T, g, t + d, jets_at(t + d));
    const FluxFields fm = flux_fields(T, g, t - d, jets_at(t - d));
    const FluxFields fc = flux_fields(T, g, t, jn);
    const ScalarField dx = deriv(fc.x, Axis::x, 1), dy = deriv(fc.y, Axis::y, 1);
    for (int j = 1; j < g.ny - 1; ++j)
      for (int i = 1; i < g.nx - 1; ++i) {
        const auto& jet = jn[static_cast<std::size_t>(j) * g.nx + i];
        for (int l = 0; l < n; ++l) psi[l] = jet[l](0, 0, 0);
        L({t, g.x(i), g.y(j)}, psi.data(), lam.data());
        const auto G = pde_lhs(T.model, jet);
        double lg = 0.0;
        for (int l = 0; l < n; ++l) lg += lam[l] * G[l];
        const double tt = (fp.t(i, j) - fm.t(i, j)) / (2 * d);
        acc.add(lg - (tt + dx(i, j) + dy(i, j)), std::abs(tt) + std::abs(dx(i, j)) + std::abs(dy(i, j)));
      }
  }
  return acc.done();
}

std::vector<std::vector<ScalarField>> compact_perturbation(const EulerSetup& s, int layers, std::uint64_t seed) {
  const Grid& g = s.block;
  const int m = s.margin;
  if (s.levels < 2 * m + 3 || g.nx < 2 * m + 3 || g.ny < 2 * m + 3)
    throw InvalidArgument("compact_perturbation: box too small for the margin");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  // sin^2 windows vanish at index m and at n - 1 - m, so the support stays strictly inside.
  auto window = [m](int k, int n) {
    if (k <= m || k >= n - 1 - m) return 0.0;
    const double s = std::sin(kPi * (k - m) / static_cast<double>(n - 1 - 2 * m));
    return s * s;
  };
  std::vector<std::vector<ScalarField>> phi(s.levels);
  for (int l = 0; l < layers; ++l) {
    const double a = u(rng), b = u(rng), c = u(rng), p = kPi * u(rng);
    for (int n = 0; n < s.levels; ++n) {
      const double wt = window(n, s.levels);
      ScalarField f(g);
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
          f(i, j) = wt * window(i, g.nx) * window(j, g.ny) *
                    (1.0 + 0.5 * std::cos(kPi * (a * i / (g.nx - 1.0) + b * j / (g.ny - 1.0) + c * n / (s.levels - 1.0)) + p));
      phi[n].push_back(std::move(f));
    }
  }
  return phi;
}

double euler_annihilation_check(const MultiplierSet& L, const SmoothFields& fields,
                                const std::vector<std::vector<ScalarField>>& phi, const EulerSetup& s) {
  const ModelSpec& m = L.model;
  const int n = layer_count(m);
  const Grid& g = s.block;
  g.validate();
  if (g.topology != Topology::basin) throw InvalidArgument("euler_annihilation_check: block must have basin topology");
  if (fields.layers() != n) throw InvalidArgument("euler_annihilation_check: field layer count does not match the model");
  if (static_cast<int>(phi.size()) != s.levels) throw InvalidArgument("euler_annihilation_check: perturbation level count");
  const int mg = s.margin;
  if (mg < 3) throw InvalidArgument("euler_annihilation_check: margin must be at least 3");
  double phimax = 0.0;
  for (int lv = 0; lv < s.levels; ++lv) {
    if (static_cast<int>(phi[lv].size()) != n) throw InvalidArgument("euler_annihilation_check: perturbation layer count");
    for (int l = 0; l < n; ++l) {
      const ScalarField& f = phi[lv][l];
      if (!f.grid().same_as(g)) throw InvalidArgument("euler_annihilation_check: perturbation on a different grid");
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          const double v = f(i, j);
          if (v == 0.0) continue;
          if (lv < mg || lv > s.levels - 1 - mg || i < mg || i > g.nx - 1 - mg || j < mg || j > g.ny - 1 - mg)
            throw InvalidArgument("euler_annihilation_check: perturbation touches the " + std::to_string(mg) +
                                  "-cell margin at level " + std::to_string(lv) + ", node (" + std::to_string(i) +
                                  ", " + std::to_string(j) + ")");
          phimax = std::max(phimax, std::abs(v));
        }
    }
  }
  if (phimax == 0.0) return 0.0;
  const double d = s.dt > 0.0 ? s.dt : std::min(g.dx, g.dy);
  std::vector<std::vector<ScalarField>> base(s.levels);
  double psimax = 0.0;
  for (int lv = 0; lv < s.levels; ++lv) {
    base[lv] = fields.sample(g, s.t0 + lv * d);
    for (const auto& f : base[lv]) psimax = std::max(psimax, f.max_abs());
  }
  const double tau = s.tau_rel * std::max(psimax, 1e-300) / phimax;

  // Lambda . G on every summed node of every interior level.
  auto density = [&](double sign) {
    std::vector<std::vector<ScalarField>> psi(s.levels);
    for (int lv = 0; lv < s.levels; ++lv)
      for (int l = 0; l < n; ++l) psi[lv].push_back(lincomb(1.0, base[lv][l], sign * tau, phi[lv][l]));
    std::vector<double> out;
    std::vector<double> lam(n), val(n);
    for (int lv = 1; lv + 1 < s.levels; ++lv) {
      const auto G = pde_operator(m, psi[lv - 1], psi[lv], psi[lv + 1], d, s.scheme);
      const double t = s.t0 + lv * d;
      for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i) {
          for (int l = 0; l < n; ++l) val[l] = psi[lv][l](i, j);
          L({t, g.x(i), g.y(j)}, val.data(), lam.data());
          double acc = 0.0;
          for (int l = 0; l < n; ++l) acc += lam[l] * G[l](i, j);
          out.push_back(acc);
        }
    }
    return out;
  };
  const auto plus = density(1.0), minus = density(-1.0);
  double sum = 0.0, sum_abs = 0.0;
  for (std::size_t k = 0; k < plus.size(); ++k) {
    const double p = (plus[k] - minus[k]) / (2 * tau);
    sum += p;
    sum_abs += std::abs(p);
  }
  return sum_abs > 0.0 ? std::abs(sum) / sum_abs : 0.0;
}

void write_conservation_csv(std::ostream& os, const std::vector<ConservationRow>& rows) {
  os << "model,multiplier_id,check,grid,value,threshold,pass\n";
  char buf[64];
  for (const auto& r : rows) {
    os << r.model << ',' << r.multiplier_id << ',' << r.check << ',' << r.grid << ',';
    std::snprintf(buf, sizeof buf, "%.6e", r.value);
    os << buf << ',';
    std::snprintf(buf, sizeof buf, "%.6e", r.threshold);
    os << buf << ',' << (r.pass ? "PASS" : "FAIL") << '\n';
  }
}

}  // namespace qg
