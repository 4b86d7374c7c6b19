#include "qg/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "qg/error.hpp"
#include "qg/grid_ops.hpp"

namespace qg {
namespace {

const double kPi = 3.14159265358979323846;
const double kBlowUp = 1e15;

void check_blowup(const LayeredState& s, std::int64_t index) {
  double worst = 0.0;
  bool finite = true;
  for (const auto* set : {&s.psi, &s.omega})
    for (const auto& f : *set)
      for (double v : f.values()) {
        if (!std::isfinite(v)) finite = false;
        else worst = std::max(worst, std::abs(v));
      }
  if (!finite || worst > kBlowUp) {
    std::ostringstream os;
    os << "simulation blew up at step " << index << " (max |value| " << (finite ? worst : INFINITY) << ")";
    throw NumericalError(os.str(), finite ? worst : INFINITY, index);
  }
}

void reset_wall_pv(const ModelSpec& m, std::vector<ScalarField>& omega) {
  if (kind_of(m) != ModelKind::III) return;
  const double beta = planetary_gradient(m);
  for (auto& w : omega) {
    const Grid& g = w.grid();
    for (int i = 0; i < g.nx; ++i) {
      w(i, 0) = beta * g.y(0);
      w(i, g.ny - 1) = beta * g.y(g.ny - 1);
    }
    for (int j = 0; j < g.ny; ++j) w(0, j) = w(g.nx - 1, j) = beta * g.y(j);
  }
}

LayeredState stage(const ModelSpec& m, double t, std::vector<ScalarField> omega) {
  reset_wall_pv(m, omega);
  LayeredState s;
  s.t = t;
  s.psi = invert_pv(m, omega, true);
  s.omega = std::move(omega);
  return s;
}

}  // namespace

std::vector<ScalarField> random_bandlimited(const Grid& g, int layers, std::uint64_t seed, int kmax,
                                            double amplitude) {
  if (kmax < 1) throw InvalidArgument("random_bandlimited: kmax must be at least 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<ScalarField> out;
  const bool per = g.topology == Topology::periodic;
  for (int layer = 0; layer < layers; ++layer) {
    ScalarField f(g);
    if (per) {
      const double ax = 2 * kPi / g.length_x(), ay = 2 * kPi / g.length_y();
      for (int ky = 0; ky <= kmax; ++ky)
        for (int kx = -kmax; kx <= kmax; ++kx) {
          if (ky == 0 && kx <= 0) continue;
          const double a = u(rng), b = u(rng);
          for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
              const double ph = ax * kx * (i * g.dx) + ay * ky * (j * g.dy);
              f(i, j) += a * std::cos(ph) + b * std::sin(ph);
            }
        }
    } else {
      for (int q = 1; q <= kmax; ++q)
        for (int p = 1; p <= kmax; ++p) {
          const double a = u(rng);
          for (int j = 0; j < g.ny; ++j) {
            const double sy = std::sin(q * kPi * j / (g.ny - 1.0));
            for (int i = 0; i < g.nx; ++i) f(i, j) += a * std::sin(p * kPi * i / (g.nx - 1.0)) * sy;
          }
        }
      for (int i = 0; i < g.nx; ++i) f(i, 0) = f(i, g.ny - 1) = 0.0;
      for (int j = 0; j < g.ny; ++j) f(0, j) = f(g.nx - 1, j) = 0.0;
    }
    const double m = f.max_abs();
    if (m > 0.0) f *= amplitude / m;
    out.push_back(std::move(f));
  }
  return out;
}

LayeredState initial_state(const ModelSpec& m, const Grid& g, const InitialPreset& preset) {
  validate(m);
  g.validate();
  const int n = layer_count(m);
  std::vector<ScalarField> psi;
  if (preset.kind == InitialPreset::Kind::rest)
    psi.assign(n, ScalarField(g));
  else
    psi = random_bandlimited(g, n, preset.seed, preset.kmax, preset.amplitude);
  return make_state(m, 0.0, std::move(psi));
}

LayeredState step(const ModelSpec& m, const LayeredState& s, double dt, std::int64_t index) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("step: dt must be positive");
  const int n = layer_count(m);
  auto k1 = tendency(m, s);
  std::vector<ScalarField> w1;
  for (int i = 0; i < n; ++i) w1.push_back(lincomb(1.0, s.omega[i], dt, k1[i]));
  LayeredState s1 = stage(m, s.t + dt, std::move(w1));

  auto k2 = tendency(m, s1);
  std::vector<ScalarField> w2;
  for (int i = 0; i < n; ++i)
    w2.push_back(lincomb(0.75, s.omega[i], 0.25, lincomb(1.0, s1.omega[i], dt, k2[i])));
  LayeredState s2 = stage(m, s.t + 0.5 * dt, std::move(w2));

  auto k3 = tendency(m, s2);
  std::vector<ScalarField> w3;
  for (int i = 0; i < n; ++i)
    w3.push_back(lincomb(1.0 / 3.0, s.omega[i], 2.0 / 3.0, lincomb(1.0, s2.omega[i], dt, k3[i])));
  LayeredState out = stage(m, s.t + dt, std::move(w3));
  check_blowup(out, index);
  return out;
}

Diagnostics diagnostics(const ModelSpec& m, const LayeredState& s) {
  const int n = layer_count(m);
  if (static_cast<int>(s.psi.size()) != n || static_cast<int>(s.omega.size()) != n)
    throw InvalidArgument("diagnostics: layer count mismatch");
  Diagnostics d;
  const Grid& g = s.psi.front().grid();
  const double area = g.dx * g.dy;
  for (int i = 0; i < n; ++i) {
    const auto px = deriv(s.psi[i], Axis::x, 1), py = deriv(s.psi[i], Axis::y, 1);
    double e = 0.0, z = 0.0;
    for (std::size_t k = 0; k < px.size(); ++k) {
      const double g2 = px.data()[k] * px.data()[k] + py.data()[k] * py.data()[k];
      e += g2;
      d.max_grad = std::max(d.max_grad, std::sqrt(g2));
      z += s.omega[i].data()[k] * s.omega[i].data()[k];
    }
    d.energy.push_back(0.5 * e * area);
    d.enstrophy.push_back(0.5 * z * area);
    d.mean_pv.push_back(s.omega[i].mean());
  }
  return d;
}

double total_energy(const ModelSpec& m, const LayeredState& s) {
  std::vector<double> w(layer_count(m), 1.0);
  if (auto* p = std::get_if<ModelIParams>(&m)) w[1] = -p->H2 / p->H1;
  const double beta = planetary_gradient(m);
  const Grid& g = s.psi.front().grid();
  double e = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    double acc = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int k = 0; k < g.nx; ++k) acc += s.psi[i](k, j) * (s.omega[i](k, j) - beta * g.y(j));
    e += w[i] * acc;
  }
  return -0.5 * e * g.dx * g.dy;
}

double cfl_limit(const LayeredState& s) {
  double vmax = 0.0;
  for (const auto& p : s.psi) {
    const auto px = deriv(p, Axis::x, 1), py = deriv(p, Axis::y, 1);
    for (std::size_t k = 0; k < px.size(); ++k)
      vmax = std::max(vmax, std::hypot(px.data()[k], py.data()[k]));
  }
  const Grid& g = s.psi.front().grid();
  return vmax > 0.0 ? 0.5 * std::min(g.dx, g.dy) / vmax : INFINITY;
}

double default_dt(const ModelSpec& m, const LayeredState& s) {
  const double lim = cfl_limit(s);
  if (std::isfinite(lim)) {
    const double dt = 0.25 * lim;
    return kind_of(m) == ModelKind::III ? std::min(dt, 3600.0) : dt;
  }
  if (kind_of(m) == ModelKind::III) return 3600.0;
  const Grid& g = s.psi.front().grid();
  return 0.125 * std::min(g.dx, g.dy);  // as if |u| were 1 m/s
}

std::string cfl_warning(const LayeredState& s, double dt) {
  const double lim = cfl_limit(s);
  if (dt <= lim) return {};
  std::ostringstream os;
  os << "dt = " << dt << " exceeds the advective CFL estimate " << lim;
  return os.str();
}

Trajectory run(const SimConfig& c, const SnapshotObserver& observer, bool keep_snapshots) {
  validate(c.model);
  if (c.nsteps < 0) throw InvalidArgument("run: nsteps must be non-negative");
  if (c.output_every < 1) throw InvalidArgument("run: output_every must be at least 1");
  if (!(c.dt > 0.0)) throw InvalidArgument("run: dt must be positive");
  LayeredState s = c.initial ? *c.initial : initial_state(c.model, c.grid, c.preset);
  Trajectory tr;
  tr.spacing = c.dt * static_cast<double>(c.output_every);
  const double t0 = s.t;
  auto emit = [&](std::int64_t k) {
    tr.diagnostics.push_back({k, s.t, diagnostics(c.model, s)});
    if (k % c.output_every == 0) {
      if (observer) observer(s, k);
      if (keep_snapshots) tr.snapshots.push_back(s);
    }
  };
  emit(0);
  for (std::int64_t k = 1; k <= c.nsteps; ++k) {
    s = step(c.model, s, c.dt, k);
    s.t = t0 + static_cast<double>(k) * c.dt;
    emit(k);
  }
  return tr;
}

}  // namespace qg
