#include "qg/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qg/error.hpp"

namespace qg {
namespace {

// Lagrange weights on nodes s..s+3 evaluated at u (node units).
void lagrange4(double u, int s, double w[4]) {
  for (int a = 0; a < 4; ++a) {
    double p = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) p *= (u - (s + b)) / static_cast<double>(a - b);
    w[a] = p;
  }
}

double snap(double u) {
  const double r = std::round(u);
  return std::abs(u - r) < 1e-9 ? r : u;
}

// Stencil start for a clamped axis of n nodes (n >= 4).
int clamped_start(double u, int n) {
  const int i = static_cast<int>(std::floor(u));
  return std::clamp(i - 1, 0, n - 4);
}

}  // namespace

TrajectorySampler::TrajectorySampler(std::vector<LayeredState> snapshots, Interpolation mode, int refine) {
  if (snapshots.empty()) throw InvalidArgument("TrajectorySampler: no snapshots");
  const Grid& g = snapshots.front().psi.front().grid();
  if (mode == Interpolation::spectral && g.topology != Topology::periodic)
    throw InvalidArgument("TrajectorySampler: spectral refinement needs a periodic grid");
  t0_ = snapshots.front().t;
  if (snapshots.size() > 1) {
    spacing_ = snapshots[1].t - snapshots[0].t;
    if (!(spacing_ > 0.0)) throw InvalidArgument("TrajectorySampler: snapshot times must increase");
    for (std::size_t k = 0; k < snapshots.size(); ++k) {
      const double expect = t0_ + k * spacing_;
      if (std::abs(snapshots[k].t - expect) > 1e-9 * (std::abs(expect) + spacing_))
        throw InvalidArgument("TrajectorySampler: snapshots are not uniformly spaced in time");
    }
  }
  for (auto& s : snapshots) {
    if (s.psi.size() != snapshots.front().psi.size())
      throw InvalidArgument("TrajectorySampler: layer count changes between snapshots");
    std::vector<ScalarField> layers;
    for (auto& f : s.psi) {
      if (!f.grid().same_as(g)) throw InvalidArgument("TrajectorySampler: snapshots on different grids");
      layers.push_back(mode == Interpolation::spectral ? spectral_refine(f, refine) : std::move(f));
    }
    psi_.push_back(std::move(layers));
  }
  grid_ = psi_.front().front().grid();
  if (grid_.topology == Topology::basin && (grid_.nx < 4 || grid_.ny < 4))
    throw InvalidArgument("TrajectorySampler: basin grid too small for cubic stencils");
}

int TrajectorySampler::layers() const { return static_cast<int>(psi_.front().size()); }

double TrajectorySampler::t_last() const { return t0_ + (psi_.size() - 1) * spacing_; }

bool TrajectorySampler::covers(double t, double x, double y) const {
  const double tt = psi_.size() > 1 ? 1e-9 * spacing_ : 0.0;
  if (psi_.size() > 1 && (t < t0_ - tt || t > t_last() + tt)) return false;
  if (grid_.topology == Topology::periodic) return true;
  const double ex = 1e-9 * grid_.dx, ey = 1e-9 * grid_.dy;
  return x >= grid_.x0 - ex && x <= grid_.x(grid_.nx - 1) + ex && y >= grid_.y0 - ey &&
         y <= grid_.y(grid_.ny - 1) + ey;
}

double TrajectorySampler::space(const ScalarField& f, double x, double y) const {
  const Grid& g = grid_;
  const double u = snap((x - g.x0) / g.dx), v = snap((y - g.y0) / g.dy);
  int si, sj;
  if (g.topology == Topology::periodic) {
    si = static_cast<int>(std::floor(u)) - 1;
    sj = static_cast<int>(std::floor(v)) - 1;
  } else {
    si = clamped_start(u, g.nx);
    sj = clamped_start(v, g.ny);
  }
  double wx[4], wy[4];
  lagrange4(u, si, wx);
  lagrange4(v, sj, wy);
  double acc = 0.0;
  for (int b = 0; b < 4; ++b) {
    if (wy[b] == 0.0) continue;
    int j = sj + b;
    if (g.topology == Topology::periodic) j = ((j % g.ny) + g.ny) % g.ny;
    const double* r = f.row(j);
    double row = 0.0;
    for (int a = 0; a < 4; ++a) {
      if (wx[a] == 0.0) continue;
      int i = si + a;
      if (g.topology == Topology::periodic) i = ((i % g.nx) + g.nx) % g.nx;
      row += wx[a] * r[i];
    }
    acc += wy[b] * row;
  }
  return acc;
}

void TrajectorySampler::sample(double t, double x, double y, double* out) const {
  if (!covers(t, x, y))
    throw InvalidArgument("TrajectorySampler: point (t=" + std::to_string(t) + ", x=" + std::to_string(x) +
                          ", y=" + std::to_string(y) + ") outside the sampled domain");
  const int n = layers();
  const int ns = static_cast<int>(psi_.size());
  if (ns == 1) {
    for (int l = 0; l < n; ++l) out[l] = space(psi_[0][l], x, y);
    return;
  }
  const double u = snap((t - t0_) / spacing_);
  double w[4] = {0, 0, 0, 0};
  int s = 0, m = 4;
  if (ns >= 4) {
    s = clamped_start(u, ns);
    lagrange4(u, s, w);
  } else {
    // Two or three snapshots: Lagrange on all of them.
    m = ns;
    for (int a = 0; a < m; ++a) {
      double p = 1.0;
      for (int b = 0; b < m; ++b)
        if (b != a) p *= (u - b) / static_cast<double>(a - b);
      w[a] = p;
    }
  }
  for (int l = 0; l < n; ++l) {
    double acc = 0.0;
    for (int a = 0; a < m; ++a)
      if (w[a] != 0.0) acc += w[a] * space(psi_[s + a][l], x, y);
    out[l] = acc;
  }
}

std::vector<ScalarField> sample_block(const Sampler& s, const Grid& block, double t) {
  const int n = s.layers();
  std::vector<ScalarField> out(n, ScalarField(block));
  std::vector<double> buf(n);
  for (int j = 0; j < block.ny; ++j)
    for (int i = 0; i < block.nx; ++i) {
      s.sample(t, block.x(i), block.y(j), buf.data());
      for (int l = 0; l < n; ++l) {
        if (!std::isfinite(buf[l])) throw NumericalError("sample_block: sampler returned a non-finite value", buf[l]);
        out[l](i, j) = buf[l];
      }
    }
  return out;
}

ResidualBlock residual_block(const Grid& g, int halo, int margin) {
  g.validate();
  if (halo < 2) throw InvalidArgument("residual_block: halo must be at least 2");
  if (margin < 2 || 2 * margin >= std::min(g.nx, g.ny)) throw InvalidArgument("residual_block: bad wall margin");
  ResidualBlock r;
  r.halo = halo;
  if (g.topology == Topology::periodic) {
    r.i0 = 0, r.i1 = g.nx, r.j0 = 0, r.j1 = g.ny;
  } else {
    r.i0 = margin, r.i1 = g.nx - margin, r.j0 = margin, r.j1 = g.ny - margin;
  }
  r.block.nx = r.i1 - r.i0 + 2 * halo;
  r.block.ny = r.j1 - r.j0 + 2 * halo;
  r.block.dx = g.dx;
  r.block.dy = g.dy;
  r.block.x0 = g.x(r.i0 - halo);
  r.block.y0 = g.y(r.j0 - halo);
  r.block.topology = Topology::basin;
  return r;
}

std::vector<ScalarField> pde_operator(const ModelSpec& m, const std::vector<ScalarField>& psi_prev,
                                      const std::vector<ScalarField>& psi_now,
                                      const std::vector<ScalarField>& psi_next, double d,
                                      JacobianScheme scheme) {
  if (!(d > 0.0)) throw InvalidArgument("pde_operator: time step must be positive");
  const auto wp = potential_vorticity(m, psi_prev);
  const auto wn = potential_vorticity(m, psi_now);
  const auto wf = potential_vorticity(m, psi_next);
  const auto* p3 = std::get_if<ModelIIIParams>(&m);
  const int n = layer_count(m);
  std::vector<ScalarField> out;
  out.reserve(n);
  for (int l = 0; l < n; ++l) {
    ScalarField g = lincomb(0.5 / d, wf[l], -0.5 / d, wp[l]);
    g += jacobian(wn[l], psi_now[l], scheme);
    if (p3) {
      if (p3->A_H != 0.0) g -= p3->A_H * biharmonic(psi_now[l]);
      if (l == 0) {
        const Grid& b = g.grid();
        for (int j = 0; j < b.ny; ++j) {
          const double y = b.y(j);
          if (!(std::abs(y) <= p3->L * (1.0 + 1e-12))) continue;  // halo rows beyond the walls
          const double f = p3->f0 / p3->H1 * ekman_pumping(*p3, y);
          double* r = g.row(j);
          for (int i = 0; i < b.nx; ++i) r[i] -= f;
        }
      }
    }
    out.push_back(std::move(g));
  }
  return out;
}

double default_fd_step(const std::vector<double>& times, double dt_fd) {
  if (dt_fd > 0.0) return dt_fd;
  if (times.empty()) throw InvalidArgument("default_fd_step: no times");
  double gap = INFINITY;
  for (std::size_t k = 1; k < times.size(); ++k) gap = std::min(gap, std::abs(times[k] - times[k - 1]));
  return std::isfinite(gap) && gap > 0.0 ? 1e-3 * gap : 1e-3 * (std::abs(times.front()) + 1.0);
}

double ResidualRecord::overall_max() const {
  double m = 0.0;
  for (double v : max) m = std::max(m, v);
  return m;
}

ResidualRecord pde_residual(const ModelSpec& m, const Sampler& s, const Grid& g,
                            const std::vector<double>& times, double dt_fd, JacobianScheme scheme, int margin) {
  validate(m);
  if (s.layers() != layer_count(m)) throw InvalidArgument("pde_residual: sampler layer count does not match the model");
  if (times.empty()) throw InvalidArgument("pde_residual: no evaluation times");
  dt_fd = default_fd_step(times, dt_fd);
  const ResidualBlock rb = residual_block(g, 2, margin);
  const int n = layer_count(m);
  ResidualRecord rec;
  rec.max.assign(n, 0.0);
  rec.rms.assign(n, 0.0);
  std::size_t count = 0;
  for (double t : times) {
    const auto a = sample_block(s, rb.block, t - dt_fd);
    const auto b = sample_block(s, rb.block, t);
    const auto c = sample_block(s, rb.block, t + dt_fd);
    const auto r = pde_operator(m, a, b, c, dt_fd, scheme);
    for (int l = 0; l < n; ++l)
      for (int j = rb.halo; j < rb.block.ny - rb.halo; ++j)
        for (int i = rb.halo; i < rb.block.nx - rb.halo; ++i) {
          const double v = r[l](i, j);
          rec.max[l] = std::max(rec.max[l], std::abs(v));
          rec.rms[l] += v * v;
        }
    count += static_cast<std::size_t>(rb.block.nx - 2 * rb.halo) * (rb.block.ny - 2 * rb.halo);
  }
  for (double& v : rec.rms) v = std::sqrt(v / static_cast<double>(count));
  return rec;
}

}  // namespace qg
