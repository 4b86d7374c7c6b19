#include "qg/models.hpp"

#include <cmath>
#include <string>

#include "qg/error.hpp"
#include "qg/grid_ops.hpp"

namespace qg {
namespace {

const double kPi = 3.14159265358979323846;

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidArgument(msg);
}

bool finite_all(std::initializer_list<double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

void require_layers(const ModelSpec& m, const std::vector<ScalarField>& f, const char* what) {
  const int n = layer_count(m);
  if (static_cast<int>(f.size()) != n)
    throw InvalidArgument(std::string(what) + ": model " + model_name(kind_of(m)) + " has " +
                          std::to_string(n) + " layers, got " + std::to_string(f.size()));
  for (const auto& x : f)
    if (!x.grid().same_as(f.front().grid())) throw InvalidArgument(std::string(what) + ": layers on different grids");
  if (kind_of(m) == ModelKind::III && f.front().grid().topology != Topology::basin)
    throw InvalidArgument(std::string(what) + ": model III lives on a basin grid");
}

ScalarField model_laplacian(const ScalarField& psi) {
  ScalarField lap = laplacian(psi);
  const Grid& g = psi.grid();
  if (g.topology == Topology::basin) {
    for (int i = 0; i < g.nx; ++i) lap(i, 0) = lap(i, g.ny - 1) = 0.0;
    for (int j = 0; j < g.ny; ++j) lap(0, j) = lap(g.nx - 1, j) = 0.0;
  }
  return lap;
}

void zero_walls(ScalarField& f) {
  const Grid& g = f.grid();
  if (g.topology != Topology::basin) return;
  for (int i = 0; i < g.nx; ++i) f(i, 0) = f(i, g.ny - 1) = 0.0;
  for (int j = 0; j < g.ny; ++j) f(0, j) = f(g.nx - 1, j) = 0.0;
}

void add_beta_y(ScalarField& f, double beta, double sign) {
  if (beta == 0.0) return;
  const Grid& g = f.grid();
  for (int j = 0; j < g.ny; ++j) {
    const double b = sign * beta * g.y(j);
    double* r = f.row(j);
    for (int i = 0; i < g.nx; ++i) r[i] += b;
  }
}

}  // namespace

std::string model_name(ModelKind k) {
  switch (k) {
    case ModelKind::I: return "I";
    case ModelKind::II: return "II";
    case ModelKind::III: return "III";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "I" || s == "1") return ModelKind::I;
  if (s == "II" || s == "2") return ModelKind::II;
  if (s == "III" || s == "3") return ModelKind::III;
  throw InvalidArgument("unknown model '" + s + "' (expected I, II or III)");
}

void ModelIParams::validate() const {
  require(finite_all({rho1, rho2, H1, H2, l, g}), "model I: parameters must be finite");
  require(rho1 > 0.0 && rho1 < rho2, "model I: densities must satisfy 0 < rho1 < rho2");
  require(H1 > 0.0 && H2 > 0.0, "model I: layer thicknesses must be positive");
  require(g > 0.0, "model I: g must be positive");
}

ModelIParams ModelIParams::unit() {
  ModelIParams p;
  p.rho1 = 1.0;
  p.rho2 = 2.0;
  p.H1 = 1.0;
  p.H2 = 2.0;
  p.l = 0.5;
  p.g = 1.0;
  return p;
}

void ModelIIParams::validate() const {
  require(std::isfinite(lambda) && lambda > 0.0, "model II: lambda must be positive");
}

double ModelIIIParams::derived_L(double tau0, double rho0, double f0, double mu0) {
  return kPi * tau0 / (rho0 * f0 * mu0);
}

ModelIIIParams ModelIIIParams::table1() {
  ModelIIIParams p;
  p.f0 = 1.0e-4;
  p.beta0 = 1.6e-11;
  p.rho0 = 1.0e3;
  p.H1 = 600.0;
  p.H2 = 1400.0;
  p.H3 = 2000.0;
  p.gp1 = 2.0e-2;
  p.gp2 = 3.0e-2;
  p.A_H = 300.0;
  p.tau0 = 1.0e-1;
  p.mu0 = 2.5e-6;
  p.alpha = 0.0;
  p.L = derived_L(p.tau0, p.rho0, p.f0, p.mu0);
  return p;
}

void ModelIIIParams::validate() const {
  require(finite_all({f0, beta0, rho0, H1, H2, H3, gp1, gp2, A_H, tau0, mu0, alpha, L}),
          "model III: parameters must be finite");
  require(H1 > 0.0 && H2 > 0.0 && H3 > 0.0, "model III: layer thicknesses must be positive");
  require(gp1 > 0.0 && gp2 > 0.0, "model III: reduced gravities must be positive");
  require(A_H >= 0.0, "model III: A_H must be non-negative");
  require(alpha >= 0.0 && alpha <= 1.0, "model III: alpha must lie in [0, 1]");
  require(L > 0.0, "model III: L must be positive");
  require(f0 != 0.0 && rho0 > 0.0, "model III: f0 must be nonzero and rho0 positive");
  const double mu = kPi * tau0 / (rho0 * f0 * L);
  require(std::abs(mu - mu0) <= 1e-6 * std::abs(mu0),
          "model III: mu0 must equal pi tau0 / (rho0 f0 L) to 1e-6");
}

ModelKind kind_of(const ModelSpec& m) {
  return static_cast<ModelKind>(m.index());
}

int layer_count(ModelKind k) { return k == ModelKind::III ? 3 : 2; }
int layer_count(const ModelSpec& m) { return layer_count(kind_of(m)); }

void validate(const ModelSpec& m) {
  std::visit([](const auto& p) { p.validate(); }, m);
}

Eigen::MatrixXd coupling_matrix(const ModelSpec& m) {
  if (auto* p = std::get_if<ModelIParams>(&m)) {
    Eigen::MatrixXd M(2, 2);
    const double e1 = p->eps1(), e2 = p->eps2();
    M << -e1, e1, -e2 * p->alpha2(), e2;
    return M;
  }
  if (auto* p = std::get_if<ModelIIParams>(&m)) {
    const double s = 1.0 / (p->lambda * p->lambda);
    Eigen::MatrixXd M(2, 2);
    M << -s, s, s, -s;
    return M;
  }
  const auto& p = std::get<ModelIIIParams>(m);
  const double f2 = p.f0 * p.f0;
  const double a1 = f2 / (p.H1 * p.gp1), b1 = f2 / (p.H2 * p.gp1), b2 = f2 / (p.H2 * p.gp2),
               c2 = f2 / (p.H3 * p.gp2);
  Eigen::MatrixXd M(3, 3);
  M << -a1, a1, 0.0, b1, -(b1 + b2), b2, 0.0, c2, -c2;
  return M;
}

double planetary_gradient(const ModelSpec& m) {
  if (auto* p = std::get_if<ModelIIIParams>(&m)) return p->beta0;
  return 0.0;
}

Grid default_grid(const ModelSpec& m, int n) {
  if (auto* p = std::get_if<ModelIIIParams>(&m)) return Grid::basin(n, n, -p->L, p->L, -p->L, p->L);
  return Grid::periodic(n, n, 1.0e6, 1.0e6);
}

std::vector<ScalarField> potential_vorticity(const ModelSpec& m, const std::vector<ScalarField>& psi) {
  require_layers(m, psi, "potential_vorticity");
  const Eigen::MatrixXd M = coupling_matrix(m);
  const int n = layer_count(m);
  std::vector<ScalarField> w;
  w.reserve(n);
  for (int i = 0; i < n; ++i) {
    ScalarField wi = model_laplacian(psi[i]);
    for (int k = 0; k < n; ++k) {
      const double c = M(i, k);
      if (c == 0.0) continue;
      auto dst = wi.values();
      auto src = psi[k].values();
      for (std::size_t q = 0; q < dst.size(); ++q) dst[q] += c * src[q];
    }
    add_beta_y(wi, planetary_gradient(m), 1.0);
    w.push_back(std::move(wi));
  }
  return w;
}

std::vector<ScalarField> invert_pv(const ModelSpec& m, const std::vector<ScalarField>& omega,
                                   bool betay_included) {
  require_layers(m, omega, "invert_pv");
  const int n = layer_count(m);
  const Grid& g = omega.front().grid();
  const Eigen::MatrixXd M = coupling_matrix(m);
  Eigen::EigenSolver<Eigen::MatrixXd> es(M);
  const double mnorm = M.cwiseAbs().maxCoeff();
  if (es.eigenvalues().imag().cwiseAbs().maxCoeff() > 1e-12 * mnorm)
    throw InvalidArgument("invert_pv: coupling matrix has complex vertical modes");
  const Eigen::VectorXd d = es.eigenvalues().real();
  const Eigen::MatrixXd P = es.eigenvectors().real();
  const Eigen::MatrixXd Pinv = P.inverse();

  std::vector<ScalarField> q(omega);
  if (betay_included)
    for (auto& qi : q) add_beta_y(qi, planetary_gradient(m), -1.0);

  const Gauge gauge = g.topology == Topology::periodic ? Gauge::zero_mean : Gauge::dirichlet_zero;
  std::vector<ScalarField> phi;
  for (int mode = 0; mode < n; ++mode) {
    ScalarField qm(g);
    for (int i = 0; i < n; ++i) {
      const double c = Pinv(mode, i);
      auto dst = qm.values();
      auto src = q[i].values();
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += c * src[k];
    }
    const double shift = std::abs(d(mode)) <= 1e-10 * mnorm ? 0.0 : -d(mode);
    try {
      phi.push_back(helmholtz_solve(qm, shift, gauge));
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("invert_pv: vertical mode " + std::to_string(mode) + " (eigenvalue " +
                            std::to_string(d(mode)) + ") not invertible: " + e.what());
    }
  }
  std::vector<ScalarField> psi;
  for (int i = 0; i < n; ++i) {
    ScalarField pi(g);
    for (int mode = 0; mode < n; ++mode) {
      const double c = P(i, mode);
      auto dst = pi.values();
      auto src = phi[mode].values();
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += c * src[k];
    }
    zero_walls(pi);
    psi.push_back(std::move(pi));
  }
  return psi;
}

ScalarField free_slip_biharmonic(const ScalarField& psi) {
  ScalarField out = laplacian(model_laplacian(psi));
  zero_walls(out);
  return out;
}

std::vector<ScalarField> tendency(const ModelSpec& m, const LayeredState& s) {
  require_layers(m, s.psi, "tendency");
  require_layers(m, s.omega, "tendency");
  if (!s.psi.front().grid().same_as(s.omega.front().grid()))
    throw InvalidArgument("tendency: psi and omega on different grids");
  const int n = layer_count(m);
  std::vector<ScalarField> out;
  out.reserve(n);
  const auto* p3 = std::get_if<ModelIIIParams>(&m);
  for (int i = 0; i < n; ++i) {
    ScalarField t = jacobian(s.omega[i], s.psi[i], JacobianScheme::arakawa);
    t *= -1.0;
    if (p3) {
      if (p3->A_H != 0.0) {
        ScalarField b = free_slip_biharmonic(s.psi[i]);
        auto dst = t.values();
        auto src = b.values();
        for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += p3->A_H * src[k];
      }
      if (i == 0) {
        const Grid& g = t.grid();
        for (int j = 0; j < g.ny; ++j) {
          const double f = p3->f0 / p3->H1 * ekman_pumping(*p3, g.y(j));
          double* r = t.row(j);
          for (int k = 0; k < g.nx; ++k) r[k] += f;
        }
      }
      zero_walls(t);
    }
    out.push_back(std::move(t));
  }
  return out;
}

static void require_in_basin(const ModelIIIParams& p, double y, const char* what) {
  if (!(std::abs(y) <= p.L * (1.0 + 1e-12)))
    throw InvalidArgument(std::string(what) + ": y = " + std::to_string(y) + " outside [-L, L]");
}

double wind_stress(const ModelIIIParams& p, double y) {
  require_in_basin(p, y, "wind_stress");
  const double a = kPi * y / p.L;
  return p.tau0 * ((1.0 - 2.0 * p.alpha * y / p.L) * std::cos(a) + (2.0 * p.alpha / kPi) * std::sin(a));
}

double ekman_pumping(const ModelIIIParams& p, double y) {
  require_in_basin(p, y, "ekman_pumping");
  return p.mu0 * (1.0 - 2.0 * p.alpha * y / p.L) * std::sin(kPi * y / p.L);
}

DiagnosticFields diagnostic_fields(const ModelIIIParams& p, const std::vector<ScalarField>& psi) {
  require_layers(ModelSpec{p}, psi, "diagnostic_fields");
  DiagnosticFields d;
  d.h.push_back((p.f0 / p.gp1) * (psi[0] - psi[1]));
  d.h.push_back((p.f0 / p.gp2) * (psi[1] - psi[2]));
  const Grid& g = psi.front().grid();
  for (int j = 0; j < g.ny; ++j) {
    d.tau_x.push_back(wind_stress(p, g.y(j)));
    d.omega_e.push_back(ekman_pumping(p, g.y(j)));
  }
  return d;
}

LayeredState make_state(const ModelSpec& m, double t, std::vector<ScalarField> psi) {
  LayeredState s;
  s.t = t;
  s.omega = potential_vorticity(m, psi);
  s.psi = std::move(psi);
  return s;
}

}  // namespace qg
