#include "qg/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "qg/error.hpp"

namespace qg {
namespace {

const double kPi = 3.14159265358979323846;

void require_nonzero(double v, const char* name) {
  if (v == 0.0 || !std::isfinite(v))
    throw InvalidArgument(std::string("build_reduced: ") + name + " must be nonzero and finite");
}

ReducedSystem skeleton(ModelKind k, const ReductionSpec& r, std::vector<std::string> unknowns,
                       std::vector<int> orders, std::string variable) {
  ReducedSystem s;
  s.model = k;
  s.spec = r;
  s.variable = std::move(variable);
  s.unknowns = std::move(unknowns);
  int n = 0;
  for (std::size_t u = 0; u < orders.size(); ++u) {
    s.offset.push_back(n);
    for (int d = 0; d < orders[u]; ++d) s.labels.push_back(s.unknowns[u] + std::string(d, '\''));
    n += orders[u];
  }
  s.n = n;
  s.A = Eigen::MatrixXd::Zero(n, n);
  s.b_const = s.b_sin = s.b_ssin = Eigen::VectorXd::Zero(n);
  // chain rows: (u^(d))' = u^(d+1)
  for (std::size_t u = 0; u < orders.size(); ++u)
    for (int d = 0; d + 1 < orders[u]; ++d) s.A(s.offset[u] + d, s.offset[u] + d + 1) = 1.0;
  return s;
}

ReducedSystem build_I(const ModelIReduction& r) {
  r.params.validate();
  require_nonzero(r.mu3, "mu3");
  require_nonzero(r.mu4, "mu4");
  const auto& p = r.params;
  const double l2 = p.l * p.l;
  ReducedSystem s = skeleton(ModelKind::I, r, {"R", "S"}, {3, 3}, "y");
  const int R1 = 1, S1 = 4;
  // (mu1 - mu2) l^2 rho1 - mu4 l^2 rho1 R' + mu3 l^2 rho1 S' - (rho1 - rho2) g H1 mu3 R''' = 0
  const double d1 = (p.rho1 - p.rho2) * p.g * p.H1 * r.mu3;
  s.A(2, R1) = -r.mu4 * l2 * p.rho1 / d1;
  s.A(2, S1) = r.mu3 * l2 * p.rho1 / d1;
  s.b_const(2) = (r.mu1 - r.mu2) * l2 * p.rho1 / d1;
  // mu1 l^2 rho1 - mu2 l^2 rho2 - mu4 l^2 rho1 R' + mu3 l^2 rho1 S' - (rho1 - rho2) g H2 mu4 S''' = 0
  const double d2 = (p.rho1 - p.rho2) * p.g * p.H2 * r.mu4;
  s.A(5, R1) = -r.mu4 * l2 * p.rho1 / d2;
  s.A(5, S1) = r.mu3 * l2 * p.rho1 / d2;
  s.b_const(5) = (r.mu1 * l2 * p.rho1 - r.mu2 * l2 * p.rho2) / d2;
  return s;
}

ReducedSystem build_II(const ModelIIReduction& r) {
  r.params.validate();
  require_nonzero(r.sigma1, "sigma1");
  require_nonzero(r.sigma2, "sigma2");
  const double s1 = r.sigma1, s2 = r.sigma2, l2 = r.params.lambda * r.params.lambda;
  ReducedSystem s = skeleton(ModelKind::II, r, {"M", "N"}, {3, 3}, "x");
  const int M1 = 1, N1 = 4;
  // sigma1 N' - sigma2 (M' + lambda^2 N''') = 0
  s.A(5, N1) = s1 / (s2 * l2);
  s.A(5, M1) = -s2 / (s2 * l2);
  // -sigma1 N' + sigma2 M' - sigma1 lambda^2 M''' = 0
  s.A(2, N1) = -s1 / (s1 * l2);
  s.A(2, M1) = s2 / (s1 * l2);
  return s;
}

ReducedSystem build_III(const ModelIIIReduction& r) {
  r.params.validate();
  const auto& p = r.params;
  require_nonzero(p.A_H, "A_H");
  require_nonzero(r.kappa2, "kappa2");
  require_nonzero(r.kappa3, "kappa3");
  const double k1 = r.kappa1, k2 = r.kappa2, k3 = r.kappa3;
  const double f2 = p.f0 * p.f0, L = p.L, L2 = L * L, r0 = p.rho0;
  // density jumps from the reduced gravities: rho_{i+1} - rho_i = rho0 g'_i
  const double d12 = -r0 * p.gp1, d23 = -r0 * p.gp2;  // rho1 - rho2, rho2 - rho3
  ReducedSystem s = skeleton(ModelKind::III, r, {"U", "V", "W"}, {4, 3, 3}, "y");
  s.L = L;
  const int U1 = 1, U3 = 3, V1 = 5, W1 = 8;
  // -f0^2 L^2 k1 rho0^2 V' + k2 f0^2 L^2 rho0^2 U' + (rho1 - rho2)(beta0 H1 L^2 k1 rho0 - L pi tau0 sin
  //   + 2 pi y alpha tau0 sin + H1 L^2 k1 rho0 U''' - A_H H1 L^2 rho0 U'''') = 0
  const double dU = d12 * p.A_H * p.H1 * L2 * r0;
  s.A(3, V1) = -f2 * L2 * k1 * r0 * r0 / dU;
  s.A(3, U1) = k2 * f2 * L2 * r0 * r0 / dU;
  s.A(3, U3) = d12 * p.H1 * L2 * k1 * r0 / dU;
  s.b_const(3) = d12 * p.beta0 * p.H1 * L2 * k1 * r0 / dU;
  s.b_sin(3) = -d12 * L * kPi * p.tau0 / dU;
  s.b_ssin(3) = d12 * 2.0 * kPi * p.alpha * p.tau0 / dU;
  // f0^2 (k2 - k1) rho0 (rho2 - rho3) V' + k2 (f0^2 (rho1 - rho2) rho0 W'
  //   + (rho2 - rho3)(-f0^2 rho0 U' - H2 (rho1 - rho2)(beta0 + V'''))) = 0
  const double dV = k2 * d23 * p.H2 * d12;
  s.A(6, V1) = f2 * (k2 - k1) * r0 * d23 / dV;
  s.A(6, W1) = k2 * f2 * d12 * r0 / dV;
  s.A(6, U1) = -k2 * d23 * f2 * r0 / dV;
  s.b_const(6) = -p.beta0;
  // -H2 f0^2 k3 rho0 V' + f0^2 (k2 H3 - H3 k3 + H2 k3) rho0 W' + H3 H2 k3 (rho2 - rho3)(beta0 + W''') = 0
  const double dW = p.H3 * p.H2 * k3 * d23;
  s.A(9, V1) = p.H2 * f2 * k3 * r0 / dW;
  s.A(9, W1) = -f2 * (k2 * p.H3 - p.H3 * k3 + p.H2 * k3) * r0 / dW;
  s.b_const(9) = -p.beta0;
  return s;
}

// Quintic Hermite basis on [0, 1] as polynomial coefficients (ascending powers), ordered
// f0, f0', f0'', f1, f1', f1''.
const double kHermite[6][6] = {
    {1, 0, 0, -10, 15, -6}, {0, 1, 0, -6, 8, -3},   {0, 0, 0.5, -1.5, 1.5, -0.5},
    {0, 0, 0, 10, -15, 6},  {0, 0, 0, -4, 7, -3},   {0, 0, 0, 0.5, -1, 0.5},
};

double poly_deriv(const double* c, double t, int d) {
  double acc = 0.0;
  for (int k = 5; k >= d; --k) {
    double f = 1.0;
    for (int q = 0; q < d; ++q) f *= (k - q);
    acc = acc * t + f * c[k];
  }
  return acc;
}

}  // namespace

ModelKind kind_of(const ReductionSpec& r) { return static_cast<ModelKind>(r.index()); }

ModelSpec model_of(const ReductionSpec& r) {
  return std::visit([](const auto& v) -> ModelSpec { return v.params; }, r);
}

Eigen::VectorXd ReducedSystem::b(double s) const {
  if (b_sin.isZero(0.0) && b_ssin.isZero(0.0)) return b_const;
  const double sn = std::sin(kPi * s / L);
  return b_const + (b_sin + s * b_ssin) * sn;
}

ReducedSystem build_reduced(const ReductionSpec& r) {
  switch (kind_of(r)) {
    case ModelKind::I: return build_I(std::get<ModelIReduction>(r));
    case ModelKind::II: return build_II(std::get<ModelIIReduction>(r));
    case ModelKind::III: return build_III(std::get<ModelIIIReduction>(r));
  }
  throw InvalidArgument("build_reduced: unknown model");
}

Eigen::VectorXd default_initial_state(const ReducedSystem& sys) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(sys.n);
  for (int o : sys.offset) y(o + 1) = 1.0;
  return y;
}

std::vector<Eigen::VectorXd> rk4(const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& y0, double s0, double h, int steps) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("rk4: step must be positive and finite");
  if (steps < 0) throw InvalidArgument("rk4: negative step count");
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(y0);
  Eigen::VectorXd y = y0;
  for (int k = 0; k < steps; ++k) {
    const double s = s0 + k * h;
    const Eigen::VectorXd k1 = f(s, y);
    const Eigen::VectorXd k2 = f(s + 0.5 * h, y + 0.5 * h * k1);
    const Eigen::VectorXd k3 = f(s + 0.5 * h, y + 0.5 * h * k2);
    const Eigen::VectorXd k4 = f(s + h, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double big = y.cwiseAbs().maxCoeff();
    if (!(big <= 1e15))
      throw NumericalError("rk4: solution blew up at s = " + std::to_string(s + h), big, k + 1);
    out.push_back(y);
  }
  return out;
}

Profile integrate_reduced(const ReducedSystem& sys, const Eigen::VectorXd& y0, double s0, double s1, double h) {
  if (y0.size() != sys.n)
    throw InvalidArgument("integrate_reduced: initial state has " + std::to_string(y0.size()) +
                          " components, expected " + std::to_string(sys.n));
  if (!std::isfinite(s0) || !std::isfinite(s1) || !(s1 > s0))
    throw InvalidArgument("integrate_reduced: range must be finite with s1 > s0");
  if (!(h > 0.0)) throw InvalidArgument("integrate_reduced: step must be positive");
  const int steps = static_cast<int>(std::ceil((s1 - s0) / h - 1e-9));
  Profile p;
  p.s0 = s0;
  p.h = (s1 - s0) / steps;
  p.system = sys;
  p.y = rk4([&](double s, const Eigen::VectorXd& y) { return sys.rhs(s, y); }, y0, s0, p.h, steps);
  return p;
}

double Profile::eval(int u, double s, int d) const {
  if (u < 0 || u >= static_cast<int>(system.unknowns.size()))
    throw InvalidArgument("Profile::eval: unknown index out of range");
  if (d < 0 || d > 2) throw InvalidArgument("Profile::eval: derivative order must be 0, 1 or 2");
  const double tol = 1e-9 * h;
  if (!(s >= s0 - tol && s <= s_max() + tol))
    throw InvalidArgument("Profile::eval: s = " + std::to_string(s) + " outside [" + std::to_string(s0) + ", " +
                          std::to_string(s_max()) + "]");
  const int last = static_cast<int>(y.size()) - 1;
  int k = std::clamp(static_cast<int>(std::floor((s - s0) / h)), 0, std::max(last - 1, 0));
  const int o = system.offset[u];
  if (last == 0) return y[0](o + d);
  const double t = (s - (s0 + k * h)) / h;
  const double v[6] = {y[k](o),     h * y[k](o + 1),     h * h * y[k](o + 2),
                       y[k + 1](o), h * y[k + 1](o + 1), h * h * y[k + 1](o + 2)};
  double acc = 0.0;
  for (int b = 0; b < 6; ++b) acc += v[b] * poly_deriv(kHermite[b], t, d);
  return acc / std::pow(h, d);
}

std::vector<std::complex<double>> characteristic_roots(const ReducedSystem& sys) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(sys.A, false);
  if (es.info() != Eigen::Success) throw NumericalError("characteristic_roots: eigenvalue iteration failed");
  std::vector<std::complex<double>> r(es.eigenvalues().data(), es.eigenvalues().data() + sys.n);
  std::sort(r.begin(), r.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return r;
}

double zero_root_threshold(const ReducedSystem& sys) {
  return 1e-6 * std::max(1.0, sys.A.cwiseAbs().rowwise().sum().maxCoeff());
}

RootClass classify_root(std::complex<double> r, double zero_tol) {
  if (std::abs(r) <= zero_tol) return RootClass::zero;
  const double rel = 1e-9 * std::abs(r);
  if (std::abs(r.imag()) <= rel) return RootClass::real;
  if (std::abs(r.real()) <= rel) return RootClass::imaginary;
  return RootClass::complex;
}

const char* root_class_name(RootClass c) {
  switch (c) {
    case RootClass::zero: return "zero";
    case RootClass::real: return "real";
    case RootClass::imaginary: return "imaginary";
    case RootClass::complex: return "complex";
  }
  return "?";
}

SamplerPtr assemble_invariant_solution(const Profile& profile, std::function<double(double)> int_a) {
  if (profile.y.empty()) throw InvalidArgument("assemble_invariant_solution: empty profile");
  const ReducedSystem& sys = profile.system;
  const int layers = static_cast<int>(sys.unknowns.size());
  std::vector<double> along(layers), time_rate(layers, 1.0);
  bool use_int = true;
  switch (sys.model) {
    case ModelKind::I: {
      const auto& r = std::get<ModelIReduction>(sys.spec);
      along = {r.mu3, r.mu4};
      time_rate = {r.mu1, r.mu2};
      use_int = false;
      break;
    }
    case ModelKind::II: {
      const auto& r = std::get<ModelIIReduction>(sys.spec);
      along = {r.sigma1, r.sigma2};
      break;
    }
    case ModelKind::III: {
      const auto& r = std::get<ModelIIIReduction>(sys.spec);
      along = {r.kappa1, r.kappa2, r.kappa3};
      break;
    }
  }
  const bool profile_in_x = sys.variable == "x";
  auto prof = std::make_shared<Profile>(profile);
  return std::make_shared<FunctionSampler>(
      layers, [prof, along, time_rate, use_int, profile_in_x, int_a, layers](double t, double x, double y,
                                                                            double* out) {
        const double s = profile_in_x ? x : y;
        const double lin = profile_in_x ? y : x;
        const double tt = use_int ? int_a(t) : t;
        for (int l = 0; l < layers; ++l) out[l] = time_rate[l] * tt + along[l] * lin + prof->eval(l, s);
      });
}

void write_profile_csv(std::ostream& os, const Profile& p) {
  os << "s";
  for (const auto& u : p.system.unknowns) os << ',' << u;
  os << '\n';
  char buf[64];
  for (std::size_t k = 0; k < p.y.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", p.s0 + static_cast<double>(k) * p.h);
    os << buf;
    for (int o : p.system.offset) {
      std::snprintf(buf, sizeof buf, "%.17g", p.y[k](o));
      os << ',' << buf;
    }
    os << '\n';
  }
}

}  // namespace qg
