#include "qg/symmetry.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include "qg/error.hpp"

namespace qg {

using sym::Expr;
using sym::Rational;

namespace {

Expr C(std::int64_t p, std::int64_t q = 1) { return Expr(Rational(p, q)); }
Expr V(int v) { return Expr::var(v); }
Expr F(const std::string& name, int k = 0) { return Expr::fn(name, k); }
Expr Zero() { return Expr(); }

double fval(const sym::FunctionTable& fns, const std::string& name, double t, int k) {
  auto it = fns.find(name);
  return it == fns.end() ? (k == 0 ? 1.0 : 0.0) : it->second.value(t, k);
}

std::vector<Expr> all(int layers, const Expr& e) { return std::vector<Expr>(layers, e); }

std::vector<Expr> unit_eta(int layers, int which) {
  std::vector<Expr> e(layers);
  e[which] = C(1);
  return e;
}

FlowMap translate(int axis) {
  return {[axis](double eps, double& t, double& x, double& y) { (axis == 0 ? t : axis == 1 ? x : y) += eps; },
          [](double, double, double, double, double*) {}};
}

FlowMap shift(int layers, int which) {
  return {[](double, double&, double&, double&) {},
          [layers, which](double eps, double, double, double, double* psi) {
            (void)layers;
            psi[which] += eps;
          }};
}

FlowMap rotation() {
  return {[](double eps, double&, double& x, double& y) {
            const double c = std::cos(eps), s = std::sin(eps), x0 = x;
            x = x0 * c + y * s;
            y = -x0 * s + y * c;
          },
          [](double, double, double, double, double*) {}};
}

FlowMap scaling(int layers) {
  return {[](double eps, double& t, double&, double&) { t *= std::exp(eps); },
          [layers](double eps, double, double, double, double* psi) {
            const double k = std::exp(-eps);
            for (int l = 0; l < layers; ++l) psi[l] *= k;
          }};
}

FlowMap gauge(int layers, const sym::FunctionTable& fns, const std::string& name) {
  return {[](double, double&, double&, double&) {},
          [layers, fns, name](double eps, double t, double, double, double* psi) {
            const double u = fval(fns, name, t, 0);
            for (int l = 0; l < layers; ++l) psi[l] += eps * u;
          }};
}

// x += eps b(t), psi -= eps y b'(t)   |   y += eps c(t), psi += eps x c'(t)
FlowMap boost(int layers, const sym::FunctionTable& fns, const std::string& name, bool along_x) {
  return {[fns, name, along_x](double eps, double& t, double& x, double& y) {
            (along_x ? x : y) += eps * fval(fns, name, t, 0);
          },
          [layers, fns, name, along_x](double eps, double t, double x, double y, double* psi) {
            const double d = fval(fns, name, t, 1);
            const double add = along_x ? -eps * y * d : eps * x * d;
            for (int l = 0; l < layers; ++l) psi[l] += add;
          }};
}

FlowMap rotating_frame(int layers, double fiber_sign) {
  return {[](double eps, double& t, double& x, double& y) {
            const double a = eps * t, c = std::cos(a), s = std::sin(a), x0 = x;
            x = x0 * c + y * s;
            y = -x0 * s + y * c;
          },
          [layers, fiber_sign](double eps, double, double x, double y, double* psi) {
            const double add = fiber_sign * 0.5 * eps * (x * x + y * y);
            for (int l = 0; l < layers; ++l) psi[l] += add;
          }};
}

GeneratorSpec with_flow(GeneratorSpec g, FlowMap f) {
  g.flow = std::move(f);
  return g;
}

using Key = std::pair<int, sym::Monomial>;

std::map<Key, Rational> flatten(const GeneratorSpec& g) {
  std::map<Key, Rational> out;
  for (int k = 0; k < 3 + g.layers(); ++k)
    for (const auto& [m, c] : g.component(k).terms()) out.emplace(Key{k, m}, c);
  return out;
}

}  // namespace

bool GeneratorSpec::is_zero() const {
  for (int k = 0; k < 3 + layers(); ++k)
    if (!component(k).is_zero()) return false;
  return true;
}

std::string GeneratorSpec::str() const {
  static const char* base[3] = {"d_t", "d_x", "d_y"};
  std::string s;
  for (int k = 0; k < 3 + layers(); ++k) {
    const Expr& e = component(k);
    if (e.is_zero()) continue;
    if (!s.empty()) s += " + ";
    const std::string d = k < 3 ? base[k] : "d_psi" + std::to_string(k - 2);
    s += "(" + e.str() + ")" + d;
  }
  return s.empty() ? "0" : s;
}

GeneratorSpec make_generator(std::string name, int layers, std::vector<Expr> xi, std::vector<Expr> eta,
                             sym::FunctionTable fns) {
  if (xi.size() != 3 || static_cast<int>(eta.size()) != layers)
    throw InvalidArgument("make_generator: expected 3 xi components and one eta per layer");
  GeneratorSpec g;
  g.name = std::move(name);
  g.xi = std::move(xi);
  g.eta = std::move(eta);
  g.functions = std::move(fns);
  return g;
}

std::vector<GeneratorSpec> builtin_generators(ModelKind m, const sym::FunctionTable& fns) {
  std::vector<GeneratorSpec> out;
  auto add = [&](std::string name, int L, std::vector<Expr> xi, std::vector<Expr> eta, FlowMap f) {
    out.push_back(with_flow(make_generator(std::move(name), L, std::move(xi), std::move(eta), fns), std::move(f)));
  };
  const Expr t = V(sym::T), x = V(sym::X), y = V(sym::Y);
  switch (m) {
    case ModelKind::I: {
      const int L = 2;
      add("X1", L, {Zero(), C(1), Zero()}, all(L, Zero()), translate(1));
      add("X2", L, {Zero(), Zero(), C(1)}, all(L, Zero()), translate(2));
      add("X3", L, {C(1), Zero(), Zero()}, all(L, Zero()), translate(0));
      add("X4", L, {Zero(), Zero(), Zero()}, unit_eta(L, 0), shift(L, 0));
      add("X5", L, {Zero(), Zero(), Zero()}, unit_eta(L, 1), shift(L, 1));
      add("X6", L, {Zero(), y, -x}, all(L, Zero()), rotation());
      add("X7", L, {t, Zero(), Zero()}, {-V(sym::PSI1), -V(sym::PSI2)}, scaling(L));
      break;
    }
    case ModelKind::II: {
      const int L = 2;
      const Expr half_r2 = C(1, 2) * (x * x + y * y);
      add("Y1", L, {C(1), Zero(), Zero()}, all(L, Zero()), translate(0));
      add("Y2", L, {Zero(), Zero(), Zero()}, unit_eta(L, 1), shift(L, 1));
      add("Y3", L, {Zero(), y, -x}, all(L, Zero()), rotation());
      add("Y4", L, {t, Zero(), Zero()}, {-V(sym::PSI1), -V(sym::PSI2)}, scaling(L));
      add("Y5", L, {Zero(), Zero(), Zero()}, all(L, F("a")), gauge(L, fns, "a"));
      add("Y6", L, {Zero(), F("b"), Zero()}, all(L, -(y * F("b", 1))), boost(L, fns, "b", true));
      add("Y7", L, {Zero(), Zero(), F("c")}, all(L, x * F("c", 1)), boost(L, fns, "c", false));
      add("Y8", L, {Zero(), t * y, -(t * x)}, all(L, -half_r2), rotating_frame(L, -1.0));
      break;
    }
    case ModelKind::III: {
      const int L = 3;
      add("Z1", L, {C(1), Zero(), Zero()}, all(L, Zero()), translate(0));
      add("Z2", L, {Zero(), C(1), Zero()}, all(L, Zero()), translate(1));
      add("Z3", L, {Zero(), Zero(), Zero()}, unit_eta(L, 1), shift(L, 1));
      add("Z4", L, {Zero(), Zero(), Zero()}, unit_eta(L, 2), shift(L, 2));
      add("Z5", L, {Zero(), Zero(), Zero()}, all(L, F("f")), gauge(L, fns, "f"));
      break;
    }
  }
  return out;
}

GeneratorSpec rotating_frame_corrected(const sym::FunctionTable& fns) {
  const Expr t = V(sym::T), x = V(sym::X), y = V(sym::Y);
  const Expr half_r2 = C(1, 2) * (x * x + y * y);
  return with_flow(make_generator("Y8*", 2, {Zero(), t * y, -(t * x)}, all(2, half_r2), fns),
                   rotating_frame(2, 1.0));
}

GeneratorSpec negative_control(ModelKind m) {
  const int L = layer_count(m);
  std::vector<Expr> eta(L);
  eta[0] = V(sym::X) * V(sym::Y) * V(sym::T);
  FlowMap f{[](double, double&, double&, double&) {},
            [](double eps, double t, double x, double y, double* psi) { psi[0] += eps * x * y * t; }};
  return with_flow(make_generator("control", L, {Zero(), Zero(), Zero()}, eta), f);
}

double flow_consistency(const GeneratorSpec& g, const std::vector<std::array<double, sym::kVars>>& points,
                        double eps) {
  if (!g.flow) throw InvalidArgument("flow_consistency: generator " + g.name + " has no flow");
  const int L = g.layers();
  double worst = 0.0;
  for (const auto& p : points) {
    double tp = p[0], xp = p[1], yp = p[2], tm = p[0], xm = p[1], ym = p[2];
    g.flow->base(eps, tp, xp, yp);
    g.flow->base(-eps, tm, xm, ym);
    const double d[3] = {(tp - tm) / (2 * eps), (xp - xm) / (2 * eps), (yp - ym) / (2 * eps)};
    for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(d[k] - g.xi[k].eval(p, g.functions)));
    std::vector<double> a(p.begin() + 3, p.begin() + 3 + L), b = a;
    g.flow->fiber(eps, p[0], p[1], p[2], a.data());
    g.flow->fiber(-eps, p[0], p[1], p[2], b.data());
    for (int l = 0; l < L; ++l)
      worst = std::max(worst, std::abs((a[l] - b[l]) / (2 * eps) - g.eta[l].eval(p, g.functions)));
  }
  return worst;
}

TransformedSampler::TransformedSampler(SamplerPtr source, FlowMap flow, double eps)
    : source_(std::move(source)), flow_(std::move(flow)), eps_(eps) {
  if (!source_) throw InvalidArgument("TransformedSampler: null source");
}

bool TransformedSampler::covers(double t, double x, double y) const {
  flow_.base(-eps_, t, x, y);
  return source_->covers(t, x, y);
}

void TransformedSampler::sample(double t, double x, double y, double* out) const {
  flow_.base(-eps_, t, x, y);
  source_->sample(t, x, y, out);
  flow_.fiber(eps_, t, x, y, out);
}

SamplerPtr flow(const GeneratorSpec& g, double eps, SamplerPtr sol) {
  if (!g.flow) throw InvalidArgument("flow: generator " + g.name + " has no closed-form flow");
  if (!sol) throw InvalidArgument("flow: null solution");
  if (sol->layers() != g.layers()) throw InvalidArgument("flow: layer count mismatch for " + g.name);
  if (eps == 0.0) return sol;
  return std::make_shared<TransformedSampler>(sol, *g.flow, eps);
}

InvarianceReport verify_invariance(const ModelSpec& m, const GeneratorSpec& g, SamplerPtr sol, double eps,
                                   const InvarianceSetup& setup) {
  if (g.layers() != layer_count(m)) throw InvalidArgument("verify_invariance: generator " + g.name + " has the wrong layer count");
  auto image = flow(g, eps, sol);
  const int margin = setup.grid.topology == Topology::basin ? 3 : 2;
  const double d = default_fd_step(setup.times, setup.dt_fd);
  const ResidualBlock rb = residual_block(setup.grid, 2, margin);
  std::size_t uncovered = 0, total = 0;
  for (double t : setup.times)
    for (double tt : {t - d, t, t + d})
      for (int j = 0; j < rb.block.ny; ++j)
        for (int i = 0; i < rb.block.nx; ++i) {
          ++total;
          uncovered += !sol->covers(tt, rb.block.x(i), rb.block.y(j)) || !image->covers(tt, rb.block.x(i), rb.block.y(j));
        }
  if (uncovered) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.4g", static_cast<double>(uncovered) / static_cast<double>(total));
    throw InvalidArgument("verify_invariance: image of " + g.name + " leaves the sampled domain (uncovered fraction " +
                          buf + ")");
  }
  InvarianceReport r;
  r.generator = g.name;
  r.epsilon = eps;
  r.residual_before = pde_residual(m, *sol, setup.grid, setup.times, d, setup.scheme, margin).overall_max();
  r.residual_after = pde_residual(m, *image, setup.grid, setup.times, d, setup.scheme, margin).overall_max();
  r.ratio = r.residual_before > 0.0 ? r.residual_after / r.residual_before : (r.residual_after == 0.0 ? 1.0 : INFINITY);
  r.pass = r.residual_after <= 10.0 * r.residual_before + setup.abs_tol;
  return r;
}

GeneratorSpec lie_bracket(const GeneratorSpec& g1, const GeneratorSpec& g2) {
  if (g1.layers() != g2.layers()) throw InvalidArgument("lie_bracket: layer counts differ");
  const int L = g1.layers();
  auto apply = [L](const GeneratorSpec& a, const Expr& f) {
    Expr r;
    for (int v = 0; v < 3 + L; ++v) {
      const Expr& c = a.component(v);
      if (!c.is_zero()) r = r + c * f.diff(v);
    }
    return r;
  };
  GeneratorSpec out;
  out.name = "[" + g1.name + "," + g2.name + "]";
  out.functions = g1.functions;
  out.functions.insert(g2.functions.begin(), g2.functions.end());
  for (int k = 0; k < 3 + L; ++k) {
    Expr e = apply(g1, g2.component(k)) - apply(g2, g1.component(k));
    (k < 3 ? out.xi : out.eta).push_back(std::move(e));
  }
  return out;
}

std::optional<std::vector<Rational>> decompose(const GeneratorSpec& g, const std::vector<GeneratorSpec>& basis) {
  const int nb = static_cast<int>(basis.size());
  std::vector<std::map<Key, Rational>> cols;
  std::map<Key, int> rows;
  for (const auto& b : basis) {
    if (b.layers() != g.layers()) throw InvalidArgument("decompose: layer count mismatch");
    cols.push_back(flatten(b));
    for (const auto& kv : cols.back()) rows.emplace(kv.first, 0);
  }
  const auto target = flatten(g);
  for (const auto& kv : target)
    if (!rows.count(kv.first)) return std::nullopt;  // term outside the span
  int r = 0;
  for (auto& kv : rows) kv.second = r++;
  const int nr = r;
  // augmented matrix [basis | target], exact elimination
  std::vector<std::vector<Rational>> A(nr, std::vector<Rational>(nb + 1));
  for (int c = 0; c < nb; ++c)
    for (const auto& [k, v] : cols[c]) A[rows[k]][c] = v;
  for (const auto& [k, v] : target) A[rows[k]][nb] = v;
  std::vector<int> pivot_col;
  int row = 0;
  for (int c = 0; c < nb && row < nr; ++c) {
    int p = row;
    while (p < nr && A[p][c].is_zero()) ++p;
    if (p == nr) continue;
    std::swap(A[p], A[row]);
    const Rational inv = Rational(1) / A[row][c];
    for (auto& v : A[row]) v = v * inv;
    for (int q = 0; q < nr; ++q) {
      if (q == row || A[q][c].is_zero()) continue;
      const Rational f = A[q][c];
      for (int k = c; k <= nb; ++k) A[q][k] = A[q][k] - f * A[row][k];
    }
    pivot_col.push_back(c);
    ++row;
  }
  for (int q = row; q < nr; ++q)
    if (!A[q][nb].is_zero()) return std::nullopt;
  if (static_cast<int>(pivot_col.size()) != nb) throw InvalidArgument("decompose: basis is linearly dependent");
  std::vector<Rational> x(nb);
  for (int q = 0; q < row; ++q) x[pivot_col[q]] = A[q][nb];
  return x;
}

BracketTable bracket_table(const std::vector<GeneratorSpec>& basis) {
  BracketTable t;
  const int n = static_cast<int>(basis.size());
  for (const auto& b : basis) t.names.push_back(b.name);
  t.entry.assign(n, std::vector<BracketEntry>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      GeneratorSpec b = lie_bracket(basis[i], basis[j]);
      t.entry[i][j].expression = b.str();
      t.entry[i][j].coeffs = decompose(b, basis);
    }
  return t;
}

std::vector<std::string> BracketTable::nonzero_relations() const {
  std::vector<std::string> out;
  const int n = static_cast<int>(names.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const BracketEntry& e = entry[i][j];
      std::string lhs = "[" + names[i] + "," + names[j] + "] = ";
      if (!e.coeffs) {
        out.push_back(lhs + "irreducible: " + e.expression);
        continue;
      }
      std::string rhs;
      for (int k = 0; k < n; ++k) {
        const Rational c = (*e.coeffs)[k];
        if (c.is_zero()) continue;
        const bool neg = c < Rational(0);
        const Rational a = neg ? -c : c;
        if (rhs.empty())
          rhs += neg ? "-" : "";
        else
          rhs += neg ? " - " : " + ";
        if (!(a == Rational(1))) rhs += a.str() + "*";
        rhs += names[k];
      }
      if (!rhs.empty()) out.push_back(lhs + rhs);
    }
  return out;
}

bool BracketTable::antisymmetric() const {
  const int n = static_cast<int>(names.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto &a = entry[i][j].coeffs, &b = entry[j][i].coeffs;
      if (!a || !b) return false;
      for (int k = 0; k < n; ++k)
        if (!((*a)[k] == -(*b)[k])) return false;
    }
  return true;
}

bool BracketTable::jacobi() const {
  const int n = static_cast<int>(names.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!entry[i][j].coeffs) return false;
  auto c = [&](int i, int j, int k) { return (*entry[i][j].coeffs)[k]; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) {
          Rational s;
          for (int l = 0; l < n; ++l) s = s + c(i, j, l) * c(l, k, m) + c(j, k, l) * c(l, i, m) + c(k, i, l) * c(l, j, m);
          if (!s.is_zero()) return false;
        }
  return true;
}

void write_invariance_csv(std::ostream& os, const std::vector<InvarianceReport>& rows) {
  os << "generator,epsilon,residual_before,residual_after,ratio,pass\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%d\n", r.generator.c_str(), r.epsilon, r.residual_before,
                  r.residual_after, r.ratio, r.pass ? 1 : 0);
    os << buf;
  }
}

}  // namespace qg
