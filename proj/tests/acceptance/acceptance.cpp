// Acceptance run: one PASS/FAIL line per criterion, indented detail lines, "info" lines for
// values reported alongside. Exit status is 1 when any criterion fails.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "qg/conservation.hpp"
#include "qg/grid_ops.hpp"
#include "qg/reduction.hpp"
#include "qg/sampling.hpp"
#include "qg/simulator.hpp"
#include "qg/suites.hpp"
#include "qg/symmetry.hpp"

using namespace qg;

namespace {

constexpr double kTwoPi = 6.283185307179586;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void detail(bool pass, const std::string& what) { std::printf("  %s %s\n", pass ? "ok  " : "FAIL", what.c_str()); }
void info(const std::string& what) { std::printf("  info %s\n", what.c_str()); }

struct Outcome {
  bool pass = true;
  void need(bool ok, const std::string& what) {
    detail(ok, what);
    pass = pass && ok;
  }
};

double mean(const ScalarField& f) {
  double s = 0.0;
  for (int j = 0; j < f.grid().ny; ++j)
    for (int i = 0; i < f.grid().nx; ++i) s += f(i, j);
  return s / (static_cast<double>(f.grid().nx) * f.grid().ny);
}

// 1. PV round trip
bool pv_round_trip(Outcome& o) {
  const std::vector<std::pair<std::string, ModelSpec>> models{
      {"I", ModelIParams{}}, {"II", ModelIIParams{}}, {"III", ModelIIIParams::table1()}};
  bool timely = true;
  for (const auto& [name, m] : models) {
    const auto t0 = std::chrono::steady_clock::now();
    const Grid g = default_grid(m, 64);
    const auto psi = random_bandlimited(g, layer_count(m), 42, 6, 1e4);
    const auto back = invert_pv(m, potential_vorticity(m, psi));
    double d = 0.0, s = 0.0;
    for (std::size_t l = 0; l < psi.size(); ++l) {
      // periodic inversion fixes the gauge constant; compare modulo the layer mean
      const double shift = g.topology == Topology::periodic ? mean(back[l]) - mean(psi[l]) : 0.0;
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) d = std::max(d, std::abs(back[l](i, j) - shift - psi[l](i, j)));
      s = std::max(s, psi[l].max_abs());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    timely = timely && secs < 1.0;
    o.need(d <= 1e-8 * s, "Model " + name + " relative error " + fmt("%.3e", d / s) + fmt(" (%.3f s)", secs));
  }
  return timely;
}

// 2. Invariant-solution residuals
bool invariant_residuals(Outcome& o) {
  auto orders = [&](const std::string& name, const ModelSpec& m, const Sampler& sol) {
    std::vector<double> res;
    for (int n : {32, 64, 128}) {
      const Grid g = Grid::basin(n, n, -1, 1, -1, 1);
      res.push_back(pde_residual(m, sol, g, {0.0, 0.5}).overall_max());
    }
    const double p1 = std::log2(res[0] / res[1]), p2 = std::log2(res[1] / res[2]);
    o.need(std::min(p1, p2) >= 1.9, "Model " + name + " residuals " + fmt("%.3e", res[0]) + " " + fmt("%.3e", res[1]) +
                                        " " + fmt("%.3e", res[2]) + ", orders " + fmt("%.3f", p1) + " " +
                                        fmt("%.3f", p2));
  };
  {
    ModelIReduction r;  // mu1 = mu3 = mu4 = 1, mu2 = 0.5
    r.params = ModelIParams::unit();
    const auto sys = build_reduced(r);
    const auto prof = integrate_reduced(sys, default_initial_state(sys), -1.5, 1.5, 1e-3);
    orders("I", r.params, *assemble_invariant_solution(prof));
  }
  {
    ModelIIReduction r;  // sigma1 = sigma2 = 1, lambda = 1, a = 1
    r.params = ModelIIParams::unit();
    const auto sys = build_reduced(r);
    // M'(0) = 1 and the rest zero: unit slopes in both unknowns give a solution that is exactly
    // linear in x, for which the residual is round-off and no order can be measured
    Eigen::VectorXd y0 = Eigen::VectorXd::Zero(sys.n);
    y0(1) = 1.0;
    const auto prof = integrate_reduced(sys, y0, -1.5, 1.5, 1e-3);
    orders("II", r.params, *assemble_invariant_solution(prof));
  }
  return true;
}

// 3. Characteristic-root identity
bool root_identity(Outcome& o) {
  const double sig[] = {-2.0, -0.5, 0.5, 1.0, 3.0};
  const double lam[] = {0.5, 1.0, 2.0};
  double worst = 0.0;
  int cases = 0, imaginary = 0, miscounted = 0;
  for (double s1 : sig)
    for (double s2 : sig)
      for (double l : lam) {
        ModelIIReduction r;
        r.params.lambda = l;
        r.sigma1 = s1, r.sigma2 = s2;
        const auto sys = build_reduced(r);
        const auto roots = characteristic_roots(sys);
        const double tol = zero_root_threshold(sys);
        const double r2 = (s1 * s1 + s2 * s2) / (s1 * s2 * l * l);
        int nonzero = 0;
        for (const auto& z : roots) {
          if (classify_root(z, tol) == RootClass::zero) continue;
          ++nonzero;
          worst = std::max(worst, std::abs(z * z - r2));
          imaginary += classify_root(z, tol) == RootClass::imaginary;
        }
        miscounted += nonzero != 2;
        ++cases;
      }
  o.need(worst <= 1e-10, std::to_string(cases) + " cases, max |r^2 - target| " + fmt("%.3e", worst));
  o.need(miscounted == 0, "two nonzero roots in every case (" + std::to_string(miscounted) + " exceptions)");
  o.need(imaginary > 0, std::to_string(imaginary) + " purely imaginary roots from sigma1 sigma2 < 0");
  return true;
}

// 4. Symmetry suite
bool symmetry(Outcome& o) {
  const std::vector<std::pair<std::string, ModelSpec>> models{
      {"I", ModelIParams::unit()}, {"II", ModelIIParams::unit()}, {"III", ModelIIIParams::table1()}};
  for (const auto& [name, m] : models) {
    const auto r = symmetry_suite(m, {});
    for (const auto& row : r.rows)
      o.need(row.pass, "Model " + name + " " + row.generator + " ratio " + fmt("%.4g", row.ratio));
    o.need(!r.control.pass, "Model " + name + " negative control detected, ratio " + fmt("%.4g", r.control.ratio));
    if (r.corrected_y8)
      info("Model II Y8 with the fiber sign flipped, ratio " + fmt("%.4g", r.corrected_y8->ratio) +
           (r.corrected_y8->pass ? " (passes)" : " (fails)"));
  }
  return true;
}

// 5. Commutator table
bool commutators(Outcome& o) {
  const auto table = bracket_table(builtin_generators(ModelKind::I));
  const std::set<std::string> expected{"[X1,X6] = -X2", "[X2,X6] = X1", "[X3,X7] = X3", "[X4,X7] = -X4",
                                       "[X5,X7] = -X5"};
  const auto rel = table.nonzero_relations();
  const std::set<std::string> got(rel.begin(), rel.end());
  std::string list;
  for (const auto& s : rel) list += (list.empty() ? "" : "; ") + s;
  o.need(got == expected && rel.size() == expected.size(), "non-vanishing relations: " + list);
  int reduced = 0, total = 0;
  for (const auto& row : table.entry)
    for (const auto& e : row) {
      ++total;
      reduced += e.coeffs.has_value();
    }
  o.need(reduced == total, std::to_string(reduced) + " of " + std::to_string(total) +
                               " entries decompose exactly in the basis");
  o.need(table.antisymmetric() && table.jacobi(), "antisymmetry and Jacobi identity");
  return true;
}

// 6. Conservation identities
bool conservation(Outcome& o) {
  bool a = true, b = true, c = true;
  for (const auto& [name, m] : std::vector<std::pair<std::string, ModelSpec>>{{"I", ModelIParams::unit()},
                                                                               {"II", ModelIIParams::unit()}}) {
    const auto rows = conservation_suite(m, {});
    int euler_ok = 0, euler_total = 0;
    for (const auto& r : rows) {
      const std::string line = "Model " + name + " " + r.multiplier_id + " " + r.check + " " + r.grid + " " +
                               fmt("%.3e", r.value);
      if (r.check.rfind("identity", 0) == 0) {
        if (r.check.find("corrected") != std::string::npos) {
          info(line + (r.pass ? " (passes)" : " (fails)"));
          continue;
        }
        detail(r.pass, "(a) " + line);
        a = a && r.pass;
      } else if (r.check == "divergence_onshell") {
        info("(b) " + line);
      } else if (r.check == "divergence_order") {
        detail(r.pass, "(b) " + line);
        b = b && r.pass;
      } else if (r.check == "euler") {
        ++euler_total;
        euler_ok += r.pass;
        if (!r.pass) detail(false, "(c) " + line);
        c = c && r.pass;
      } else {
        detail(r.pass, "(c) " + line);
        c = c && r.pass;
      }
    }
    detail(euler_ok == euler_total, "(c) Model " + name + " " + std::to_string(euler_ok) + " of " +
                                        std::to_string(euler_total) + " multiplier sets annihilated");
  }
  // the same identity on a 2 pi wide box, where the (k h)^2 floor is visible
  const ModelSpec m1 = ModelIParams::unit();
  const auto T = conserved_vector(m1, VectorKind::model1_01);
  IdentitySetup wide;
  wide.patch = Grid::basin(128, 128, 0.3, 0.3 + kTwoPi, -0.2, -0.2 + kTwoPi);
  wide.times = {0.1, 0.5, 0.9, 1.3, 1.7};
  info("(a) Model I identity on a 2 pi box at 128x128 " +
       fmt("%.3e", multiplier_identity_check(multiplier_of(T), T, SmoothFields(2, 11), wide).relative()));
  o.need(a, "(a) off-shell identity of the printed conserved vectors");
  o.need(b, "(b) on-shell divergence order");
  o.need(c, "(c) Euler annihilation for every set and time function, control detected");
  return true;
}

// 7. Model III double gyre
bool double_gyre(Outcome& o) {
  SimConfig c;
  c.model = ModelIIIParams::table1();
  c.grid = default_grid(c.model, 64);
  c.dt = 3600.0;
  c.nsteps = 30 * 24;
  c.output_every = 1;
  LayeredState last;
  const auto tr = run(c, [&](const LayeredState& s, std::int64_t) { last = s; }, false);
  const ScalarField& f = last.psi[0];
  double d = 0.0;
  for (int j = 0; j < c.grid.ny; ++j)
    for (int i = 0; i < c.grid.nx; ++i) d = std::max(d, std::abs(f(i, j) + f(i, c.grid.ny - 1 - j)));
  const double defect = d / f.max_abs();
  o.need(defect <= 1e-6, "antisymmetry defect at day 30 " + fmt("%.3e", defect));
  int rises = 0, steps = 0;
  for (std::size_t k = 1; k < tr.diagnostics.size() && tr.diagnostics[k].time <= 5 * 86400.0; ++k) {
    ++steps;
    rises += tr.diagnostics[k].d.energy[0] > tr.diagnostics[k - 1].d.energy[0];
  }
  o.need(steps > 0 && rises == steps, "layer-1 energy rises on " + std::to_string(rises) + " of " +
                                          std::to_string(steps) + " steps in the first 5 days");
  return true;
}

// 8. Unforced conservation
bool unforced(Outcome& o) {
  for (const auto& [name, m] : std::vector<std::pair<std::string, ModelSpec>>{{"I", ModelIParams::unit()},
                                                                               {"II", ModelIIParams::unit()}}) {
    SimConfig c;
    c.model = m;
    c.grid = Grid::periodic(64, 64, kTwoPi, kTwoPi);
    c.preset.kind = InitialPreset::Kind::random_bandlimited;
    c.preset.seed = 7;
    c.preset.kmax = 4;
    c.dt = 0.25 * cfl_limit(initial_state(m, c.grid, c.preset));
    c.nsteps = 1000;
    c.output_every = 1000;
    const auto tr = run(c);
    const auto& d0 = tr.diagnostics.front().d;
    const auto& d1 = tr.diagnostics.back().d;
    for (std::size_t l = 0; l < d0.energy.size(); ++l) {
      const double de = std::abs(d1.energy[l] - d0.energy[l]) / d0.energy[l];
      const double dz = std::abs(d1.enstrophy[l] - d0.enstrophy[l]) / d0.enstrophy[l];
      const std::string layer = "Model " + name + " layer " + std::to_string(l + 1);
      o.need(de <= 1e-4, layer + " energy drift " + fmt("%.3e", de));
      o.need(dz <= 1e-4, layer + " enstrophy drift " + fmt("%.3e", dz));
    }
    const double e0 = total_energy(m, tr.snapshots.front()), e1 = total_energy(m, tr.snapshots.back());
    info("Model " + name + " total energy drift " + fmt("%.3e", std::abs((e1 - e0) / e0)));
  }
  return true;
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  struct Criterion {
    int id;
    const char* title;
    double limit;  // seconds
    std::function<bool(Outcome&)> run;
  };
  const std::vector<Criterion> all{
      {1, "PV round trip", 3.0, pv_round_trip},
      {2, "invariant-solution residuals", 30.0, invariant_residuals},
      {3, "characteristic-root identity", 1.0, root_identity},
      {4, "symmetry suite", 120.0, symmetry},
      {5, "commutator table", 1.0, commutators},
      {6, "conservation identities", 300.0, conservation},
      {7, "Model III double gyre", 120.0, double_gyre},
      {8, "unforced conservation", 60.0, unforced},
  };
  int failed = 0;
  for (const auto& c : all) {
    std::printf("criterion %d: %s\n", c.id, c.title);
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    bool timely = true;
    try {
      timely = c.run(o);
    } catch (const std::exception& e) {
      detail(false, std::string("error: ") + e.what());
      o.pass = false;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    timely = timely && secs < c.limit;
    detail(timely, fmt("runtime %.2f s", secs) + fmt(" (limit %.0f s)", c.limit));
    const bool pass = o.pass && timely;
    failed += !pass;
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", c.id, c.title);
  }
  std::printf("%d of %zu criteria pass\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
