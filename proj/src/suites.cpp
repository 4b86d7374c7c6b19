#include "qg/suites.hpp"

#include <cmath>
#include <future>
#include <string>

#include "qg/error.hpp"
#include "qg/sampling.hpp"

namespace qg {
namespace {

constexpr double kTwoPi = 6.283185307179586;

std::string grid_label(int n) { return std::to_string(n) + "x" + std::to_string(n); }

struct NamedFunction {
  std::string tag;
  sym::TimeFunction fn;
};

std::vector<NamedFunction> time_functions() {
  return {{"1", sym::TimeFunction{}}, {"t", sym::TimeFunction::identity()}, {"sin t", sym::TimeFunction::sine()}};
}

sym::FunctionTable table_of(const sym::TimeFunction& f) {
  sym::FunctionTable t;
  for (const char* n : {"F1", "F2", "F3", "F4", "J1", "J2", "J3", "J4"}) t[n] = f;
  return t;
}

}  // namespace

SymmetrySuiteResult symmetry_suite(const ModelSpec& m, const SymmetrySuiteOptions& o) {
  validate(m);
  const ModelKind k = kind_of(m);
  const bool forced = k == ModelKind::III;
  SimConfig c;
  c.model = m;
  c.grid = o.grid ? *o.grid : (forced ? default_grid(m, 64) : Grid::periodic(64, 64, kTwoPi, kTwoPi));
  if (!forced) {
    c.preset.kind = InitialPreset::Kind::random_bandlimited;
    c.preset.seed = o.seed;
    c.preset.kmax = o.kmax;
  }
  const double t_end = o.t_end > 0.0 ? o.t_end : (forced ? 5 * 86400.0 : 1.0);
  double dt = o.dt;
  if (!(dt > 0.0)) {
    dt = forced ? 3600.0 : default_dt(m, initial_state(m, c.grid, c.preset));
    dt = t_end / std::ceil(t_end / dt);
  }
  c.dt = dt;
  c.nsteps = std::llround(t_end / dt);
  c.output_every = 1;
  auto sol = std::make_shared<TrajectorySampler>(run(c).snapshots);

  InvarianceSetup st;
  st.grid = c.grid;
  st.times = o.times.empty() ? std::vector<double>{0.4 * t_end, 0.6 * t_end} : o.times;
  SymmetrySuiteResult r;
  for (const auto& g : builtin_generators(k)) r.rows.push_back(verify_invariance(m, g, sol, o.eps, st));
  r.control = verify_invariance(m, negative_control(k), sol, o.eps, st);
  if (k == ModelKind::II) r.corrected_y8 = verify_invariance(m, rotating_frame_corrected(), sol, o.eps, st);
  return r;
}

std::vector<ConservationRow> conservation_suite(const ModelSpec& m, const ConservationSuiteOptions& o) {
  validate(m);
  const ModelKind k = kind_of(m);
  if (k == ModelKind::III) throw InvalidArgument("conservation_suite: no conservation laws for Model III");
  const std::string model = model_name(k);
  std::vector<ConservationRow> rows;

  // Off-shell identity for the printed vectors.
  const SmoothFields fields(2, o.field_seed);
  auto patch = [&](int n) {
    IdentitySetup s;
    s.patch = Grid::basin(n, n, 0.3, 0.3 + o.patch, -0.2, -0.2 + o.patch);
    s.times = {0.1, 0.5, 0.9, 1.3, 1.7};
    return s;
  };
  std::vector<VectorKind> vectors = k == ModelKind::I ? std::vector<VectorKind>{VectorKind::model1_01}
                                                      : std::vector<VectorKind>{VectorKind::model2_J1,
                                                                                VectorKind::model2_J1_corrected};
  for (VectorKind v : vectors) {
    for (const auto& nf : time_functions()) {
      if (v == VectorKind::model1_01 && nf.tag != "1") continue;  // no arbitrary function in this vector
      const auto T = conserved_vector(m, v, nf.fn);
      const auto L = multiplier_of(T);
      const std::string id = v == VectorKind::model1_01 ? L.id : L.id + "[J1=" + nf.tag + "]";
      const double fine = multiplier_identity_check(L, T, fields, patch(o.n)).relative();
      const double coarse = multiplier_identity_check(L, T, fields, patch(o.n / 2)).relative();
      rows.push_back({model, id, "identity:" + T.name, grid_label(o.n), fine, 1e-6, fine <= 1e-6});
      const double order = std::log2(coarse / fine);
      rows.push_back({model, id, "identity_order:" + T.name, grid_label(o.n / 2) + "/" + grid_label(o.n), order, 1.9,
                      order >= 1.9});
    }
  }

  // On-shell divergence along simulated trajectories (Model I vector).
  if (k == ModelKind::I && o.onshell_grids.size() >= 2) {
    const auto T = conserved_vector(m, VectorKind::model1_01);
    double dt0 = 0.0, prev = 0.0, worst = INFINITY;
    std::string label;
    for (std::size_t q = 0; q < o.onshell_grids.size(); ++q) {
      const int n = o.onshell_grids[q];
      SimConfig c;
      c.model = m;
      c.grid = Grid::periodic(n, n, kTwoPi, kTwoPi);
      c.preset.kind = InitialPreset::Kind::random_bandlimited;
      c.preset.seed = o.sim_seed;
      c.preset.kmax = 2;
      if (q == 0) {
        dt0 = default_dt(m, initial_state(m, c.grid, c.preset));
        dt0 = o.onshell_t_end / std::ceil(o.onshell_t_end / dt0);
      }
      c.dt = dt0 * o.onshell_grids.front() / n;
      c.nsteps = std::llround(o.onshell_t_end / c.dt);
      const double e = divergence_residual(T, run(c)).relative();
      rows.push_back({model, "I.1", "divergence_onshell", grid_label(n), e, 0.0, true});
      if (q > 0) worst = std::min(worst, std::log2(prev / e) / std::log2(static_cast<double>(n) / o.onshell_grids[q - 1]));
      prev = e;
      label += (q ? "/" : "") + grid_label(n);
    }
    rows.push_back({model, "I.1", "divergence_order", label, worst, 1.5, worst >= 1.5});
  }

  // Euler annihilation, one task per (function, set).
  EulerSetup es;
  es.block = Grid::basin(o.n, o.n, 0.3, 0.3 + o.euler_box, -0.2, -0.2 + o.euler_box);
  es.t0 = 0.2;
  es.dt = 0.1;
  es.levels = 25;
  const auto phi = compact_perturbation(es, 2, o.perturbation_seed);
  const SmoothFields efields(2, 7);
  struct Task {
    MultiplierSet set;
    std::string id;
    bool control;
  };
  std::vector<Task> tasks;
  for (const auto& nf : time_functions())
    for (auto& s : builtin_multipliers(m, table_of(nf.fn))) {
      const std::string id = s.id + "[" + (k == ModelKind::I ? "F" : "J") + "=" + nf.tag + "]";
      tasks.push_back({std::move(s), id, false});
    }
  tasks.push_back({negative_control_multiplier(m), negative_control_multiplier(m).id, true});
  std::vector<std::future<double>> results;
  for (const auto& t : tasks)
    results.push_back(std::async(std::launch::async, [&t, &efields, &phi, &es] {
      return euler_annihilation_check(t.set, efields, phi, es);
    }));
  for (std::size_t q = 0; q < tasks.size(); ++q) {
    const double v = results[q].get();
    if (tasks[q].control)
      rows.push_back({model, tasks[q].id, "euler_control", grid_label(o.n), v, 1e-2, v >= 1e-2});
    else
      rows.push_back({model, tasks[q].id, "euler", grid_label(o.n), v, 1e-6, v <= 1e-6});
  }
  return rows;
}

}  // namespace qg
