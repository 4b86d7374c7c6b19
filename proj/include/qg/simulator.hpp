#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qg/models.hpp"

namespace qg {

struct InitialPreset {
  enum class Kind { rest, random_bandlimited };
  Kind kind = Kind::rest;
  std::uint64_t seed = 1;
  int kmax = 4;
  double amplitude = 1.0;  // max |psi| of each layer, m^2/s
};

/// Sum of Fourier modes with 1 <= max(|kx|,|ky|) <= kmax (periodic) or sine modes 1..kmax (basin,
/// so psi = lap psi = 0 on the walls); each layer scaled to max |psi| = amplitude.
std::vector<ScalarField> random_bandlimited(const Grid& g, int layers, std::uint64_t seed, int kmax,
                                            double amplitude);

LayeredState initial_state(const ModelSpec& m, const Grid& g, const InitialPreset& preset);

struct SimConfig {
  ModelSpec model = ModelIIParams{};
  Grid grid{};
  double dt = 0.0;
  std::int64_t nsteps = 0;
  std::int64_t output_every = 1;
  std::optional<LayeredState> initial;  // overrides preset when set
  InitialPreset preset{};
};

struct Diagnostics {
  std::vector<double> energy;
  std::vector<double> enstrophy;
  std::vector<double> mean_pv;
  double max_grad = 0.0;
};

struct DiagnosticsRow {
  std::int64_t step = 0;
  double time = 0.0;
  Diagnostics d;
};

struct Trajectory {
  std::vector<LayeredState> snapshots;
  std::vector<DiagnosticsRow> diagnostics;
  double spacing = 0.0;  // time between snapshots
};

/// One SSP-RK3 step on omega, with psi recovered by PV inversion after each stage.
LayeredState step(const ModelSpec& m, const LayeredState& s, double dt, std::int64_t index = 0);

using SnapshotObserver = std::function<void(const LayeredState&, std::int64_t step)>;

/// Integrates the config. With keep_snapshots false the observer is the only consumer.
Trajectory run(const SimConfig& c, const SnapshotObserver& observer = {}, bool keep_snapshots = true);

Diagnostics diagnostics(const ModelSpec& m, const LayeredState& s);

/// Quadratic invariant of the semi-discrete inviscid dynamics: -1/2 sum_i w_i <psi_i, omega_i - beta y>,
/// w = (1, 1) for Model II and (1, -H2/H1) for Model I.
double total_energy(const ModelSpec& m, const LayeredState& s);

/// 0.5 min(dx, dy) / max |grad psi| (infinity at rest).
double cfl_limit(const LayeredState& s);

/// dt when the config leaves it unset: a quarter of the CFL limit, or a model fallback at rest.
double default_dt(const ModelSpec& m, const LayeredState& s);

/// Human-readable warning when dt exceeds the CFL estimate; empty otherwise.
std::string cfl_warning(const LayeredState& s, double dt);

}  // namespace qg
