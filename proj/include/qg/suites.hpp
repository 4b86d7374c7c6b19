#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qg/conservation.hpp"
#include "qg/symmetry.hpp"

namespace qg {

/// Simulated (I, II) or rest-forced (III) trajectory checked against the builtin generators.
struct SymmetrySuiteOptions {
  std::optional<Grid> grid;  // default: 64^2 periodic 2 pi square (I, II), default_grid (III)
  int kmax = 2;
  std::uint64_t seed = 5;
  double t_end = 0.0;  // zero: 1 (I, II) or 5 days (III)
  double dt = 0.0;     // zero: CFL / 4 rounded to divide t_end (I, II), 3600 s (III)
  double eps = 0.1;
  std::vector<double> times;  // empty: 0.4 and 0.6 of t_end
};

struct SymmetrySuiteResult {
  std::vector<InvarianceReport> rows;           // one per builtin generator
  InvarianceReport control;                     // expected to fail
  std::optional<InvarianceReport> corrected_y8;  // Model II only
};

SymmetrySuiteResult symmetry_suite(const ModelSpec& m, const SymmetrySuiteOptions& o = {});

struct ConservationSuiteOptions {
  int n = 128;           // identity and Euler grids; the identity order uses n/2 as well
  double patch = 0.25;   // identity patch side
  double euler_box = 6.283185307179586;
  std::vector<int> onshell_grids{32, 64, 128};  // Model I only; empty skips
  double onshell_t_end = 0.5;
  std::uint64_t sim_seed = 5;
  std::uint64_t field_seed = 11;
  std::uint64_t perturbation_seed = 3;
};

/// Rows: identity and its order (vectors x {1, t, sin t}), on-shell divergence order (Model I),
/// Euler annihilation (six sets x {1, t, sin t}) and the Euler control (pass when it is detected).
std::vector<ConservationRow> conservation_suite(const ModelSpec& m, const ConservationSuiteOptions& o = {});

}  // namespace qg
