#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "qg/grid_ops.hpp"
#include "qg/models.hpp"
#include "qg/simulator.hpp"
#include "qg/symbolic.hpp"

namespace qg {

struct SpaceTimePoint {
  double t = 0.0, x = 0.0, y = 0.0;
};

/// Derivatives of one layer at a point: (a, b, c) = d_t^a d_x^b d_y^c psi with a <= 1, b + c <= 3.
struct Jet {
  std::array<double, 32> d{};
  double& operator()(int a, int b, int c) { return d[(a * 4 + b) * 4 + c]; }
  double operator()(int a, int b, int c) const { return d[(a * 4 + b) * 4 + c]; }
};

/// Multiplier (Lambda^1, Lambda^2) as a function of (t, x, y, psi_1, psi_2).
struct MultiplierSet {
  std::string id;     // "I.1" .. "II.6"
  std::string label;  // printed form
  ModelSpec model;
  sym::FunctionTable functions;  // F1..F4 (Model I) or J1..J4 (Model II); missing names read as 1
  std::function<void(const SpaceTimePoint&, const double* psi, const sym::FunctionTable&, double* out)> fn;

  void operator()(const SpaceTimePoint& p, const double* psi, double* out) const { fn(p, psi, functions, out); }
};

/// The six printed sets of each two-layer model. Model III is rejected.
std::vector<MultiplierSet> builtin_multipliers(const ModelSpec& m, const sym::FunctionTable& fns = {});

/// (psi_2, 0): not a multiplier of either two-layer model.
MultiplierSet negative_control_multiplier(const ModelSpec& m);

struct Flux {
  double t = 0.0, x = 0.0, y = 0.0;
};

enum class VectorKind {
  model1_01,            // Model I, multiplier (0, 1)
  model2_J1,            // Model II, multiplier (J1, J1), as printed
  model2_J1_corrected,  // same with 3 psi2_y in the first T^x bracket and the quadratic terms negated
};

struct ConservedVector {
  std::string name;
  VectorKind kind{};
  ModelSpec model;
  sym::TimeFunction fn;  // J1 for the Model II vectors
  std::function<Flux(const SpaceTimePoint&, const std::vector<Jet>&)> eval;

  Flux operator()(const SpaceTimePoint& p, const std::vector<Jet>& jets) const { return eval(p, jets); }
};

/// Model I requires rho1 != rho2; the model kind must match the vector.
ConservedVector conserved_vector(const ModelSpec& m, VectorKind which, sym::TimeFunction fn = {});

/// The multiplier a conserved vector belongs to.
MultiplierSet multiplier_of(const ConservedVector& T);

/// Random band-limited analytic fields psi_l = sum a cos(kx x + ky y + w t + phase) with exact jets.
class SmoothFields {
 public:
  SmoothFields(int layers, std::uint64_t seed, int modes = 6, double k = 1.0, double amplitude = 1.0);
  int layers() const { return static_cast<int>(modes_.size()); }
  Jet jet(int layer, const SpaceTimePoint& p) const;
  double value(int layer, const SpaceTimePoint& p) const;
  std::vector<ScalarField> sample(const Grid& g, double t) const;

 private:
  struct Mode {
    double a, kx, ky, w, phase;
  };
  std::vector<std::vector<Mode>> modes_;
};

/// G_i = d_t omega_i + [omega_i, psi_i] from exact jets (two-layer models).
std::vector<double> pde_lhs(const ModelSpec& m, const std::vector<Jet>& jets);

struct DivergenceRecord {
  double max = 0.0;    // SI units
  double rms = 0.0;
  double scale = 0.0;  // max of |D_t T^t| + |D_x T^x| + |D_y T^y|
  double relative() const { return scale > 0.0 ? max / scale : max; }
};

/// D_t T^t + D_x T^x + D_y T^y by second-order central differences along a trajectory of uniformly
/// spaced snapshots (at least 3). Basin grids skip a wall margin.
DivergenceRecord divergence_residual(const ConservedVector& T, const std::vector<LayeredState>& snapshots,
                                     int margin = 3);
DivergenceRecord divergence_residual(const ConservedVector& T, const Trajectory& traj, int margin = 3);

struct IdentitySetup {
  Grid patch{};  // basin-topology patch; interior nodes are checked
  std::vector<double> times;
  double dt_fd = 0.0;  // zero: min(dx, dy)
};

/// max |sum Lambda^i G_i - Div T| with exact jets for G and T and central differences for Div T.
/// relative() divides by the divergence term scale.
DivergenceRecord multiplier_identity_check(const MultiplierSet& L, const ConservedVector& T,
                                           const SmoothFields& fields, const IdentitySetup& setup);

struct EulerSetup {
  Grid block{};    // basin topology
  double t0 = 0.0;
  double dt = 0.0;  // level spacing; zero: min(dx, dy)
  int levels = 9;
  int margin = 3;
  double tau_rel = 1e-6;
  JacobianScheme scheme = JacobianScheme::arakawa;
};

/// phi[level][layer], a smooth random bump vanishing within the margin in space and time.
std::vector<std::vector<ScalarField>> compact_perturbation(const EulerSetup& s, int layers, std::uint64_t seed);

/// |sum_k p_k| / sum_k |p_k| with p_k = d/dtau (Lambda . G)[psi + tau phi] at node k (centered in tau).
/// G is the discrete operator on the block; 0 when every p_k vanishes. phi touching the margin is rejected.
double euler_annihilation_check(const MultiplierSet& L, const SmoothFields& fields,
                                const std::vector<std::vector<ScalarField>>& phi, const EulerSetup& s);

struct ConservationRow {
  std::string model;
  std::string multiplier_id;
  std::string check;
  std::string grid;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

void write_conservation_csv(std::ostream& os, const std::vector<ConservationRow>& rows);

}  // namespace qg
